#include "rhsbf/em_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rhsbf/errors.hpp"

namespace rhsbf {

namespace {

constexpr double kDbFloor = -300.0;

std::vector<double> ula_offsets(int n) {
  std::vector<double> offsets(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    offsets[static_cast<std::size_t>(i)] = (i + 1) - (n + 1) / 2.0;
  }
  return offsets;
}

}  // namespace

void MediumParams::validate() const {
  if (!(mu > 0.0)) throw InvalidArgument("medium: mu must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("medium: eps must be positive");
  if (!(c0 > 0.0)) throw InvalidArgument("medium: c0 must be positive");
}

ArrayGeometry ArrayGeometry::ula(int num_elements, double spacing, int num_feeders,
                                 double feeder_spacing, const Vec3& orientation) {
  if (num_elements < 1) throw InvalidArgument("geometry: N must be >= 1");
  if (num_feeders < 1) throw InvalidArgument("geometry: L must be >= 1");
  if (!(spacing > 0.0)) throw InvalidArgument("geometry: element spacing must be positive");
  if (num_feeders > 1 && !(feeder_spacing > 0.0)) {
    throw InvalidArgument("geometry: feeder spacing must be positive");
  }
  ArrayGeometry g;
  g.spacing_ = spacing;
  g.orientation_ = orientation;
  g.offsets_ = ula_offsets(num_elements);
  for (double delta : g.offsets_) g.elements_.emplace_back(delta * spacing, 0.0, 0.0);
  for (double delta : ula_offsets(num_feeders)) {
    g.feeders_.emplace_back(delta * feeder_spacing, 0.0, 0.0);
  }
  g.validate();
  return g;
}

ArrayGeometry ArrayGeometry::from_positions(std::vector<Vec3> elements,
                                            std::vector<Vec3> feeders, double spacing,
                                            const Vec3& orientation) {
  if (elements.empty()) throw InvalidArgument("geometry: no elements");
  if (feeders.empty()) throw InvalidArgument("geometry: no feeders");
  ArrayGeometry g;
  g.offsets_ = ula_offsets(static_cast<int>(elements.size()));
  g.elements_ = std::move(elements);
  g.feeders_ = std::move(feeders);
  g.spacing_ = spacing;
  g.orientation_ = orientation;
  g.validate();
  return g;
}

void ArrayGeometry::validate() const {
  if (std::abs(orientation_.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("geometry: dipole orientation must be a unit vector");
  }
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    for (std::size_t b = a + 1; b < elements_.size(); ++b) {
      if ((elements_[a] - elements_[b]).norm() < kMinSeparation) {
        std::ostringstream os;
        os << "geometry: elements " << a << " and " << b << " closer than "
           << kMinSeparation << " m";
        throw SingularityError(os.str());
      }
    }
  }
}

void CouplingConfig::validate() const {
  if (!(alpha_wg >= 0.0)) throw InvalidArgument("coupling: alpha_wg must be >= 0");
  if (target_xi_fs && !(*target_xi_fs >= 0.0)) {
    throw InvalidArgument("coupling: target xi_fs must be >= 0");
  }
  if (target_xi_wg && !(*target_xi_wg >= 0.0)) {
    throw InvalidArgument("coupling: target xi_wg must be >= 0");
  }
}

double wavenumber(double frequency, const MediumParams& medium) {
  if (!(frequency > 0.0)) throw InvalidArgument("wavenumber: frequency must be positive");
  return 2.0 * kPi * frequency * std::sqrt(medium.mu * medium.eps);
}

Vec3 dipole_angular_factor(const Vec3& r_hat, const Vec3& e_m) {
  return 3.0 * r_hat * r_hat.dot(e_m) - e_m;
}

GreenFieldTerms green_field_terms(const Vec3& r_src, const Vec3& r_obs, const Vec3& e_m,
                                  double frequency, const MediumParams& medium) {
  const Vec3 sep = r_obs - r_src;
  const double dist = sep.norm();
  if (!(dist > 0.0)) throw SingularityError("green_field: coincident source and observation");
  const Vec3 r_hat = sep / dist;
  const double k = wavenumber(frequency, medium);

  // R x (e x R) = e - (e.R) R
  const Vec3 transverse = r_hat.cross(e_m.cross(r_hat));
  const cplx radial_coeff = 1.0 / (dist * dist) - kJ * k / dist;

  GreenFieldTerms terms;
  terms.radiating = (k * k) * transverse.cast<cplx>();
  terms.near = radial_coeff * dipole_angular_factor(r_hat, e_m).cast<cplx>();
  return terms;
}

CVec3 green_field(const Vec3& r_src, const Vec3& r_obs, const Vec3& e_m, double frequency,
                  const MediumParams& medium) {
  const GreenFieldTerms terms = green_field_terms(r_src, r_obs, e_m, frequency, medium);
  const double dist = (r_obs - r_src).norm();
  const double k = wavenumber(frequency, medium);
  const cplx prefactor = std::exp(-kJ * (k * dist)) / (4.0 * kPi * dist);
  return prefactor * (terms.radiating + terms.near);
}

CMat coupling_fs(const ArrayGeometry& geometry, double frequency, const MediumParams& medium) {
  const int n = geometry.num_elements();
  const auto& pos = geometry.element_positions();
  const Vec3& e_m = geometry.orientation();
  const CVec3 e_c = e_m.cast<cplx>();
  CMat xi = CMat::Zero(n, n);
  // Entries are even in R-hat, so fill one triangle and mirror it.
  for (int col = 0; col < n; ++col) {
    for (int row = col + 1; row < n; ++row) {
      const CVec3 h = green_field(pos[static_cast<std::size_t>(col)],
                                  pos[static_cast<std::size_t>(row)], e_m, frequency, medium);
      const cplx value = e_c.dot(h);  // e is real, so dot() conjugation is harmless
      xi(row, col) = value;
      xi(col, row) = value;
    }
  }
  return xi;
}

CMat coupling_wg(const ArrayGeometry& geometry, double /*frequency*/,
                 const CouplingConfig& config) {
  config.validate();
  const int n = geometry.num_elements();
  const double unit = config.physical_distance ? geometry.spacing() : 1.0;
  const cplx gamma{config.alpha_wg, config.beta_wg};
  CMat xi = CMat::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double s = std::abs(row - col) * unit;
      const cplx decay = std::exp(-gamma * s);
      xi(row, col) = (row > col ? config.rho_plus : config.rho_minus) * decay;
    }
  }
  return xi;
}

double coupling_strength(const CMat& xi) {
  if (xi.rows() == 0) return 0.0;
  return std::abs(xi.sum()) / static_cast<double>(xi.rows());
}

namespace {

void rescale_to(CMat& xi, const std::optional<double>& target, const char* name) {
  if (!target) return;
  const double current = coupling_strength(xi);
  if (*target == 0.0) {
    xi.setZero();
    return;
  }
  if (!(current > 0.0)) {
    throw InvalidArgument(std::string("assemble_coupling: cannot rescale a zero ") + name +
                          " matrix to a nonzero target");
  }
  xi *= *target / current;
}

}  // namespace

CouplingMatrix assemble_coupling(CMat fs, CMat wg, const CouplingConfig& config) {
  if (fs.rows() != fs.cols() || wg.rows() != wg.cols() || fs.rows() != wg.rows()) {
    throw InvalidArgument("assemble_coupling: fs and wg must be square and of equal size");
  }
  config.validate();
  rescale_to(fs, config.target_xi_fs, "free-space");
  rescale_to(wg, config.target_xi_wg, "surface-wave");
  fs.diagonal().setZero();
  wg.diagonal().setZero();

  CouplingMatrix out;
  out.total = fs + wg;
  out.xi_fs = coupling_strength(fs);
  out.xi_wg = coupling_strength(wg);
  out.fs = std::move(fs);
  out.wg = std::move(wg);
  return out;
}

std::vector<CouplingMatrix> build_coupling(const ArrayGeometry& geometry,
                                           std::span<const double> frequencies,
                                           const MediumParams& medium,
                                           const CouplingConfig& config) {
  std::vector<CouplingMatrix> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) {
    out.push_back(assemble_coupling(coupling_fs(geometry, f, medium),
                                    coupling_wg(geometry, f, config), config));
  }
  return out;
}

std::vector<double> far_field_pattern(const CVec& moments, const ArrayGeometry& geometry,
                                      double frequency, const MediumParams& medium,
                                      std::span<const Direction> grid) {
  if (moments.size() != geometry.num_elements()) {
    throw InvalidArgument("far_field_pattern: moment count differs from element count");
  }
  if (!(moments.norm() > 0.0)) throw InvalidArgument("far_field_pattern: all-zero moments");
  const double k = wavenumber(frequency, medium);
  const Vec3& e_m = geometry.orientation();
  const auto& pos = geometry.element_positions();

  std::vector<double> power(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double st = std::sin(grid[g].theta);
    const Vec3 r_hat(st * std::cos(grid[g].phi), st * std::sin(grid[g].phi),
                     std::cos(grid[g].theta));
    const double element = (e_m - e_m.dot(r_hat) * r_hat).norm();
    cplx af{0.0, 0.0};
    for (Eigen::Index n = 0; n < moments.size(); ++n) {
      af += moments(n) * std::exp(kJ * (k * r_hat.dot(pos[static_cast<std::size_t>(n)])));
    }
    power[g] = std::norm(element * af);
  }

  const double peak = power.empty() ? 0.0 : *std::max_element(power.begin(), power.end());
  std::vector<double> db(grid.size(), kDbFloor);
  if (peak > 0.0) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (power[g] > 0.0) db[g] = std::max(kDbFloor, 10.0 * std::log10(power[g] / peak));
    }
  }
  return db;
}

std::vector<Direction> azimuth_cut(double start_deg, double stop_deg, double step_deg) {
  if (!(step_deg > 0.0) || stop_deg < start_deg) {
    throw InvalidArgument("azimuth_cut: invalid angle range");
  }
  std::vector<Direction> grid;
  const int count = static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    grid.push_back({kPi / 2.0, deg2rad(start_deg + i * step_deg)});
  }
  return grid;
}

}  // namespace rhsbf

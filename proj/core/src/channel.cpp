#include "rhsbf/channel.hpp"

#include <cmath>

#include "rhsbf/errors.hpp"

namespace rhsbf {

SubbandPlan subband_centers(double carrier, double bandwidth, int count) {
  if (count < 1) throw InvalidArgument("subband_centers: U must be >= 1");
  if (!(bandwidth > 0.0)) throw InvalidArgument("subband_centers: B must be positive");
  if (!(carrier > bandwidth / 2.0)) {
    throw InvalidArgument("subband_centers: carrier must exceed B/2");
  }
  SubbandPlan plan;
  plan.carrier = carrier;
  plan.bandwidth = bandwidth;
  plan.count = count;
  plan.subband_width = bandwidth / count;
  plan.centers.reserve(static_cast<std::size_t>(count));
  for (int u = 1; u <= count; ++u) {
    plan.centers.push_back(carrier + (u - (count + 1) / 2.0) * plan.subband_width);
  }
  return plan;
}

UserParams user_params(double r, double theta) {
  if (!(r > 0.0)) throw InvalidArgument("user_params: r must be positive");
  const double psi = std::cos(theta);
  return {psi, (1.0 - psi * psi) / r};
}

UserLocation UserLocation::from_radians(double r, double theta) {
  const UserParams p = user_params(r, theta);
  return {r, theta, p.psi, p.nu};
}

UserLocation UserLocation::from_degrees(double r, double theta_deg) {
  return from_radians(r, deg2rad(theta_deg));
}

AbsorptionModel AbsorptionModel::constant(double kappa) {
  if (!(kappa >= 0.0)) throw InvalidArgument("absorption: kappa must be >= 0");
  AbsorptionModel m;
  m.kappa_ = [kappa](double) { return kappa; };
  return m;
}

AbsorptionModel AbsorptionModel::custom(std::function<double(double)> kappa_of_f) {
  AbsorptionModel m;
  m.kappa_ = std::move(kappa_of_f);
  return m;
}

double AbsorptionModel::operator()(double frequency) const {
  const double kappa = kappa_ ? kappa_(frequency) : 0.0;
  if (!(kappa >= 0.0)) throw InvalidArgument("absorption: negative coefficient");
  return kappa;
}

CRow array_response(const ArrayGeometry& geometry, double psi, double nu, double frequency,
                    const MediumParams& medium) {
  const int n = geometry.num_elements();
  const double k = wavenumber(frequency, medium);
  const double d = geometry.spacing();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CRow b(n);
  for (int i = 0; i < n; ++i) {
    const double x = geometry.index_offsets()[static_cast<std::size_t>(i)] * d;
    const double delta_r = -x * psi + 0.5 * x * x * nu;
    b(i) = scale * std::exp(-kJ * (k * delta_r));
  }
  return b;
}

cplx path_gain(double r, double frequency, const AbsorptionModel& absorption,
               const MediumParams& medium) {
  if (!(r > 0.0)) throw InvalidArgument("path_gain: r must be positive");
  if (!(frequency > 0.0)) throw InvalidArgument("path_gain: frequency must be positive");
  const double lambda = medium.c0 / frequency;
  const double k = wavenumber(frequency, medium);
  const double amplitude = lambda / (4.0 * kPi * r) * std::exp(-absorption(frequency) * r / 2.0);
  return amplitude * std::exp(-kJ * (k * r));
}

namespace {

CRow exact_row(const ArrayGeometry& geometry, const UserLocation& user, double frequency,
               const AbsorptionModel& absorption, const MediumParams& medium) {
  const int n = geometry.num_elements();
  const double d = geometry.spacing();
  CRow h(n);
  for (int i = 0; i < n; ++i) {
    const double x = geometry.index_offsets()[static_cast<std::size_t>(i)] * d;
    const double r_n = std::sqrt(user.r * user.r + x * x - 2.0 * user.r * x * user.psi);
    h(i) = path_gain(r_n, frequency, absorption, medium);
  }
  return h;
}

}  // namespace

ChannelSet build_channels(const ArrayGeometry& geometry, const std::vector<UserLocation>& users,
                          const SubbandPlan& plan, const AbsorptionModel& absorption,
                          const NoiseSpec& noise, const MediumParams& medium,
                          ChannelModel model) {
  if (!noise.per_user.empty() && noise.per_user.size() != users.size()) {
    throw InvalidArgument("build_channels: per-user noise list must have K entries");
  }
  ChannelSet set;
  set.users = users;
  set.plan = plan;
  const double sqrt_n = std::sqrt(static_cast<double>(geometry.num_elements()));
  for (std::size_t k = 0; k < users.size(); ++k) {
    const UserLocation& user = users[k];
    if (!(user.r > 0.0)) throw InvalidArgument("build_channels: user distance must be positive");
    const double sigma2 = noise.per_user.empty() ? noise.sigma2 : noise.per_user[k];
    if (!(sigma2 > 0.0)) throw InvalidArgument("build_channels: noise power must be positive");
    std::vector<CRow> rows;
    rows.reserve(plan.centers.size());
    for (double f : plan.centers) {
      if (model == ChannelModel::exact_spherical) {
        rows.push_back(exact_row(geometry, user, f, absorption, medium));
      } else {
        const cplx beta = path_gain(user.r, f, absorption, medium);
        rows.push_back(beta * sqrt_n * array_response(geometry, user.psi, user.nu, f, medium));
      }
    }
    set.rows.push_back(std::move(rows));
    set.noise.emplace_back(plan.centers.size(), sigma2);
  }
  return set;
}

}  // namespace rhsbf

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rhsbf/types.hpp"

namespace rhsbf {

/// Homogeneous medium. Wavenumbers use sqrt(mu*eps); c0 is kept for
/// wavelength-based quantities (path gain) and for consistency checks.
struct MediumParams {
  double mu = 4.0e-7 * kPi;
  double eps = 8.854187817e-12;
  double c0 = 2.99792458e8;

  static MediumParams free_space() { return {}; }
  void validate() const;
};

/// Element and feeder layout of the surface.
///
/// Elements are indexed along the feeding direction; index_offsets holds
/// delta_n = n - (N+1)/2 so that the ULA element n sits at delta_n * spacing on
/// the x axis.
class ArrayGeometry {
 public:
  static constexpr double kMinSeparation = 1e-6;  // metres

  /// Uniform linear array on the x axis, centred on the origin, with L
  /// feeders on the same axis at feeder_spacing (also centred).
  static ArrayGeometry ula(int num_elements, double spacing, int num_feeders,
                           double feeder_spacing, const Vec3& orientation = Vec3::UnitZ());

  /// Arbitrary layout. Offsets default to the ULA convention.
  static ArrayGeometry from_positions(std::vector<Vec3> elements, std::vector<Vec3> feeders,
                                      double spacing, const Vec3& orientation);

  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_feeders() const { return static_cast<int>(feeders_.size()); }
  const std::vector<Vec3>& element_positions() const { return elements_; }
  const std::vector<Vec3>& feeder_positions() const { return feeders_; }
  const std::vector<double>& index_offsets() const { return offsets_; }
  double spacing() const { return spacing_; }
  const Vec3& orientation() const { return orientation_; }

 private:
  ArrayGeometry() = default;
  void validate() const;

  std::vector<Vec3> elements_;
  std::vector<Vec3> feeders_;
  std::vector<double> offsets_;
  double spacing_ = 0.0;
  Vec3 orientation_ = Vec3::UnitZ();
};

/// Surface-wave coupling parameters plus optional rescale targets.
struct CouplingConfig {
  cplx rho_plus{1.0, 0.0};
  cplx rho_minus{1.0, 0.0};
  double alpha_wg = 0.15;
  double beta_wg = 1.0;
  /// When set, alpha/beta are per metre of guided path (s = |n'-n| d);
  /// otherwise per index step (s = |n'-n|).
  bool physical_distance = false;
  std::optional<double> target_xi_fs;
  std::optional<double> target_xi_wg;

  void validate() const;
};

/// One subband's coupling: free-space and surface-wave parts and their sum.
struct CouplingMatrix {
  CMat fs;
  CMat wg;
  CMat total;
  double xi_fs = 0.0;
  double xi_wg = 0.0;

  int size() const { return static_cast<int>(total.rows()); }
};

double wavenumber(double frequency, const MediumParams& medium);

/// Field of a unit magnetic dipole at r_src oriented along e_m, observed at
/// r_obs, including the exp(-jkR)/(4 pi R) factor.
CVec3 green_field(const Vec3& r_src, const Vec3& r_obs, const Vec3& e_m, double frequency,
                  const MediumParams& medium);

/// The two bracketed terms of the Green's field without the common
/// exp(-jkR)/(4 pi R) factor: {k^2 transverse term, induction + quasi-static term}.
struct GreenFieldTerms {
  CVec3 radiating;
  CVec3 near;
};
GreenFieldTerms green_field_terms(const Vec3& r_src, const Vec3& r_obs, const Vec3& e_m,
                                  double frequency, const MediumParams& medium);

/// 3 R (R.e) - e, the dipolar angular factor.
Vec3 dipole_angular_factor(const Vec3& r_hat, const Vec3& e_m);

CMat coupling_fs(const ArrayGeometry& geometry, double frequency, const MediumParams& medium);
CMat coupling_wg(const ArrayGeometry& geometry, double frequency, const CouplingConfig& config);

/// |sum of entries| / N.
double coupling_strength(const CMat& xi);

CouplingMatrix assemble_coupling(CMat fs, CMat wg, const CouplingConfig& config);

/// Builds fs, wg and the rescaled total at each frequency.
std::vector<CouplingMatrix> build_coupling(const ArrayGeometry& geometry,
                                           std::span<const double> frequencies,
                                           const MediumParams& medium,
                                           const CouplingConfig& config);

struct Direction {
  double theta = 0.0;  // polar angle from +z, rad
  double phi = 0.0;    // azimuth from +x, rad
};

/// Normalized far-field power pattern in dB (peak exactly 0 dB).
std::vector<double> far_field_pattern(const CVec& moments, const ArrayGeometry& geometry,
                                      double frequency, const MediumParams& medium,
                                      std::span<const Direction> grid);

/// Azimuth cut in the theta = 90 deg plane, angles in degrees from the array axis.
std::vector<Direction> azimuth_cut(double start_deg = 0.0, double stop_deg = 180.0,
                                   double step_deg = 1.0);

}  // namespace rhsbf

#pragma once

#include <functional>
#include <vector>

#include "rhsbf/em_coupling.hpp"
#include "rhsbf/types.hpp"

namespace rhsbf {

struct SubbandPlan {
  double carrier = 0.0;    // Hz
  double bandwidth = 0.0;  // Hz
  int count = 0;
  double subband_width = 0.0;  // bandwidth / count
  std::vector<double> centers;

  int size() const { return count; }
};

SubbandPlan subband_centers(double carrier, double bandwidth, int count);

struct UserLocation {
  double r = 0.0;      // m
  double theta = 0.0;  // rad, measured from the array axis
  double psi = 0.0;    // cos(theta)
  double nu = 0.0;     // (1 - psi^2) / r

  /// theta given in degrees at the config boundary.
  static UserLocation from_degrees(double r, double theta_deg);
  static UserLocation from_radians(double r, double theta);
};

struct UserParams {
  double psi;
  double nu;
};
UserParams user_params(double r, double theta);

/// Molecular absorption coefficient as a function of frequency (1/m).
class AbsorptionModel {
 public:
  static AbsorptionModel constant(double kappa);
  static AbsorptionModel custom(std::function<double(double)> kappa_of_f);

  double operator()(double frequency) const;

 private:
  std::function<double(double)> kappa_;
};

enum class ChannelModel {
  common_amplitude,  // quadratic phase expansion, one amplitude per user
  exact_spherical,   // element-wise exact distance in both phase and amplitude
};

/// Unit-norm near-field row b_u(psi, nu).
CRow array_response(const ArrayGeometry& geometry, double psi, double nu, double frequency,
                    const MediumParams& medium);

cplx path_gain(double r, double frequency, const AbsorptionModel& absorption,
               const MediumParams& medium);

struct ChannelSet {
  std::vector<std::vector<CRow>> rows;      // [k][u], 1 x N
  std::vector<std::vector<double>> noise;   // [k][u]
  std::vector<UserLocation> users;
  SubbandPlan plan;

  int num_users() const { return static_cast<int>(users.size()); }
  int num_subbands() const { return plan.count; }
  int num_elements() const { return rows.empty() ? 0 : static_cast<int>(rows[0][0].size()); }
};

/// Noise power sigma^2 applied to every (k,u); use per_user to override.
struct NoiseSpec {
  double sigma2 = 1.0;
  std::vector<double> per_user;  // optional, size K
};

ChannelSet build_channels(const ArrayGeometry& geometry, const std::vector<UserLocation>& users,
                          const SubbandPlan& plan, const AbsorptionModel& absorption,
                          const NoiseSpec& noise, const MediumParams& medium,
                          ChannelModel model = ChannelModel::common_amplitude);

}  // namespace rhsbf

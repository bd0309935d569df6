#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rhsbf/baselines.hpp"
#include "rhsbf/channel.hpp"
#include "rhsbf/em_coupling.hpp"
#include "rhsbf/solver.hpp"

namespace rhsbf {

/// Full scenario description. Defaults reproduce the Table I setup.
struct SystemConfig {
  // band
  double f_c = 28e9;
  double B = 1e9;
  int U = 8;
  MediumParams medium;

  // array
  int N = 32;
  double d = 2.68e-3;
  int L = 4;
  double feeder_spacing = 10.70e-3;
  Vec3 orientation = Vec3::UnitZ();
  double n_eff = 1.7320508075688772;

  // users and channel
  std::vector<double> user_r{3.0, 4.5, 6.0, 7.5};
  std::vector<double> user_theta_deg{75.0, 85.0, 95.0, 105.0};
  double kappa_abs = 0.1;
  double sigma2 = 1.0;
  ChannelModel channel_model = ChannelModel::common_amplitude;

  // power
  double p_bs = 10.0;
  std::vector<double> p_bs_list{2.0, 5.0, 10.0, 20.0};
  double p_rhs = 50.0;
  double eta = 1.0;

  // coupling
  double xi_fs = 0.02;
  double xi_wg = 0.02;
  double alpha_wg = 0.15;
  double beta_wg = 1.0;
  cplx rho_plus{1.0, 0.0};
  cplx rho_minus{1.0, 0.0};
  bool wg_physical_distance = false;

  // hologram
  double uniform_level = 0.5;

  SolverOptions solver;

  std::vector<SchemeTag> schemes = all_schemes();
  std::vector<std::uint64_t> seeds{1};

  // Monte Carlo knobs, all off by default.
  double user_jitter_r = 0.0;          // m, uniform +-
  double user_jitter_theta_deg = 0.0;  // deg, uniform +-
  bool random_hdma_weights = false;

  // sweep grids keyed by axis name: pbs, xi_fs, rhs_size
  std::map<std::string, std::vector<double>> sweep{
      {"pbs", {2.0, 5.0, 10.0, 20.0}},
      {"xi_fs", {0.0, 0.01, 0.02, 0.05, 0.1}},
      {"rhs_size", {8.0, 16.0, 32.0, 64.0}},
  };

  int threads = 0;  // 0 = hardware concurrency

  int K() const { return static_cast<int>(user_r.size()); }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses JSON text; absent keys keep their defaults, unknown keys are errors.
SystemConfig parse_config(const std::string& json_text);
SystemConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every resolved field.
std::string config_to_json(const SystemConfig& config);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const SystemConfig& config);

}  // namespace rhsbf

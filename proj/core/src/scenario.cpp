#include "rhsbf/scenario.hpp"

#include <algorithm>
#include <random>

namespace rhsbf {

std::vector<CMat> BuiltScenario::total_coupling() const {
  std::vector<CMat> out;
  out.reserve(coupling.size());
  for (const auto& c : coupling) out.push_back(c.total);
  return out;
}

std::vector<CMat> BuiltScenario::fs_coupling() const {
  std::vector<CMat> out;
  out.reserve(coupling.size());
  for (const auto& c : coupling) out.push_back(c.fs);
  return out;
}

CouplingConfig coupling_config(const SystemConfig& config) {
  CouplingConfig cc;
  cc.rho_plus = config.rho_plus;
  cc.rho_minus = config.rho_minus;
  cc.alpha_wg = config.alpha_wg;
  cc.beta_wg = config.beta_wg;
  cc.physical_distance = config.wg_physical_distance;
  cc.target_xi_fs = config.xi_fs;
  cc.target_xi_wg = config.xi_wg;
  return cc;
}

BuiltScenario build_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  BuiltScenario s{
      .medium = config.medium,
      .geometry = ArrayGeometry::ula(config.N, config.d, config.L, config.feeder_spacing,
                                     config.orientation),
  };
  s.plan = subband_centers(config.f_c, config.B, config.U);

  std::mt19937_64 rng(seed);
  for (int k = 0; k < config.K(); ++k) {
    double r = config.user_r[static_cast<std::size_t>(k)];
    double theta = config.user_theta_deg[static_cast<std::size_t>(k)];
    if (config.user_jitter_r > 0.0) {
      std::uniform_real_distribution<double> jitter(-config.user_jitter_r, config.user_jitter_r);
      r = std::max(r + jitter(rng), 1e-3);
    }
    if (config.user_jitter_theta_deg > 0.0) {
      std::uniform_real_distribution<double> jitter(-config.user_jitter_theta_deg,
                                                    config.user_jitter_theta_deg);
      theta += jitter(rng);
    }
    s.users.push_back(UserLocation::from_degrees(r, theta));
  }

  NoiseSpec noise;
  noise.sigma2 = config.sigma2;
  s.channels = build_channels(s.geometry, s.users, s.plan,
                              AbsorptionModel::constant(config.kappa_abs), noise, s.medium,
                              config.channel_model);
  s.coupling = build_coupling(s.geometry, s.plan.centers, s.medium, coupling_config(config));

  FeedConfig feed;
  feed.effective_index = config.n_eff;
  for (double f : s.plan.centers) s.feed.push_back(build_feed_matrix(s.geometry, feed, f, s.medium));

  RMat weights = uniform_hdma_weights(config.K(), config.L);
  if (config.random_hdma_weights) {
    std::exponential_distribution<double> draw(1.0);
    for (Eigen::Index i = 0; i < weights.size(); ++i) weights.data()[i] = draw(rng);
    weights /= weights.sum();
  }
  s.hdma = init_hologram_hdma(s.geometry, s.users, feed, config.f_c, weights, s.medium);
  return s;
}

SchemeInputs scheme_inputs(const BuiltScenario& scenario, const SystemConfig& config) {
  SchemeInputs in;
  in.channels = scenario.channels;
  in.feed = scenario.feed;
  in.coupling = scenario.total_coupling();
  in.hdma_m = scenario.hdma.m;
  in.uniform_level = config.uniform_level;
  in.p_bs = config.p_bs;
  in.p_rhs = config.p_rhs;
  in.eta = config.eta;
  return in;
}

}  // namespace rhsbf

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rhsbf/channel.hpp"
#include "rhsbf/hologram_qp.hpp"
#include "rhsbf/rhs_operator.hpp"
#include "rhsbf/types.hpp"
#include "rhsbf/wmmse.hpp"

namespace rhsbf {

/// Everything the BCD loop needs. coupling is the truth used for every
/// reported metric; design_coupling is what the optimizer believes.
struct Scenario {
  ChannelSet channels;
  std::vector<CMat> feed;             // F_u, N x L
  std::vector<CMat> coupling;         // true Xi_u
  std::vector<CMat> design_coupling;  // Xi_u seen by the design
  RVec initial_m;
  std::optional<PrecoderSet> initial_precoders;
  double p_bs = 10.0;
  double p_rhs = 50.0;
  double eta = 1.0;

  void validate() const;
};

struct SolverOptions {
  int max_iter = 100;
  double stop_threshold = 1e-4;
  double step_size = 0.05;
  int inner_iter = 50;
  double bisection_tol = 1e-8;
  HologramUpdate variant = HologramUpdate::freeze;
  bool monotone_safeguard = true;
  bool optimize_hologram = true;
  bool enforce_rhs_power = true;
  double spectral_margin = kDefaultSpectralMargin;
  int max_safeguard_halvings = 20;
  /// Run all max_iter iterations regardless of the stop rule.
  bool ignore_stop_rule = false;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double sum_rate_bps = 0.0;
  double sum_se = 0.0;
  double J = 0.0;         // true coupling
  double J_design = 0.0;  // design coupling
  double rhs_power = 0.0; // true coupling
  double bs_power = 0.0;
  double lambda = 0.0;
  double kkt_residual = 0.0;  // lambda * |P(lambda) - P_BS|
  double step_norm = 0.0;
  int backtracks = 0;     // inner halvings + safeguard halvings
  int safeguard_halvings = 0;
  bool restored = false;
  double wall_ms = 0.0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  bool initial_restoration = false;
};

struct SolverResult {
  RVec m;
  PrecoderSet precoders;
  SolverTrace trace;
};

/// Algorithm 1: (g, w) -> V -> m block updates until the relative change of
/// the design objective falls below stop_threshold or max_iter is reached.
SolverResult bcd_solve(const Scenario& scenario, const SolverOptions& options);

struct Evaluation {
  double sum_rate_bps = 0.0;
  double sum_se = 0.0;
  double J = 0.0;
  double rhs_power = 0.0;
  double bs_power = 0.0;
};

/// Metrics of (m, V) under the given coupling.
Evaluation evaluate(const ChannelSet& channels, std::span<const CMat> coupling,
                    std::span<const CMat> feed, const RVec& m, const PrecoderSet& precoders,
                    double eta, double spectral_margin = kDefaultSpectralMargin);

}  // namespace rhsbf

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rhsbf/rhs_operator.hpp"
#include "rhsbf/solver.hpp"
#include "rhsbf/wmmse.hpp"

namespace rhsbf {

enum class SchemeTag {
  ca_joint,
  cu_joint,
  ca_joint_jac,
  holo_wmmse,
  uniform_wmmse,
  holo_zf,
  uniform_zf,
};

enum class HologramMode { fixed_hdma, fixed_uniform, optimized };
enum class PrecoderMode { wmmse, zf };

struct Scheme {
  SchemeTag tag;
  bool design_uses_true_coupling;
  HologramMode hologram;
  PrecoderMode precoder;
  HologramUpdate variant;
};

Scheme scheme_of(SchemeTag tag);
/// "CA-Joint", "Holo+ZF", ...
std::string_view scheme_name(SchemeTag tag);
std::optional<SchemeTag> parse_scheme(std::string_view name);
std::vector<SchemeTag> all_schemes();

/// Subband-wise pseudo-inverse with every column at power P_BS / (U K).
PrecoderSet zf_precoders(std::span<const CMat> hbar, double p_bs);

HologramState uniform_hologram(int num_elements, double level);

/// Scenario pieces shared by all schemes. coupling is the truth.
struct SchemeInputs {
  ChannelSet channels;
  std::vector<CMat> feed;
  std::vector<CMat> coupling;
  RVec hdma_m;
  double uniform_level = 0.5;
  double p_bs = 10.0;
  double p_rhs = 50.0;
  double eta = 1.0;
  std::optional<PrecoderSet> initial_precoders;
};

struct SchemeResult {
  SchemeTag tag;
  RVec m;
  PrecoderSet precoders;
  SolverTrace trace;
  Evaluation final;  // true coupling
};

SchemeResult run_scheme(SchemeTag tag, const SchemeInputs& inputs, const SolverOptions& options);

}  // namespace rhsbf

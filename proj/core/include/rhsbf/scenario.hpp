#pragma once

#include <cstdint>
#include <vector>

#include "rhsbf/baselines.hpp"
#include "rhsbf/channel.hpp"
#include "rhsbf/config.hpp"
#include "rhsbf/em_coupling.hpp"
#include "rhsbf/rhs_operator.hpp"

namespace rhsbf {

/// Physical scenario derived from a config and a seed.
struct BuiltScenario {
  MediumParams medium;
  ArrayGeometry geometry;
  SubbandPlan plan{};
  std::vector<UserLocation> users{};
  ChannelSet channels{};
  std::vector<CouplingMatrix> coupling{};
  std::vector<CMat> feed{};
  HologramState hdma{};

  std::vector<CMat> total_coupling() const;
  std::vector<CMat> fs_coupling() const;
};

CouplingConfig coupling_config(const SystemConfig& config);

/// Seeds drive user jitter and random HDMA weights only; with both disabled
/// the result does not depend on the seed.
BuiltScenario build_scenario(const SystemConfig& config, std::uint64_t seed);

SchemeInputs scheme_inputs(const BuiltScenario& scenario, const SystemConfig& config);

}  // namespace rhsbf

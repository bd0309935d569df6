#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rhsbf/config.hpp"

namespace rhsbf {

struct CheckResult {
  std::string module;
  std::string invariant;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

enum class InjectedFault { none, jacobian_sign };

struct ValidationOptions {
  std::uint64_t seed = 1;
  InjectedFault fault = InjectedFault::none;
};

/// Invariant checks of every module on the configured scenario plus small
/// random instances: Green's field structure, FS reciprocity, array-response
/// norm, operator residual and fixed point, Jacobian vs finite differences,
/// Neumann order, WMMSE identity, KKT slackness, PSD assemblies, power form.
std::vector<CheckResult> run_validation(const SystemConfig& config,
                                        const ValidationOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

/// module,invariant,observed,bound,result
void write_validation_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace rhsbf

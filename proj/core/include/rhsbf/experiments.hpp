#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rhsbf/baselines.hpp"
#include "rhsbf/config.hpp"

namespace rhsbf {

/// Stable short label for a library exception ("ill_conditioned", ...).
std::string failure_kind(const std::exception& e);

struct RunRecord {
  SchemeTag scheme;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::optional<SchemeResult> result;
  std::string status = "ok";  // or a failure_kind
  std::string error;
  double wall_ms = 0.0;
};

/// One record per (scheme, seed), ordered scheme-major as listed in the config.
std::vector<RunRecord> run_convergence(const SystemConfig& config);

/// iter,scheme,seed,sum_rate_bps,sum_se_bpshz,J,rhs_power_w,lambda,backtracks,wall_ms,status,config_hash
/// wall_ms is written as 0 unless timing is set so that repeated runs are byte-identical.
void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records, bool timing);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  SchemeTag scheme;
  std::optional<std::uint64_t> seed;  // empty for the seed-averaged row
  double sum_rate_bps = 0.0;
  double sum_se = 0.0;
  double J_final = 0.0;
  double rhs_power = 0.0;
  std::string status = "ok";
  double wall_ms = 0.0;
  std::size_t mem_bytes = 0;
};

/// Applies one axis value to a copy of the config. Axes: pbs, xi_fs, rhs_size.
SystemConfig apply_axis(const SystemConfig& config, const std::string& axis, double value);

/// Raw per-seed rows followed by the mean row, grouped by (value, scheme) in
/// grid order. Cells run on a bounded worker pool; row order never depends on
/// completion order.
std::vector<SweepRow> run_sweep(const SystemConfig& config, const std::string& axis,
                                const std::vector<double>& values);

/// axis,value,scheme,seed,sum_rate_bps,sum_se_bpshz,J_final,rhs_power_w,status,wall_ms,mem_bytes,config_hash
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& config_hash, bool timing);

/// Rough working-set estimate of one solver instance in bytes.
std::size_t estimate_memory_bytes(int n, int l, int k, int u);

struct PatternOptions {
  int subband = -1;                 // -1 selects the middle subband
  std::optional<SchemeTag> scheme;  // use the scheme's final state instead of HDMA + matched filter
  std::optional<int> stream;        // excite one user's stream instead of their sum
  double start_deg = 0.0;
  double stop_deg = 180.0;
  double step_deg = 1.0;
  std::uint64_t seed = 1;
};

struct PatternRow {
  double angle_deg = 0.0;
  std::string model;  // none, fs, fs_sw
  double gain_db = 0.0;
};

/// Far-field cut of p = M_u(m) q for the uncoupled, FS-only and FS+SW operators.
std::vector<PatternRow> export_pattern(const SystemConfig& config, const PatternOptions& options);

void write_pattern_csv(std::ostream& out, const std::vector<PatternRow>& rows,
                       const std::string& config_hash);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace rhsbf

#include "rhsbf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "rhsbf/csv.hpp"
#include "rhsbf/errors.hpp"
#include "rhsbf/scenario.hpp"

namespace rhsbf {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string failure_kind(const std::exception& e) {
  if (dynamic_cast<const IllConditionedCoupling*>(&e)) return "ill_conditioned";
  if (dynamic_cast<const RankDeficiency*>(&e)) return "rank_deficient";
  if (dynamic_cast<const NumericFailure*>(&e)) return "numeric_failure";
  if (dynamic_cast<const SingularityError*>(&e)) return "singular";
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  return "error";
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<RunRecord> run_convergence(const SystemConfig& config) {
  config.validate();
  const std::string hash = config_hash(config);
  std::vector<RunRecord> records;
  for (SchemeTag tag : config.schemes) {
    for (std::uint64_t seed : config.seeds) {
      RunRecord rec;
      rec.scheme = tag;
      rec.seed = seed;
      rec.config_hash = hash;
      records.push_back(std::move(rec));
    }
  }
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    RunRecord& rec = records[i];
    const auto start = clock_type::now();
    try {
      const BuiltScenario scenario = build_scenario(config, rec.seed);
      rec.result = run_scheme(rec.scheme, scheme_inputs(scenario, config), config.solver);
    } catch (const Error& e) {
      rec.status = failure_kind(e);
      rec.error = e.what();
    }
    rec.wall_ms = elapsed_ms(start);
  });
  return records;
}

void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records, bool timing) {
  write_csv_row(out, {"iter", "scheme", "seed", "sum_rate_bps", "sum_se_bpshz", "J", "rhs_power_w",
                      "lambda", "backtracks", "wall_ms", "status", "config_hash"});
  for (const RunRecord& rec : records) {
    const std::string scheme(scheme_name(rec.scheme));
    const std::string seed = std::to_string(rec.seed);
    if (!rec.result) {
      write_csv_row(out, {"0", scheme, seed, "nan", "nan", "nan", "nan", "nan", "0",
                          format_number(timing ? rec.wall_ms : 0.0), rec.status, rec.config_hash});
      continue;
    }
    for (const IterationRecord& it : rec.result->trace.records) {
      write_csv_row(out, {std::to_string(it.iter), scheme, seed, format_number(it.sum_rate_bps),
                          format_number(it.sum_se), format_number(it.J),
                          format_number(it.rhs_power), format_number(it.lambda),
                          std::to_string(it.backtracks),
                          format_number(timing ? it.wall_ms : 0.0), rec.status, rec.config_hash});
    }
  }
}

SystemConfig apply_axis(const SystemConfig& config, const std::string& axis, double value) {
  SystemConfig c = config;
  if (axis == "pbs") {
    c.p_bs = value;
  } else if (axis == "xi_fs") {
    c.xi_fs = value;
  } else if (axis == "rhs_size") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError("values", "rhs_size values must be integers >= 1");
    }
    c.N = static_cast<int>(value);
  } else {
    throw ConfigError("axis", "unknown axis '" + axis + "' (expected pbs, xi_fs or rhs_size)");
  }
  c.validate();
  return c;
}

std::size_t estimate_memory_bytes(int n, int l, int k, int u) {
  const auto nn = static_cast<std::size_t>(n);
  const auto per_subband = 16 * (3 * nn * nn + 4 * nn * static_cast<std::size_t>(l) +
                                 2 * nn * static_cast<std::size_t>(k));
  return static_cast<std::size_t>(u) * per_subband + 8 * (2 * nn * nn + 4 * nn);
}

std::vector<SweepRow> run_sweep(const SystemConfig& config, const std::string& axis,
                                const std::vector<double>& values) {
  std::vector<SystemConfig> cell_configs;
  cell_configs.reserve(values.size());
  for (double v : values) cell_configs.push_back(apply_axis(config, axis, v));

  const std::size_t num_schemes = config.schemes.size();
  const std::size_t num_seeds = config.seeds.size();
  std::vector<SweepRow> raw(values.size() * num_schemes * num_seeds);
  parallel_for(raw.size(), config.threads, [&](std::size_t i) {
    const std::size_t vi = i / (num_schemes * num_seeds);
    const std::size_t si = (i / num_seeds) % num_schemes;
    const std::size_t ri = i % num_seeds;
    const SystemConfig& c = cell_configs[vi];
    SweepRow& row = raw[i];
    row.axis = axis;
    row.value = values[vi];
    row.scheme = config.schemes[si];
    row.seed = config.seeds[ri];
    row.mem_bytes = estimate_memory_bytes(c.N, c.L, c.K(), c.U);
    const auto start = clock_type::now();
    try {
      const BuiltScenario scenario = build_scenario(c, *row.seed);
      const SchemeResult res = run_scheme(row.scheme, scheme_inputs(scenario, c), c.solver);
      row.sum_rate_bps = res.final.sum_rate_bps;
      row.sum_se = res.final.sum_se;
      row.J_final = res.final.J;
      row.rhs_power = res.final.rhs_power;
    } catch (const Error& e) {
      row.status = failure_kind(e);
      row.sum_rate_bps = row.sum_se = row.J_final = row.rhs_power = kNaN;
    }
    row.wall_ms = elapsed_ms(start);
  });

  std::vector<SweepRow> rows;
  rows.reserve(raw.size() + values.size() * num_schemes);
  for (std::size_t group = 0; group < values.size() * num_schemes; ++group) {
    SweepRow mean = raw[group * num_seeds];
    mean.seed.reset();
    mean.sum_rate_bps = mean.sum_se = mean.J_final = mean.rhs_power = mean.wall_ms = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < num_seeds; ++r) {
      const SweepRow& row = raw[group * num_seeds + r];
      rows.push_back(row);
      mean.wall_ms += row.wall_ms / static_cast<double>(num_seeds);
      if (row.status != "ok") continue;
      ++ok;
      mean.sum_rate_bps += row.sum_rate_bps;
      mean.sum_se += row.sum_se;
      mean.J_final += row.J_final;
      mean.rhs_power += row.rhs_power;
    }
    if (ok == 0) {
      mean.status = "failed";
      mean.sum_rate_bps = mean.sum_se = mean.J_final = mean.rhs_power = kNaN;
    } else {
      const auto n = static_cast<double>(ok);
      mean.sum_rate_bps /= n;
      mean.sum_se /= n;
      mean.J_final /= n;
      mean.rhs_power /= n;
      mean.status = ok == num_seeds ? "ok"
                                    : "partial(" + std::to_string(ok) + "/" +
                                          std::to_string(num_seeds) + ")";
    }
    rows.push_back(mean);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& config_hash, bool timing) {
  write_csv_row(out, {"axis", "value", "scheme", "seed", "sum_rate_bps", "sum_se_bpshz", "J_final",
                      "rhs_power_w", "status", "wall_ms", "mem_bytes", "config_hash"});
  for (const SweepRow& row : rows) {
    write_csv_row(out, {row.axis, format_number(row.value), std::string(scheme_name(row.scheme)),
                        row.seed ? std::to_string(*row.seed) : "mean",
                        format_number(row.sum_rate_bps), format_number(row.sum_se),
                        format_number(row.J_final), format_number(row.rhs_power), row.status,
                        format_number(timing ? row.wall_ms : 0.0), std::to_string(row.mem_bytes),
                        config_hash});
  }
}

std::vector<PatternRow> export_pattern(const SystemConfig& config, const PatternOptions& options) {
  const BuiltScenario scenario = build_scenario(config, options.seed);
  const int subband = options.subband < 0 ? (config.U - 1) / 2 : options.subband;
  if (subband >= config.U) throw ConfigError("subband", "must be < U");
  if (options.stream && (*options.stream < 0 || *options.stream >= config.K())) {
    throw ConfigError("stream", "must index a user");
  }
  if (!(options.step_deg > 0.0) || !(options.stop_deg >= options.start_deg)) {
    throw ConfigError("grid", "need step > 0 and stop >= start");
  }

  const SchemeInputs inputs = scheme_inputs(scenario, config);
  RVec m;
  PrecoderSet precoders;
  if (options.scheme) {
    const SchemeResult res = run_scheme(*options.scheme, inputs, config.solver);
    m = res.m;
    precoders = res.precoders;
  } else {
    m = scenario.hdma.m;
    const auto ops = coupled_operators(m, inputs.coupling, inputs.feed, config.solver.spectral_margin);
    precoders = matched_filter_precoders(effective_channels(scenario.channels, ops), config.p_bs);
  }
  const auto u = static_cast<std::size_t>(subband);
  const CMat& v = precoders.V[u];
  const CVec q = options.stream ? CVec(v.col(*options.stream)) : CVec(v.rowwise().sum());

  const auto grid = azimuth_cut(options.start_deg, options.stop_deg, options.step_deg);
  const CouplingMatrix& cm = scenario.coupling[u];
  const std::vector<std::pair<std::string, CMat>> models{
      {"none", CMat::Zero(cm.total.rows(), cm.total.cols())},
      {"fs", cm.fs},
      {"fs_sw", cm.total},
  };
  std::vector<PatternRow> rows;
  for (const auto& [name, xi] : models) {
    const CoupledOperator op =
        coupled_operator(m, xi, scenario.feed[u], config.solver.spectral_margin);
    const CVec p = op.M * q;
    const auto gains =
        far_field_pattern(p, scenario.geometry, scenario.plan.centers[u], scenario.medium, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows.push_back({rad2deg(grid[i].phi), name, gains[i]});
    }
  }
  return rows;
}

void write_pattern_csv(std::ostream& out, const std::vector<PatternRow>& rows,
                       const std::string& config_hash) {
  write_csv_row(out, {"angle_deg", "model", "gain_db", "config_hash"});
  for (const PatternRow& row : rows) {
    write_csv_row(out, {format_number(row.angle_deg), row.model, format_number(row.gain_db),
                        config_hash});
  }
}

}  // namespace rhsbf

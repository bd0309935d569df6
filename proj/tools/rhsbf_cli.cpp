// rhsbf command-line front end: run, sweep, validate, pattern.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhsbf/config.hpp"
#include "rhsbf/errors.hpp"
#include "rhsbf/experiments.hpp"
#include "rhsbf/validation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string schemes;
  int threads = -1;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_schemes) {
  cmd->add_option("--config", args.config_path, "JSON config (defaults when omitted)");
  cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "override the config seed list with one seed");
  if (with_schemes) {
    cmd->add_option("--schemes", args.schemes, "comma-separated scheme tags, e.g. CA-Joint,Holo+ZF");
  }
  cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

rhsbf::SystemConfig resolve_config(const CommonArgs& args) {
  rhsbf::SystemConfig config =
      args.config_path.empty() ? rhsbf::parse_config("{}") : rhsbf::load_config(args.config_path);
  if (args.seed) config.seeds = {*args.seed};
  if (!args.schemes.empty()) {
    config.schemes.clear();
    for (const auto& name : split(args.schemes)) {
      const auto tag = rhsbf::parse_scheme(name);
      if (!tag) throw rhsbf::ConfigError("schemes", "unknown scheme '" + name + "'");
      config.schemes.push_back(*tag);
    }
  }
  if (args.threads >= 0) config.threads = args.threads;
  config.validate();
  return config;
}

fs::path prepare_out(const CommonArgs& args, const std::string& file) {
  fs::create_directories(args.out_dir);
  return fs::path(args.out_dir) / file;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rhsbf::ConfigError("out", "cannot write " + path.string());
  return out;
}

int cmd_run(const CommonArgs& args) {
  const auto config = resolve_config(args);
  const auto records = rhsbf::run_convergence(config);
  const fs::path path = prepare_out(args, "run.csv");
  auto out = open_out(path);
  rhsbf::write_run_csv(out, records, args.timing);

  int code = kExitOk;
  for (const auto& rec : records) {
    const std::string name(rhsbf::scheme_name(rec.scheme));
    if (!rec.result) {
      std::cerr << name << " seed " << rec.seed << ": " << rec.status << ": " << rec.error << '\n';
      code = kExitNumeric;
      continue;
    }
    std::cout << name << " seed " << rec.seed << ": sum SE " << rec.result->final.sum_se
              << " bit/s/Hz, J " << rec.result->final.J << ", RHS power "
              << rec.result->final.rhs_power << " W, " << rec.result->trace.records.size() - 1
              << " iterations\n";
  }
  std::cout << "wrote " << path.string() << '\n';
  return code;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::string& values_text) {
  const auto config = resolve_config(args);
  std::vector<double> values;
  if (values_text.empty()) {
    const auto it = config.sweep.find(axis);
    if (it == config.sweep.end()) throw rhsbf::ConfigError("axis", "no default grid for " + axis);
    values = it->second;
  } else {
    for (const auto& item : split(values_text)) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw rhsbf::ConfigError("values", "not a number: '" + item + "'");
      }
    }
  }
  const auto rows = rhsbf::run_sweep(config, axis, values);
  const fs::path path = prepare_out(args, "sweep_" + axis + ".csv");
  auto out = open_out(path);
  rhsbf::write_sweep_csv(out, rows, rhsbf::config_hash(config), args.timing);
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (row.seed && row.status != "ok") ++failed;
  }
  std::cout << "wrote " << path.string() << " (" << rows.size() << " rows, " << failed
            << " failed cells)\n";
  return kExitOk;
}

int cmd_validate(const CommonArgs& args, const std::string& fault) {
  const auto config = resolve_config(args);
  rhsbf::ValidationOptions options;
  options.seed = config.seeds.front();
  if (fault == "jacobian-sign") {
    options.fault = rhsbf::InjectedFault::jacobian_sign;
  } else if (!fault.empty()) {
    throw rhsbf::ConfigError("inject-fault", "unknown fault '" + fault + "'");
  }
  const auto results = rhsbf::run_validation(config, options);
  const fs::path path = prepare_out(args, "validate.csv");
  auto out = open_out(path);
  rhsbf::write_validation_report(out, results);
  for (const auto& r : results) {
    std::cout << (r.pass ? "pass " : "FAIL ") << r.module << '/' << r.invariant << ": observed "
              << r.observed << " bound " << r.bound << '\n';
  }
  const bool ok = rhsbf::all_passed(results);
  std::cout << (ok ? "all checks passed" : "validation FAILED") << '\n';
  return ok ? kExitOk : kExitValidation;
}

int cmd_pattern(const CommonArgs& args, const std::string& scheme, int subband,
                std::optional<int> stream, double step) {
  const auto config = resolve_config(args);
  rhsbf::PatternOptions options;
  options.seed = config.seeds.front();
  options.subband = subband;
  options.stream = stream;
  options.step_deg = step;
  if (!scheme.empty()) {
    options.scheme = rhsbf::parse_scheme(scheme);
    if (!options.scheme) throw rhsbf::ConfigError("scheme", "unknown scheme '" + scheme + "'");
  }
  const auto rows = rhsbf::export_pattern(config, options);
  const fs::path path = prepare_out(args, "pattern.csv");
  auto out = open_out(path);
  rhsbf::write_pattern_csv(out, rows, rhsbf::config_hash(config));
  std::cout << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupling-aware wideband RHS beamforming: WMMSE-BCD solver and experiments"};
  app.require_subcommand(1);

  CommonArgs run_args;
  auto* run = app.add_subcommand("run", "convergence traces for each scheme");
  add_common(run, run_args, true);
  run->add_flag("--timing", run_args.timing, "write measured wall_ms instead of 0");

  CommonArgs sweep_args;
  std::string axis = "pbs";
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "final metrics over a parameter grid");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--axis", axis, "pbs | xi_fs | rhs_size")->capture_default_str();
  sweep->add_option("--values", values, "comma-separated grid (config default when omitted)");
  sweep->add_flag("--timing", sweep_args.timing, "write measured wall_ms instead of 0");

  CommonArgs validate_args;
  std::string fault;
  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate, validate_args, false);
  validate->add_option("--inject-fault", fault, "test hook: jacobian-sign");

  CommonArgs pattern_args;
  std::string scheme;
  int subband = -1;
  std::optional<int> stream;
  double step = 1.0;
  auto* pattern = app.add_subcommand("pattern", "far-field cut for none / fs / fs_sw coupling");
  add_common(pattern, pattern_args, false);
  pattern->add_option("--scheme", scheme, "use this scheme's optimized state");
  pattern->add_option("--subband", subband, "subband index (default: middle)");
  pattern->add_option("--stream", stream, "excite a single user stream");
  pattern->add_option("--step", step, "angle step in degrees")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args, axis, values);
    if (*validate) return cmd_validate(validate_args, fault);
    if (*pattern) return cmd_pattern(pattern_args, scheme, subband, stream, step);
  } catch (const rhsbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rhsbf::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rhsbf::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

#include "rhsbf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "rhsbf/errors.hpp"

namespace rhsbf {

using nlohmann::json;

namespace {

template <class T>
T read(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

cplx read_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {read<double>(j, field), 0.0};
  if (j.is_array() && j.size() == 2) return {read<double>(j[0], field), read<double>(j[1], field)};
  throw ConfigError(field, "expected a number or [re, im]");
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void parse_solver(const json& j, SolverOptions& s) {
  require(j.is_object(), "solver", "expected an object");
  const std::map<std::string, std::function<void(const json&)>> handlers{
      {"max_iter", [&](const json& v) { s.max_iter = read<int>(v, "solver.max_iter"); }},
      {"stop_threshold",
       [&](const json& v) { s.stop_threshold = read<double>(v, "solver.stop_threshold"); }},
      {"step_size", [&](const json& v) { s.step_size = read<double>(v, "solver.step_size"); }},
      {"inner_iter", [&](const json& v) { s.inner_iter = read<int>(v, "solver.inner_iter"); }},
      {"bisection_tol",
       [&](const json& v) { s.bisection_tol = read<double>(v, "solver.bisection_tol"); }},
      {"monotone_safeguard",
       [&](const json& v) { s.monotone_safeguard = read<bool>(v, "solver.monotone_safeguard"); }},
      {"enforce_rhs_power",
       [&](const json& v) { s.enforce_rhs_power = read<bool>(v, "solver.enforce_rhs_power"); }},
      {"spectral_margin",
       [&](const json& v) { s.spectral_margin = read<double>(v, "solver.spectral_margin"); }},
      {"max_safeguard_halvings",
       [&](const json& v) {
         s.max_safeguard_halvings = read<int>(v, "solver.max_safeguard_halvings");
       }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = handlers.find(key);
    require(it != handlers.end(), "solver." + key, "unknown key");
    it->second(value);
  }
}

}  // namespace

void SystemConfig::validate() const {
  try {
    medium.validate();
  } catch (const Error& e) {
    throw ConfigError("medium", e.what());
  }
  require(f_c > 0.0, "f_c", "must be positive");
  require(B > 0.0, "B", "must be positive");
  require(U >= 1, "U", "must be >= 1");
  require(f_c > B / 2.0, "f_c", "must exceed B/2");
  require(N >= 1, "N", "must be >= 1");
  require(d > 0.0, "d", "must be positive");
  require(L >= 1, "L", "must be >= 1");
  require(feeder_spacing > 0.0, "feeder_spacing", "must be positive");
  require(std::abs(orientation.norm() - 1.0) <= 1e-12, "orientation", "must be a unit vector");
  require(n_eff >= 1.0, "n_eff", "must be >= 1");
  require(!user_r.empty(), "user_r", "at least one user is required");
  require(user_theta_deg.size() == user_r.size(), "user_theta_deg",
          "must have one angle per user distance");
  for (double r : user_r) require(r > 0.0, "user_r", "distances must be positive");
  require(kappa_abs >= 0.0, "kappa_abs", "must be >= 0");
  require(sigma2 > 0.0, "sigma2", "must be positive (w = 1/e needs e > 0)");
  require(p_bs > 0.0, "p_bs", "must be positive");
  for (double p : p_bs_list) require(p > 0.0, "p_bs_list", "entries must be positive");
  require(p_rhs > 0.0, "p_rhs", "must be positive");
  require(eta > 0.0, "eta", "must be positive");
  require(xi_fs >= 0.0, "xi_fs", "must be >= 0");
  require(xi_wg >= 0.0, "xi_wg", "must be >= 0");
  require(alpha_wg >= 0.0, "alpha_wg", "must be >= 0");
  require(uniform_level >= 0.0 && uniform_level <= 1.0, "uniform_level", "must lie in [0,1]");

  require(solver.max_iter >= 0, "solver.max_iter", "must be >= 0");
  require(solver.inner_iter >= 0, "solver.inner_iter", "must be >= 0");
  require(solver.stop_threshold > 0.0, "solver.stop_threshold", "must be positive");
  require(solver.step_size > 0.0, "solver.step_size", "must be positive");
  require(solver.bisection_tol > 0.0, "solver.bisection_tol", "must be positive");
  require(solver.spectral_margin > 0.0 && solver.spectral_margin < 1.0, "solver.spectral_margin",
          "must lie in (0,1)");
  require(solver.max_safeguard_halvings >= 0, "solver.max_safeguard_halvings", "must be >= 0");

  require(!schemes.empty(), "schemes", "at least one scheme is required");
  require(!seeds.empty(), "seeds", "at least one seed is required");
  for (SchemeTag tag : schemes) {
    if (scheme_of(tag).precoder == PrecoderMode::zf) {
      require(K() <= L, "K", "ZF schemes require K <= L");
    }
  }
  require(user_jitter_r >= 0.0, "user_jitter_r", "must be >= 0");
  require(user_jitter_theta_deg >= 0.0, "user_jitter_theta_deg", "must be >= 0");
  require(threads >= 0, "threads", "must be >= 0");
  for (const auto& [axis, values] : sweep) {
    require(axis == "pbs" || axis == "xi_fs" || axis == "rhs_size", "sweep." + axis,
            "unknown axis");
    for (double v : values) {
      if (axis == "rhs_size") {
        require(v >= 1.0 && v == std::floor(v), "sweep.rhs_size", "values must be integers >= 1");
      } else {
        require(v >= 0.0, "sweep." + axis, "values must be >= 0");
      }
      if (axis == "pbs") require(v > 0.0, "sweep.pbs", "values must be positive");
    }
  }
}

SystemConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  if (j.is_null()) j = json::object();
  require(j.is_object(), "", "top level must be a JSON object");

  SystemConfig c;
  const std::map<std::string, std::function<void(const json&)>> handlers{
      {"f_c", [&](const json& v) { c.f_c = read<double>(v, "f_c"); }},
      {"B", [&](const json& v) { c.B = read<double>(v, "B"); }},
      {"U", [&](const json& v) { c.U = read<int>(v, "U"); }},
      {"mu", [&](const json& v) { c.medium.mu = read<double>(v, "mu"); }},
      {"eps", [&](const json& v) { c.medium.eps = read<double>(v, "eps"); }},
      {"c0", [&](const json& v) { c.medium.c0 = read<double>(v, "c0"); }},
      {"N", [&](const json& v) { c.N = read<int>(v, "N"); }},
      {"d", [&](const json& v) { c.d = read<double>(v, "d"); }},
      {"L", [&](const json& v) { c.L = read<int>(v, "L"); }},
      {"feeder_spacing", [&](const json& v) { c.feeder_spacing = read<double>(v, "feeder_spacing"); }},
      {"orientation",
       [&](const json& v) {
         const auto e = read<std::vector<double>>(v, "orientation");
         require(e.size() == 3, "orientation", "expected three components");
         c.orientation = Vec3(e[0], e[1], e[2]);
       }},
      {"n_eff", [&](const json& v) { c.n_eff = read<double>(v, "n_eff"); }},
      {"user_r", [&](const json& v) { c.user_r = read<std::vector<double>>(v, "user_r"); }},
      {"user_theta_deg",
       [&](const json& v) { c.user_theta_deg = read<std::vector<double>>(v, "user_theta_deg"); }},
      {"kappa_abs", [&](const json& v) { c.kappa_abs = read<double>(v, "kappa_abs"); }},
      {"sigma2", [&](const json& v) { c.sigma2 = read<double>(v, "sigma2"); }},
      {"channel_model",
       [&](const json& v) {
         const auto s = read<std::string>(v, "channel_model");
         if (s == "common_amplitude") {
           c.channel_model = ChannelModel::common_amplitude;
         } else if (s == "exact_spherical") {
           c.channel_model = ChannelModel::exact_spherical;
         } else {
           throw ConfigError("channel_model", "expected common_amplitude or exact_spherical");
         }
       }},
      {"p_bs", [&](const json& v) { c.p_bs = read<double>(v, "p_bs"); }},
      {"p_bs_list", [&](const json& v) { c.p_bs_list = read<std::vector<double>>(v, "p_bs_list"); }},
      {"p_rhs", [&](const json& v) { c.p_rhs = read<double>(v, "p_rhs"); }},
      {"eta", [&](const json& v) { c.eta = read<double>(v, "eta"); }},
      {"xi_fs", [&](const json& v) { c.xi_fs = read<double>(v, "xi_fs"); }},
      {"xi_wg", [&](const json& v) { c.xi_wg = read<double>(v, "xi_wg"); }},
      {"alpha_wg", [&](const json& v) { c.alpha_wg = read<double>(v, "alpha_wg"); }},
      {"beta_wg", [&](const json& v) { c.beta_wg = read<double>(v, "beta_wg"); }},
      {"rho_plus", [&](const json& v) { c.rho_plus = read_complex(v, "rho_plus"); }},
      {"rho_minus", [&](const json& v) { c.rho_minus = read_complex(v, "rho_minus"); }},
      {"wg_physical_distance",
       [&](const json& v) { c.wg_physical_distance = read<bool>(v, "wg_physical_distance"); }},
      {"uniform_level", [&](const json& v) { c.uniform_level = read<double>(v, "uniform_level"); }},
      {"solver", [&](const json& v) { parse_solver(v, c.solver); }},
      {"schemes",
       [&](const json& v) {
         c.schemes.clear();
         for (const auto& name : read<std::vector<std::string>>(v, "schemes")) {
           const auto tag = parse_scheme(name);
           require(tag.has_value(), "schemes", "unknown scheme '" + name + "'");
           c.schemes.push_back(*tag);
         }
       }},
      {"seeds", [&](const json& v) { c.seeds = read<std::vector<std::uint64_t>>(v, "seeds"); }},
      {"user_jitter_r", [&](const json& v) { c.user_jitter_r = read<double>(v, "user_jitter_r"); }},
      {"user_jitter_theta_deg",
       [&](const json& v) { c.user_jitter_theta_deg = read<double>(v, "user_jitter_theta_deg"); }},
      {"random_hdma_weights",
       [&](const json& v) { c.random_hdma_weights = read<bool>(v, "random_hdma_weights"); }},
      {"sweep",
       [&](const json& v) {
         require(v.is_object(), "sweep", "expected an object of axis grids");
         for (const auto& [axis, values] : v.items()) {
           c.sweep[axis] = read<std::vector<double>>(values, "sweep." + axis);
         }
       }},
      {"threads", [&](const json& v) { c.threads = read<int>(v, "threads"); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = handlers.find(key);
    require(it != handlers.end(), key, "unknown key");
    it->second(value);
  }
  c.validate();
  return c;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const SystemConfig& c) {
  json j;
  j["f_c"] = c.f_c;
  j["B"] = c.B;
  j["U"] = c.U;
  j["mu"] = c.medium.mu;
  j["eps"] = c.medium.eps;
  j["c0"] = c.medium.c0;
  j["N"] = c.N;
  j["d"] = c.d;
  j["L"] = c.L;
  j["feeder_spacing"] = c.feeder_spacing;
  j["orientation"] = {c.orientation.x(), c.orientation.y(), c.orientation.z()};
  j["n_eff"] = c.n_eff;
  j["user_r"] = c.user_r;
  j["user_theta_deg"] = c.user_theta_deg;
  j["kappa_abs"] = c.kappa_abs;
  j["sigma2"] = c.sigma2;
  j["channel_model"] =
      c.channel_model == ChannelModel::common_amplitude ? "common_amplitude" : "exact_spherical";
  j["p_bs"] = c.p_bs;
  j["p_bs_list"] = c.p_bs_list;
  j["p_rhs"] = c.p_rhs;
  j["eta"] = c.eta;
  j["xi_fs"] = c.xi_fs;
  j["xi_wg"] = c.xi_wg;
  j["alpha_wg"] = c.alpha_wg;
  j["beta_wg"] = c.beta_wg;
  j["rho_plus"] = {c.rho_plus.real(), c.rho_plus.imag()};
  j["rho_minus"] = {c.rho_minus.real(), c.rho_minus.imag()};
  j["wg_physical_distance"] = c.wg_physical_distance;
  j["uniform_level"] = c.uniform_level;
  j["solver"] = {
      {"max_iter", c.solver.max_iter},
      {"stop_threshold", c.solver.stop_threshold},
      {"step_size", c.solver.step_size},
      {"inner_iter", c.solver.inner_iter},
      {"bisection_tol", c.solver.bisection_tol},
      {"monotone_safeguard", c.solver.monotone_safeguard},
      {"enforce_rhs_power", c.solver.enforce_rhs_power},
      {"spectral_margin", c.solver.spectral_margin},
      {"max_safeguard_halvings", c.solver.max_safeguard_halvings},
  };
  json schemes = json::array();
  for (SchemeTag tag : c.schemes) schemes.push_back(std::string(scheme_name(tag)));
  j["schemes"] = schemes;
  j["seeds"] = c.seeds;
  j["user_jitter_r"] = c.user_jitter_r;
  j["user_jitter_theta_deg"] = c.user_jitter_theta_deg;
  j["random_hdma_weights"] = c.random_hdma_weights;
  j["sweep"] = c.sweep;
  // threads does not change results and stays out of the hash
  return j.dump();
}

std::string config_hash(const SystemConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rhsbf

#include "rhsbf/baselines.hpp"

#include <array>
#include <cmath>

#include "rhsbf/errors.hpp"

namespace rhsbf {

namespace {

struct NamedScheme {
  SchemeTag tag;
  std::string_view name;
};

constexpr std::array<NamedScheme, 7> kSchemes{{
    {SchemeTag::ca_joint, "CA-Joint"},
    {SchemeTag::cu_joint, "CU-Joint"},
    {SchemeTag::ca_joint_jac, "CA-Joint-Jac"},
    {SchemeTag::holo_wmmse, "Holo+WMMSE"},
    {SchemeTag::uniform_wmmse, "Uniform+WMMSE"},
    {SchemeTag::holo_zf, "Holo+ZF"},
    {SchemeTag::uniform_zf, "Uniform+ZF"},
}};

}  // namespace

Scheme scheme_of(SchemeTag tag) {
  switch (tag) {
    case SchemeTag::ca_joint:
      return {tag, true, HologramMode::optimized, PrecoderMode::wmmse, HologramUpdate::freeze};
    case SchemeTag::cu_joint:
      return {tag, false, HologramMode::optimized, PrecoderMode::wmmse, HologramUpdate::freeze};
    case SchemeTag::ca_joint_jac:
      return {tag, true, HologramMode::optimized, PrecoderMode::wmmse, HologramUpdate::jacobian};
    case SchemeTag::holo_wmmse:
      return {tag, true, HologramMode::fixed_hdma, PrecoderMode::wmmse, HologramUpdate::freeze};
    case SchemeTag::uniform_wmmse:
      return {tag, true, HologramMode::fixed_uniform, PrecoderMode::wmmse, HologramUpdate::freeze};
    case SchemeTag::holo_zf:
      return {tag, true, HologramMode::fixed_hdma, PrecoderMode::zf, HologramUpdate::freeze};
    case SchemeTag::uniform_zf:
      return {tag, true, HologramMode::fixed_uniform, PrecoderMode::zf, HologramUpdate::freeze};
  }
  throw InvalidArgument("unknown scheme tag");
}

std::string_view scheme_name(SchemeTag tag) {
  for (const auto& s : kSchemes) {
    if (s.tag == tag) return s.name;
  }
  return "?";
}

std::optional<SchemeTag> parse_scheme(std::string_view name) {
  for (const auto& s : kSchemes) {
    if (s.name == name) return s.tag;
  }
  return std::nullopt;
}

std::vector<SchemeTag> all_schemes() {
  std::vector<SchemeTag> out;
  for (const auto& s : kSchemes) out.push_back(s.tag);
  return out;
}

PrecoderSet zf_precoders(std::span<const CMat> hbar, double p_bs) {
  if (!(p_bs > 0.0)) throw InvalidArgument("zf_precoders: P_BS must be positive");
  if (hbar.empty()) return {};
  const Eigen::Index num_users = hbar[0].rows();
  const double column_power = p_bs / (static_cast<double>(hbar.size()) * num_users);
  std::vector<CMat> v;
  v.reserve(hbar.size());
  for (const CMat& h : hbar) {
    if (h.rows() > h.cols()) {
      throw RankDeficiency("zf_precoders: more users than feeders");
    }
    const RVec sv = h.jacobiSvd().singularValues();
    if (sv.size() == 0 || !(sv.minCoeff() > 1e-10 * sv.maxCoeff())) {
      throw RankDeficiency("zf_precoders: effective channel is rank deficient");
    }
    // h^H = Q R  =>  pinv(h) = Q R^{-H}
    const CMat ht = h.adjoint();
    Eigen::HouseholderQR<CMat> qr(ht);
    const CMat q = qr.householderQ() * CMat::Identity(ht.rows(), ht.cols());
    const CMat r = qr.matrixQR().topRows(ht.cols()).triangularView<Eigen::Upper>();
    const CMat r_inv_h =
        r.adjoint().triangularView<Eigen::Lower>().solve(CMat::Identity(r.rows(), r.cols()));
    CMat vu = q * r_inv_h;
    for (Eigen::Index k = 0; k < vu.cols(); ++k) {
      vu.col(k) *= std::sqrt(column_power) / vu.col(k).norm();
    }
    v.push_back(std::move(vu));
  }
  return PrecoderSet::from(std::move(v));
}

HologramState uniform_hologram(int num_elements, double level) {
  if (num_elements < 1) throw InvalidArgument("uniform_hologram: N must be >= 1");
  if (!(level >= 0.0 && level <= 1.0)) {
    throw InvalidArgument("uniform_hologram: level must lie in [0,1]");
  }
  HologramState state;
  state.m = RVec::Constant(num_elements, level);
  return state;
}

SchemeResult run_scheme(SchemeTag tag, const SchemeInputs& inputs, const SolverOptions& options) {
  const Scheme scheme = scheme_of(tag);
  const int n = inputs.channels.num_elements();

  Scenario scenario;
  scenario.channels = inputs.channels;
  scenario.feed = inputs.feed;
  scenario.coupling = inputs.coupling;
  if (scheme.design_uses_true_coupling) {
    scenario.design_coupling = inputs.coupling;
  } else {
    for (const CMat& xi : inputs.coupling) {
      scenario.design_coupling.push_back(CMat::Zero(xi.rows(), xi.cols()));
    }
  }
  scenario.initial_m = scheme.hologram == HologramMode::fixed_uniform
                           ? uniform_hologram(n, inputs.uniform_level).m
                           : inputs.hdma_m;
  scenario.initial_precoders = inputs.initial_precoders;
  scenario.p_bs = inputs.p_bs;
  scenario.p_rhs = inputs.p_rhs;
  scenario.eta = inputs.eta;

  SchemeResult result;
  result.tag = tag;

  if (scheme.precoder == PrecoderMode::zf) {
    scenario.validate();
    options.validate();
    const auto ops = coupled_operators(scenario.initial_m, scenario.coupling, scenario.feed,
                                       options.spectral_margin);
    const auto hbar = effective_channels(scenario.channels, ops);
    result.m = scenario.initial_m;
    result.precoders = zf_precoders(hbar, scenario.p_bs);
    result.final = evaluate(scenario.channels, scenario.coupling, scenario.feed, result.m,
                            result.precoders, scenario.eta, options.spectral_margin);
    // One-shot design: the trace holds the same point at every iteration.
    for (int t = 0; t <= options.max_iter; ++t) {
      IterationRecord rec;
      rec.iter = t;
      rec.sum_rate_bps = result.final.sum_rate_bps;
      rec.sum_se = result.final.sum_se;
      rec.J = result.final.J;
      rec.J_design = result.final.J;
      rec.rhs_power = result.final.rhs_power;
      rec.bs_power = result.final.bs_power;
      result.trace.records.push_back(rec);
    }
    result.trace.converged = true;
    return result;
  }

  SolverOptions opts = options;
  opts.variant = scheme.variant;
  opts.optimize_hologram = scheme.hologram == HologramMode::optimized;
  SolverResult solved = bcd_solve(scenario, opts);
  result.m = std::move(solved.m);
  result.precoders = std::move(solved.precoders);
  result.trace = std::move(solved.trace);
  result.final = evaluate(scenario.channels, scenario.coupling, scenario.feed, result.m,
                          result.precoders, scenario.eta, options.spectral_margin);
  return result;
}

}  // namespace rhsbf

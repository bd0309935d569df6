#include "rhsbf/solver.hpp"

#include <chrono>
#include <cmath>

#include "rhsbf/errors.hpp"

namespace rhsbf {

void Scenario::validate() const {
  const auto subbands = static_cast<std::size_t>(channels.num_subbands());
  if (feed.size() != subbands || coupling.size() != subbands ||
      design_coupling.size() != subbands) {
    throw InvalidArgument("scenario: feed/coupling lists must have one entry per subband");
  }
  if (initial_m.size() != channels.num_elements()) {
    throw InvalidArgument("scenario: initial hologram length differs from N");
  }
  if ((initial_m.array() < 0.0).any() || (initial_m.array() > 1.0).any()) {
    throw InvalidArgument("scenario: initial hologram outside [0,1]");
  }
  if (!(p_bs > 0.0) || !(p_rhs > 0.0) || !(eta > 0.0)) {
    throw InvalidArgument("scenario: P_BS, P_RHS and eta must be positive");
  }
}

void SolverOptions::validate() const {
  if (max_iter < 1 || inner_iter < 1) {
    throw InvalidArgument("solver options: max_iter and inner_iter must be >= 1");
  }
  if (max_safeguard_halvings < 0) {
    throw InvalidArgument("solver options: max_safeguard_halvings must be >= 0");
  }
  if (!(stop_threshold > 0.0) || !(step_size > 0.0) || !(bisection_tol > 0.0)) {
    throw InvalidArgument("solver options: thresholds and step size must be positive");
  }
  if (!(spectral_margin > 0.0 && spectral_margin < 1.0)) {
    throw InvalidArgument("solver options: spectral margin must lie in (0,1)");
  }
}

Evaluation evaluate(const ChannelSet& channels, std::span<const CMat> coupling,
                    std::span<const CMat> feed, const RVec& m, const PrecoderSet& precoders,
                    double eta, double spectral_margin) {
  const auto ops = coupled_operators(m, coupling, feed, spectral_margin);
  const auto hbar = effective_channels(channels, ops);
  const Objectives obj =
      objectives(sinr_effective(hbar, channels, precoders), channels.plan.subband_width);
  std::vector<CMat> ms;
  ms.reserve(ops.size());
  for (const auto& op : ops) ms.push_back(op.M);
  Evaluation ev;
  ev.sum_rate_bps = obj.sum_rate_bps;
  ev.sum_se = obj.sum_se;
  ev.J = obj.J;
  ev.rhs_power = rhs_power(ms, precoders.V, eta);
  ev.bs_power = precoders.total_power;
  return ev;
}

namespace {

std::vector<CMat> operator_mats(const std::vector<CoupledOperator>& ops) {
  std::vector<CMat> ms;
  ms.reserve(ops.size());
  for (const auto& op : ops) ms.push_back(op.M);
  return ms;
}

PrecoderSet blend(const PrecoderSet& from, const PrecoderSet& to, double alpha) {
  std::vector<CMat> v;
  v.reserve(from.V.size());
  for (std::size_t u = 0; u < from.V.size(); ++u) v.push_back(from.V[u] + alpha * (to.V[u] - from.V[u]));
  return PrecoderSet::from(std::move(v));
}

class Loop {
 public:
  Loop(const Scenario& s, const SolverOptions& o) : s_(s), o_(o) {}

  std::vector<CoupledOperator> design_ops(const RVec& m) const {
    return coupled_operators(m, s_.design_coupling, s_.feed, o_.spectral_margin);
  }

  double design_power(const RVec& m, const PrecoderSet& v) const {
    return rhs_power(operator_mats(design_ops(m)), v.V, s_.eta);
  }

  Evaluation design_eval(const RVec& m, const PrecoderSet& v) const {
    return evaluate(s_.channels, s_.design_coupling, s_.feed, m, v, s_.eta, o_.spectral_margin);
  }

  Evaluation true_eval(const RVec& m, const PrecoderSet& v) const {
    return evaluate(s_.channels, s_.coupling, s_.feed, m, v, s_.eta, o_.spectral_margin);
  }

  // Largest s in [0,1] with design power of s*m within budget.
  RVec restore(const RVec& m, const PrecoderSet& v) const {
    if (design_power(m, v) <= s_.p_rhs) return m;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (design_power(mid * m, v) <= s_.p_rhs) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo * m;
  }

  IterationRecord record(int iter, const RVec& m, const PrecoderSet& v) const {
    const Evaluation truth = true_eval(m, v);
    IterationRecord rec;
    rec.iter = iter;
    rec.sum_rate_bps = truth.sum_rate_bps;
    rec.sum_se = truth.sum_se;
    rec.J = truth.J;
    rec.rhs_power = truth.rhs_power;
    rec.bs_power = truth.bs_power;
    rec.J_design = design_eval(m, v).J;
    return rec;
  }

 private:
  const Scenario& s_;
  const SolverOptions& o_;
};

}  // namespace

SolverResult bcd_solve(const Scenario& scenario, const SolverOptions& options) {
  scenario.validate();
  options.validate();
  using clock = std::chrono::steady_clock;
  const Loop loop(scenario, options);
  const ChannelSet& ch = scenario.channels;
  const bool joint = options.optimize_hologram;
  const bool enforce = joint && options.enforce_rhs_power;

  SolverResult result;
  RVec m = scenario.initial_m;
  PrecoderSet v;
  if (scenario.initial_precoders) {
    v = *scenario.initial_precoders;
    v.refresh_power();
  } else {
    const auto hbar = effective_channels(ch, loop.design_ops(m));
    v = matched_filter_precoders(hbar, scenario.p_bs);
  }
  if (enforce && v.total_power > 0.0) {
    const RVec restored = loop.restore(m, v);
    result.trace.initial_restoration = restored != m;
    m = restored;
  }
  result.trace.records.push_back(loop.record(0, m, v));

  // V = 0 is a fixed point of the WMMSE map (g = 0 gives B = 0); restart
  // from matched filters so the iterations can make progress.
  if (v.total_power == 0.0) {
    const auto hbar = effective_channels(ch, loop.design_ops(m));
    v = matched_filter_precoders(hbar, scenario.p_bs);
    if (enforce) {
      const RVec restored = loop.restore(m, v);
      result.trace.initial_restoration = result.trace.initial_restoration || restored != m;
      m = restored;
    }
  }

  double j_prev = result.trace.records.back().J_design;
  for (int t = 1; t <= options.max_iter; ++t) {
    const auto start = clock::now();
    IterationRecord extra;

    const auto ops = loop.design_ops(m);
    const auto hbar = effective_channels(ch, ops);
    const EqualizerState eq = mmse_update_effective(hbar, ch, v);
    const PrecoderUpdate upd =
        precoder_update(precoder_qp_assemble_effective(hbar, eq), scenario.p_bs, options.bisection_tol);
    extra.lambda = upd.lambda;
    extra.kkt_residual = upd.lambda * std::abs(upd.precoders.total_power - scenario.p_bs);

    PrecoderSet v_new = upd.precoders;
    if (enforce) {
      const auto ms = operator_mats(ops);
      if (rhs_power(ms, v_new.V, scenario.eta) > scenario.p_rhs) {
        // Convex combination keeps the WMSE descent and the BS budget; v is
        // feasible for the RHS budget at m by induction.
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (rhs_power(ms, blend(v, v_new, mid).V, scenario.eta) <= scenario.p_rhs) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        v_new = blend(v, v_new, lo);
      }
    }

    if (joint) {
      const EqualizerState eq_m = mmse_update_effective(hbar, ch, v_new);
      HologramQP qp;
      if (options.variant == HologramUpdate::freeze) {
        qp = hologram_qp_freeze_assemble(ch, ops, scenario.feed, eq_m, v_new);
      } else {
        std::vector<SurrogateOperator> anchor;
        anchor.reserve(ops.size());
        for (std::size_t u = 0; u < ops.size(); ++u) {
          anchor.push_back(make_surrogate(ops[u], scenario.design_coupling[u], scenario.feed[u]));
        }
        qp = hologram_qcqp_jacobian_assemble(ch, anchor, eq_m, v_new);
      }
      HologramStepOptions step_opts;
      step_opts.step_size = options.step_size;
      step_opts.max_iter = options.inner_iter;
      step_opts.enforce_power = enforce;
      const HologramStepResult step = hologram_step(qp, m, scenario.p_rhs, scenario.eta, step_opts);
      extra.backtracks = step.backtracks;
      extra.restored = step.restored;

      RVec candidate = step.m;
      if (options.monotone_safeguard) {
        const double j_ref = objectives(sinr_effective(hbar, ch, v_new), ch.plan.subband_width).J;
        bool accepted = false;
        for (int h = 0; h <= options.max_safeguard_halvings; ++h) {
          try {
            const Evaluation ev = loop.design_eval(candidate, v_new);
            accepted = ev.J <= j_ref && (!enforce || ev.rhs_power <= scenario.p_rhs);
          } catch (const IllConditionedCoupling&) {
            accepted = false;
          }
          if (accepted) break;
          if (h == options.max_safeguard_halvings) break;
          candidate = m + 0.5 * (candidate - m);
          ++extra.safeguard_halvings;
        }
        if (!accepted) candidate = m;
      }
      extra.step_norm = (candidate - m).norm();
      m = candidate;
    }
    v = std::move(v_new);

    IterationRecord rec = loop.record(t, m, v);
    rec.lambda = extra.lambda;
    rec.kkt_residual = extra.kkt_residual;
    rec.step_norm = extra.step_norm;
    rec.safeguard_halvings = extra.safeguard_halvings;
    rec.backtracks = extra.backtracks + extra.safeguard_halvings;
    rec.restored = extra.restored;
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    result.trace.records.push_back(rec);

    const double change = std::abs(rec.J_design - j_prev) / std::max(1.0, std::abs(rec.J_design));
    j_prev = rec.J_design;
    if (change < options.stop_threshold) {
      result.trace.converged = true;
      if (!options.ignore_stop_rule) break;
    }
  }

  result.m = std::move(m);
  result.precoders = std::move(v);
  return result;
}

}  // namespace rhsbf

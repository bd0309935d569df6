#include "rhsbf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rhsbf/csv.hpp"
#include "rhsbf/hologram_qp.hpp"
#include "rhsbf/scenario.hpp"

namespace rhsbf {

namespace {

class Checks {
 public:
  void add(std::string module, std::string invariant, double observed, double bound) {
    const bool pass = std::isfinite(observed) && observed <= bound;
    results_.push_back({std::move(module), std::move(invariant), observed, bound, pass});
  }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::vector<CheckResult> results_;
};

double min_eig_ratio(const RMat& a) {
  const RVec eig = Eigen::SelfAdjointEigenSolver<RMat>(a, Eigen::EigenvaluesOnly).eigenvalues();
  const double norm = eig.cwiseAbs().maxCoeff();
  if (norm == 0.0) return 0.0;
  return std::max(0.0, -eig.minCoeff() / norm);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

CMat random_cmat(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> g;
  CMat a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = scale * cplx(g(rng), g(rng));
  return a;
}

void green_checks(Checks& checks, std::mt19937_64& rng, const MediumParams& medium) {
  std::uniform_real_distribution<double> pos(-0.05, 0.05);
  std::uniform_real_distribution<double> freq(1e9, 1e11);
  double transverse = 0.0;
  double axial = 0.0;
  double broadside = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec3 src(pos(rng), pos(rng), pos(rng));
    Vec3 obs(pos(rng), pos(rng), pos(rng));
    if ((obs - src).norm() < 1e-4) obs += Vec3(1e-3, 0.0, 0.0);
    const Vec3 e = random_unit(rng);
    const auto terms = green_field_terms(src, obs, e, freq(rng), medium);
    const Vec3 r_hat = (obs - src).normalized();
    transverse = std::max(transverse,
                          std::abs(terms.radiating.dot(r_hat.cast<cplx>())) / terms.radiating.norm());

    axial = std::max(axial, (dipole_angular_factor(r_hat, r_hat) - 2.0 * r_hat).norm());
    const Vec3 perp = r_hat.unitOrthogonal();
    broadside = std::max(broadside, (dipole_angular_factor(r_hat, perp) + perp).norm());
  }
  checks.add("em_coupling", "green_transversality", transverse, 1e-12);
  checks.add("em_coupling", "angular_factor_axial", axial, 1e-12);
  checks.add("em_coupling", "angular_factor_broadside", broadside, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_validation(const SystemConfig& config,
                                        const ValidationOptions& options) {
  config.validate();
  Checks checks;
  std::mt19937_64 rng(options.seed);
  const BuiltScenario s = build_scenario(config, options.seed);
  const int n = config.N;
  const int mid = (config.U - 1) / 2;
  const auto u_mid = static_cast<std::size_t>(mid);

  green_checks(checks, rng, s.medium);

  {
    const CMat fs = coupling_fs(s.geometry, config.f_c, s.medium);
    const double norm = fs.norm();
    checks.add("em_coupling", "fs_reciprocity",
               norm == 0.0 ? 0.0 : (fs - fs.transpose()).norm() / norm, 1e-12);
    double diag = 0.0;
    for (const auto& c : s.coupling) diag = std::max(diag, c.total.diagonal().cwiseAbs().maxCoeff());
    checks.add("em_coupling", "zero_diagonal", diag, 0.0);
  }

  {
    double worst = 0.0;
    for (const auto& user : s.users) {
      for (double f : s.plan.centers) {
        worst = std::max(worst, std::abs(array_response(s.geometry, user.psi, user.nu, f, s.medium).norm() - 1.0));
      }
    }
    checks.add("channel", "array_response_unit_norm", worst, 1e-12);
  }

  const RVec& m = s.hdma.m;
  const auto xi = s.total_coupling();
  const auto ops = coupled_operators(m, xi, s.feed, config.solver.spectral_margin);

  {
    double residual = 0.0;
    double fixed_point = 0.0;
    for (std::size_t u = 0; u < ops.size(); ++u) {
      const CMat sys = CMat::Identity(n, n) - m.cast<cplx>().asDiagonal() * xi[u];
      residual = std::max(residual, (sys * ops[u].C - CMat::Identity(n, n)).norm() / std::sqrt(n));
      const CVec q = random_cmat(rng, config.L, 1);
      const CVec p = ops[u].M * q;
      const CVec rhs = m.cast<cplx>().asDiagonal() * (s.feed[u] * q + xi[u] * p);
      fixed_point = std::max(fixed_point, (p - rhs).norm() / std::max(p.norm(), 1e-300));
    }
    checks.add("rhs_operator", "inverse_residual_per_sqrtN", residual, 1e-8);
    checks.add("rhs_operator", "fixed_point_identity", fixed_point, 1e-8);
  }

  {
    const double h = 1e-6;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      CMat analytic = operator_jacobian(ops[u_mid], xi[u_mid], s.feed[u_mid], j);
      if (options.fault == InjectedFault::jacobian_sign) analytic = -analytic;
      RVec mp = m;
      RVec mm = m;
      mp(j) += h;
      mm(j) -= h;
      const CMat fd = (coupled_operator(mp, xi[u_mid], s.feed[u_mid]).M -
                       coupled_operator(mm, xi[u_mid], s.feed[u_mid]).M) /
                      (2.0 * h);
      worst = std::max(worst, (fd - analytic).norm() / std::max(analytic.norm(), 1e-300));
    }
    checks.add("rhs_operator", "jacobian_vs_central_difference", worst, 1e-6);
  }

  {
    // First-order Neumann error at xi and xi/2 should shrink by about 4.
    const CMat dm = m.cast<cplx>().asDiagonal();
    auto neumann_error = [&](double scale) {
      const CMat x = scale * xi[u_mid];
      const CMat exact = coupled_operator(m, x, s.feed[u_mid]).M;
      const CMat approx = (CMat::Identity(n, n) + dm * x) * dm * s.feed[u_mid];
      return (exact - approx).norm();
    };
    const double e1 = neumann_error(1.0);
    const double e2 = neumann_error(0.5);
    checks.add("rhs_operator", "neumann_order_ratio_minus_4",
               e2 > 0.0 ? std::abs(e1 / e2 - 4.0) : 0.0, 0.5);

    const SurrogateOperator sur = make_surrogate(ops[u_mid], xi[u_mid], s.feed[u_mid]);
    std::normal_distribution<double> g;
    RVec dir(n);
    for (int j = 0; j < n; ++j) dir(j) = g(rng);
    dir *= 1e-2 / dir.norm();
    auto surrogate_error = [&](const RVec& dmv) {
      return (coupled_operator(m + dmv, xi[u_mid], s.feed[u_mid]).M - surrogate_operator(sur, dmv)).norm();
    };
    const double s1 = surrogate_error(dir);
    const double s2 = surrogate_error(0.5 * dir);
    checks.add("rhs_operator", "surrogate_order_ratio_minus_4",
               s2 > 0.0 ? std::abs(s1 / s2 - 4.0) : 0.0, 0.5);
  }

  {
    double worst = 0.0;
    std::uniform_int_distribution<int> dim(1, 4);
    std::uniform_real_distribution<double> log_scale(-3.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k_users = dim(rng);
      const int feeders = std::max(k_users, dim(rng));
      const CMat hbar = random_cmat(rng, k_users, feeders);
      const CMat v = random_cmat(rng, feeders, k_users, std::pow(10.0, log_scale(rng)));
      const double sigma2 = std::pow(10.0, log_scale(rng));
      const CMat z = hbar * v;
      for (int k = 0; k < k_users; ++k) {
        const double total = z.row(k).squaredNorm() + sigma2;
        const double gamma = std::norm(z(k, k)) / (total - std::norm(z(k, k)));
        const cplx g_opt = z(k, k) / total;
        const double e = link_mse(hbar, k, v, sigma2, g_opt);
        const double w = 1.0 / e;
        worst = std::max(worst, std::abs((w * e - std::log(w)) - (1.0 - std::log1p(gamma))));
      }
    }
    checks.add("wmmse_solver", "wmmse_identity", worst, 1e-10);
  }

  const auto hbar = effective_channels(s.channels, ops);
  const PrecoderSet mf = matched_filter_precoders(hbar, config.p_bs);
  const EqualizerState eq = mmse_update_effective(hbar, s.channels, mf);
  {
    const PrecoderUpdate upd =
        precoder_update(precoder_qp_assemble_effective(hbar, eq), config.p_bs, config.solver.bisection_tol);
    const double p = upd.precoders.total_power;
    checks.add("wmmse_solver", "kkt_complementary_slackness",
               upd.lambda * std::abs(p - config.p_bs) / (config.p_bs * std::max(1.0, upd.lambda)), 1e-6);
    checks.add("wmmse_solver", "bs_power_budget", p / config.p_bs - 1.0, 1e-6);
  }

  {
    const HologramQP freeze = hologram_qp_freeze_assemble(s.channels, ops, s.feed, eq, mf);
    std::vector<SurrogateOperator> anchor;
    for (std::size_t u = 0; u < ops.size(); ++u) anchor.push_back(make_surrogate(ops[u], xi[u], s.feed[u]));
    const HologramQP jac = hologram_qcqp_jacobian_assemble(s.channels, anchor, eq, mf);
    double worst_r = 0.0;
    for (const auto& r : freeze.R) worst_r = std::max(worst_r, min_eig_ratio(r));
    for (const auto& r : jac.R) worst_r = std::max(worst_r, min_eig_ratio(r));
    checks.add("wmmse_solver", "psd_Q", std::max(min_eig_ratio(freeze.Q), min_eig_ratio(jac.Q)), 1e-9);
    checks.add("wmmse_solver", "psd_R", worst_r, 1e-9);

    double power_form = 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      RVec mr(n);
      for (int j = 0; j < n; ++j) mr(j) = unit(rng);
      for (std::size_t u = 0; u < ops.size(); ++u) {
        const double model = mr.dot(freeze.R[u] * mr);
        const double direct = (ops[u].C * mr.cast<cplx>().asDiagonal() * s.feed[u] * mf.V[u]).squaredNorm();
        power_form = std::max(power_form, std::abs(model - direct) / std::max(direct, 1e-300));
      }
    }
    checks.add("wmmse_solver", "power_form_oracle", power_form, 1e-9);

    std::vector<CMat> ms;
    for (const auto& op : ops) ms.push_back(op.M);
    const double actual = rhs_power(ms, mf.V, config.eta);
    const double model = config.eta * jac.model_power(RVec::Zero(n));
    checks.add("wmmse_solver", "jacobian_power_model_at_anchor", std::abs(model - actual) / actual, 1e-9);
  }

  return checks.take();
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

void write_validation_report(std::ostream& out, const std::vector<CheckResult>& results) {
  write_csv_row(out, {"module", "invariant", "observed", "bound", "result"});
  for (const auto& r : results) {
    write_csv_row(out, {r.module, r.invariant, format_number(r.observed), format_number(r.bound),
                        r.pass ? "pass" : "FAIL"});
  }
}

}  // namespace rhsbf

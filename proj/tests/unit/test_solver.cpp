#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rhsbf/config.hpp"
#include "rhsbf/errors.hpp"
#include "rhsbf/scenario.hpp"
#include "rhsbf/solver.hpp"

using namespace rhsbf;

namespace {

Scenario small_scenario(const std::string& json, bool zero_design = false) {
  const SystemConfig config = parse_config(json);
  const BuiltScenario b = build_scenario(config, 1);
  Scenario s;
  s.channels = b.channels;
  s.feed = b.feed;
  s.coupling = b.total_coupling();
  s.design_coupling = s.coupling;
  if (zero_design) {
    for (auto& x : s.design_coupling) x.setZero();
  }
  s.initial_m = b.hdma.m;
  s.p_bs = config.p_bs;
  s.p_rhs = config.p_rhs;
  s.eta = config.eta;
  return s;
}

void check_duality(const SolverTrace& trace, int ku) {
  for (const auto& r : trace.records) {
    CHECK(std::abs(r.J - (ku - std::log(2.0) * r.sum_se)) <= 1e-9 * std::max(1.0, std::abs(r.J)));
  }
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("options and scenario validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.max_iter = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = SolverOptions{};
  o.step_size = -1.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  Scenario s = small_scenario(R"({"N":8,"U":2})");
  s.p_bs = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("single-user optimum without coupling") {
  const Scenario s0 = small_scenario(R"({"N":16,"U":1,"user_r":[3.0],"user_theta_deg":[80.0],
                                        "xi_fs":0.0,"xi_wg":0.0,"sigma2":1e-8})");
  SolverOptions opt;
  opt.optimize_hologram = false;
  const auto res = bcd_solve(s0, opt);
  CHECK(res.trace.records.size() <= 4);
  const CMat M = s0.initial_m.cast<cplx>().asDiagonal() * s0.feed[0];
  const double hbar2 = (s0.channels.rows[0][0] * M).squaredNorm();
  const double bg = s0.channels.plan.subband_width;
  const double expect = bg * std::log2(1.0 + s0.p_bs * hbar2 / 1e-8);
  CHECK(std::abs(res.trace.records.back().sum_rate_bps - expect) <= 1e-6 * expect);
  CHECK(res.precoders.total_power == doctest::Approx(s0.p_bs).epsilon(1e-8));
  CHECK((res.m - s0.initial_m).norm() == 0.0);
}

TEST_CASE("zero initial precoders") {
  Scenario s = small_scenario(R"({"N":8,"U":2,"sigma2":1e-8})");
  std::vector<CMat> zero(2, CMat::Zero(4, 4));
  s.initial_precoders = PrecoderSet::from(zero);
  SolverOptions opt;
  opt.max_iter = 5;
  const auto res = bcd_solve(s, opt);
  REQUIRE(res.trace.records.size() >= 2);
  CHECK(res.trace.records[0].sum_rate_bps == 0.0);
  CHECK(res.trace.records[0].J == 8.0);
  CHECK(res.trace.records[1].sum_rate_bps > 0.0);
}

TEST_CASE("monotone descent and constraints") {
  const Scenario s = small_scenario(R"({"N":12,"U":2,"sigma2":1e-8,"xi_fs":0.05})");
  for (auto variant : {HologramUpdate::freeze, HologramUpdate::jacobian}) {
    SolverOptions opt;
    opt.variant = variant;
    opt.max_iter = 30;
    const auto res = bcd_solve(s, opt);
    const auto& rec = res.trace.records;
    for (std::size_t i = 1; i < rec.size(); ++i) {
      CHECK(rec[i].J_design <= rec[i - 1].J_design + 1e-9);
      CHECK(rec[i].bs_power <= s.p_bs * (1 + 1e-6));
      CHECK(rec[i].rhs_power <= s.p_rhs * (1 + 1e-6));
      CHECK(rec[i].kkt_residual <= 1e-6 * s.p_bs * std::max(1.0, rec[i].lambda));
      CHECK(rec[i].iter == static_cast<int>(i));
    }
    CHECK(res.m.minCoeff() >= 0.0);
    CHECK(res.m.maxCoeff() <= 1.0);
    CHECK(rec.back().sum_se > rec.front().sum_se);
    check_duality(res.trace, 8);
    if (res.trace.converged) {
      const double a = rec[rec.size() - 2].J_design;
      const double b = rec.back().J_design;
      CHECK(std::abs(a - b) / std::max(1.0, std::abs(b)) < 1e-4);
    }
  }
}

TEST_CASE("variants coincide with the hologram block disabled") {
  const Scenario s = small_scenario(R"({"N":8,"U":2,"sigma2":1e-8,"xi_fs":0.05})");
  SolverOptions a;
  a.optimize_hologram = false;
  a.max_iter = 10;
  SolverOptions b = a;
  b.variant = HologramUpdate::jacobian;
  const auto ra = bcd_solve(s, a);
  const auto rb = bcd_solve(s, b);
  REQUIRE(ra.trace.records.size() == rb.trace.records.size());
  for (std::size_t i = 0; i < ra.trace.records.size(); ++i) {
    CHECK(ra.trace.records[i].J == rb.trace.records[i].J);
  }
  for (int u = 0; u < 2; ++u) CHECK((ra.precoders.V[u] - rb.precoders.V[u]).norm() == 0.0);
}

TEST_CASE("safeguard disabled still runs") {
  const Scenario s = small_scenario(R"({"N":8,"U":2,"sigma2":1e-8})");
  SolverOptions opt;
  opt.monotone_safeguard = false;
  opt.max_iter = 5;
  opt.ignore_stop_rule = true;
  const auto res = bcd_solve(s, opt);
  CHECK(res.trace.records.size() == 6);
}

TEST_CASE("evaluate uses the given coupling") {
  const Scenario s = small_scenario(R"({"N":8,"U":2,"sigma2":1e-8,"xi_fs":0.05})");
  const auto ops = coupled_operators(s.initial_m, s.coupling, s.feed);
  const auto hbar = effective_channels(s.channels, ops);
  const auto v = matched_filter_precoders(hbar, s.p_bs);
  const auto ev = evaluate(s.channels, s.coupling, s.feed, s.initial_m, v, s.eta);
  double p = 0.0;
  for (int u = 0; u < 2; ++u) p += (ops[u].M * v.V[u]).squaredNorm();
  CHECK(ev.rhs_power == doctest::Approx(p).epsilon(1e-12));
  CHECK(ev.bs_power == doctest::Approx(s.p_bs).epsilon(1e-12));
  const auto o = objectives(sinr_effective(hbar, s.channels, v), s.channels.plan.subband_width);
  CHECK(ev.sum_se == doctest::Approx(o.sum_se).epsilon(1e-12));
  std::vector<CMat> none(2, CMat::Zero(8, 8));
  const auto ev0 = evaluate(s.channels, none, s.feed, s.initial_m, v, s.eta);
  CHECK(ev0.sum_se != ev.sum_se);
}

TEST_CASE("ill-conditioned coupling propagates") {
  Scenario s = small_scenario(R"({"N":8,"U":1})");
  for (auto& x : s.coupling) x *= 1e6;
  s.design_coupling = s.coupling;
  CHECK_THROWS_AS(bcd_solve(s, SolverOptions{}), IllConditionedCoupling);
}

}  // TEST_SUITE

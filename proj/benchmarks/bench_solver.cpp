#include <benchmark/benchmark.h>

#include "rhsbf/baselines.hpp"
#include "rhsbf/config.hpp"
#include "rhsbf/hologram_qp.hpp"
#include "rhsbf/scenario.hpp"

namespace {

rhsbf::SystemConfig config_with_n(int n) {
  rhsbf::SystemConfig c;
  c.N = n;
  return c;
}

void BM_CoupledOperator(benchmark::State& state) {
  const auto s = rhsbf::build_scenario(config_with_n(static_cast<int>(state.range(0))), 1);
  const auto xi = s.total_coupling();
  for (auto _ : state) {
    auto op = rhsbf::coupled_operator(s.hdma.m, xi[0], s.feed[0]);
    benchmark::DoNotOptimize(op.M.data());
  }
}
BENCHMARK(BM_CoupledOperator)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_Jacobian(benchmark::State& state) {
  const auto s = rhsbf::build_scenario(config_with_n(static_cast<int>(state.range(0))), 1);
  const auto xi = s.total_coupling();
  const auto op = rhsbf::coupled_operator(s.hdma.m, xi[0], s.feed[0]);
  for (auto _ : state) {
    for (int n = 0; n < s.hdma.m.size(); ++n) {
      auto d = rhsbf::operator_jacobian(op, xi[0], s.feed[0], n);
      benchmark::DoNotOptimize(d.data());
    }
  }
}
BENCHMARK(BM_Jacobian)->Arg(16)->Arg(32)->Arg(64);

void BM_PrecoderUpdate(benchmark::State& state) {
  const auto s = rhsbf::build_scenario(rhsbf::SystemConfig{}, 1);
  const auto ops = rhsbf::coupled_operators(s.hdma.m, s.total_coupling(), s.feed);
  const auto hbar = rhsbf::effective_channels(s.channels, ops);
  const auto v = rhsbf::matched_filter_precoders(hbar, 10.0);
  const auto eq = rhsbf::mmse_update_effective(hbar, s.channels, v);
  const auto qp = rhsbf::precoder_qp_assemble_effective(hbar, eq);
  for (auto _ : state) {
    auto upd = rhsbf::precoder_update(qp, 1e-3);
    benchmark::DoNotOptimize(upd.lambda);
  }
}
BENCHMARK(BM_PrecoderUpdate);

void BM_HologramAssembly(benchmark::State& state) {
  const bool jacobian = state.range(0) != 0;
  const auto s = rhsbf::build_scenario(rhsbf::SystemConfig{}, 1);
  const auto xi = s.total_coupling();
  const auto ops = rhsbf::coupled_operators(s.hdma.m, xi, s.feed);
  const auto hbar = rhsbf::effective_channels(s.channels, ops);
  const auto v = rhsbf::matched_filter_precoders(hbar, 10.0);
  const auto eq = rhsbf::mmse_update_effective(hbar, s.channels, v);
  std::vector<rhsbf::SurrogateOperator> anchor;
  for (std::size_t u = 0; u < ops.size(); ++u) anchor.push_back(rhsbf::make_surrogate(ops[u], xi[u], s.feed[u]));
  for (auto _ : state) {
    auto qp = jacobian ? rhsbf::hologram_qcqp_jacobian_assemble(s.channels, anchor, eq, v)
                       : rhsbf::hologram_qp_freeze_assemble(s.channels, ops, s.feed, eq, v);
    benchmark::DoNotOptimize(qp.Q.data());
  }
}
BENCHMARK(BM_HologramAssembly)->Arg(0)->Arg(1);

void BM_RunScheme(benchmark::State& state) {
  rhsbf::SystemConfig c;
  const auto s = rhsbf::build_scenario(c, 1);
  const auto inputs = rhsbf::scheme_inputs(s, c);
  const auto tag = static_cast<rhsbf::SchemeTag>(state.range(0));
  for (auto _ : state) {
    auto res = rhsbf::run_scheme(tag, inputs, c.solver);
    benchmark::DoNotOptimize(res.final.sum_se);
  }
  state.SetLabel(std::string(rhsbf::scheme_name(tag)));
}
BENCHMARK(BM_RunScheme)
    ->Arg(static_cast<int>(rhsbf::SchemeTag::ca_joint))
    ->Arg(static_cast<int>(rhsbf::SchemeTag::ca_joint_jac))
    ->Arg(static_cast<int>(rhsbf::SchemeTag::holo_wmmse))
    ->Arg(static_cast<int>(rhsbf::SchemeTag::uniform_zf))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

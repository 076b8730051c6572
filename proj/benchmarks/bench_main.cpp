#include "qkdrate/guessing.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/rates.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace qkdrate;

void BM_FidelityBlockDiagonal(benchmark::State& state) {
  const FidelityReference rho(bell_to_matrix(optimal_bell_state(0.03)));
  const Matrix4c tau = PinchedAnsatz{0.97}.state().matrix();
  for (auto _ : state) benchmark::DoNotOptimize(rho.fidelity(tau));
}
BENCHMARK(BM_FidelityBlockDiagonal);

void BM_FidelityDense(benchmark::State& state) {
  Matrix4c a = Matrix4c::Random();
  Matrix4c b = Matrix4c::Random();
  a = a * a.adjoint();
  b = b * b.adjoint();
  const DensityMatrix rho(Matrix4c(a / a.trace().real()));
  const DensityMatrix tau(Matrix4c(b / b.trace().real()));
  for (auto _ : state) benchmark::DoNotOptimize(uhlmann_fidelity(rho, tau));
}
BENCHMARK(BM_FidelityDense);

void BM_OracleRow(benchmark::State& state) {
  const int resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(restricted_pg_oracle(0.03, resolution).pg);
}
BENCHMARK(BM_OracleRow)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const DensityMatrix rho = bell_to_matrix(optimal_bell_state(0.03));
  const DensityMatrix tau = PinchedAnsatz{0.97}.state();
  for (auto _ : state) benchmark::DoNotOptimize(build_certificate(rho, tau).objective);
}
BENCHMARK(BM_Certificate);

void BM_RateEur(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.channel = {0.2, 10.0};
  cfg.observed_qber = 0.03;
  for (auto _ : state) benchmark::DoNotOptimize(rate_eur(cfg).raw_rate);
}
BENCHMARK(BM_RateEur);

void BM_OptimizeF(benchmark::State& state) {
  Environment env;
  env.channel = {0.2, 10.0};
  const ProtocolConfig tmpl = make_config(env, 1e6, 0.03, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_f(Method::FME, tmpl).f_opt);
}
BENCHMARK(BM_OptimizeF)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

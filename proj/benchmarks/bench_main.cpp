#include <benchmark/benchmark.h>

#include <limits>
#include <string>

#include "srcd/cdcore.hpp"
#include "srcd/connection.hpp"
#include "srcd/diffusion.hpp"
#include "srcd/invariants.hpp"
#include "srcd/liealg.hpp"
#include "srcd/spectral.hpp"

namespace {

using namespace srcd;

LieSRStructure frame_of(const char* spec) { return adapted_orthonormal_frame(normalize_vertical(build_example(spec))); }

const char* const kNames[] = {"heisenberg", "su2-double-v2", "sl2c", "free-step2:n=4"};

void BM_Connection(benchmark::State& state) {
  const auto s = frame_of(kNames[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(cd_constants(compute_connection(s)));
  state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_Connection)->DenseRange(0, 3);

void BM_VerifyJets(benchmark::State& state) {
  const auto s = frame_of(kNames[state.range(0)]);
  const auto conn = compute_connection(s);
  const auto k = cd_constants(conn);
  const std::vector<CDCase> cases{{cd_parameters(k, 1.0), 1.0}};
  VerificationOptions opts;
  opts.samples = 10000;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_verification(conn, k, cases, opts));
  state.SetItemsProcessed(state.iterations() * opts.samples);
  state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_VerifyJets)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const auto s = frame_of("sl2c");
  const auto conn = compute_connection(s);
  const auto k = cd_constants(conn);
  const auto params = cd_parameters(k, std::numeric_limits<double>::infinity());
  for (auto _ : state) benchmark::DoNotOptimize(certify_cd(conn, k, params, 1.0));
}
BENCHMARK(BM_Certificate);

void BM_Oracle(benchmark::State& state) {
  const auto s = frame_of("su2-double-v2");
  const auto conn = compute_connection(s);
  const int two_jmax = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(irrep_spectrum_oracle(s, conn, two_jmax));
}
BENCHMARK(BM_Oracle)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_DiffusionSteps(benchmark::State& state) {
  const char* name = state.range(0) == 0 ? "heisenberg" : "su2-hopf";
  const auto s = frame_of(name);
  const auto conn = compute_connection(s);
  SimConfig cfg;
  cfg.t_final = 1.0;
  cfg.steps = 100;
  cfg.paths = 1000;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(s, conn, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.steps * static_cast<std::int64_t>(cfg.paths));
  state.SetLabel(name);
}
BENCHMARK(BM_DiffusionSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "entsplit/entsplit.hpp"

using namespace entsplit;

namespace {

const Splitting& cached(FixtureId id) {
  static std::map<FixtureId, Splitting> cache;
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, fixture(id)).first;
  return it->second;
}

void BM_DetectNumeric(benchmark::State& state) {
  const auto id = static_cast<FixtureId>(state.range(0));
  const Subspace& s = cached(id)[0];
  SearchConfig cfg;
  cfg.use_certificate = false;
  for (auto _ : state) benchmark::DoNotOptimize(detect_product(s, SearchMode::all_parties(), cfg));
  state.SetLabel(std::string(to_string(id)));
}
BENCHMARK(BM_DetectNumeric)
    ->Arg(static_cast<int>(FixtureId::EX1_2x2))
    ->Arg(static_cast<int>(FixtureId::EX2_2x3))
    ->Arg(static_cast<int>(FixtureId::EX4_2x4_MIN))
    ->Arg(static_cast<int>(FixtureId::EX5_3x3))
    ->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const Subspace& s = cached(FixtureId::EX3_2x4_MAX)[0];
  for (auto _ : state) benchmark::DoNotOptimize(certify_2xd_dim2(s));
}
BENCHMARK(BM_Certificate);

void BM_Biseparable(benchmark::State& state) {
  const Subspace& s = cached(FixtureId::EX6_4QUBIT)[0];
  const SearchConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_biseparable(s, cfg));
}
BENCHMARK(BM_Biseparable)->Unit(benchmark::kMillisecond);

void BM_PartialTranspose(benchmark::State& state) {
  const TensorSpace space({2, 2, 2, 2});
  Rng rng(1);
  const Operator rho = Operator::pure(Ket(space, haar_state(space.total_dim(), rng)));
  const Bipartition cut(4, {0, 2});
  for (auto _ : state) benchmark::DoNotOptimize(partial_transpose(rho, cut));
}
BENCHMARK(BM_PartialTranspose);

void BM_CertifyProperty2(benchmark::State& state) {
  const ProjectiveMeasurement m = ProjectiveMeasurement::from_splitting(cached(FixtureId::EX2_2x3));
  Property2Config cfg;
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify_property2(m, cfg, Property2Mode::Bipartite));
}
BENCHMARK(BM_CertifyProperty2)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mlnec/compiler.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/learning.hpp"
#include "mlnec/network.hpp"
#include "mlnec/recognition.hpp"

using namespace mlnec;

namespace {

const KnowledgeBaseSource& kb() {
  static const KnowledgeBaseSource k = parse_kb(bundled_kb_text());
  return k;
}

Narrative walkers(int horizon, std::uint64_t seed = 1) {
  return simulate(R"({"horizon": )" + std::to_string(horizon) +
                      R"(, "fix_initial": true, "annotation": true, "walkers": {}})",
                  kb(), seed);
}

const CompiledKB& compiled(InertiaVariant v) {
  static const CompiledKB hi = compile(kb(), {InertiaVariant::HI, {}});
  static const CompiledKB si = compile(kb(), {InertiaVariant::SI, {}});
  return v == InertiaVariant::HI ? hi : si;
}

void BM_ground(benchmark::State& st) {
  const bool par = st.range(0) != 0;
  Narrative n = walkers(static_cast<int>(st.range(1)));
  for (auto _ : st) {
    GroundNetwork gn = par ? ground(compiled(InertiaVariant::SI), n) : ground_serial(compiled(InertiaVariant::SI), n);
    benchmark::DoNotOptimize(gn.clauses().size());
  }
}
BENCHMARK(BM_ground)->ArgNames({"parallel", "horizon"})->ArgsProduct({{0, 1}, {200, 1000}})->Unit(benchmark::kMillisecond);

void BM_enumeration(benchmark::State& st) {
  const bool par = st.range(0) != 0;
  GroundNetwork gn = ground(compiled(InertiaVariant::SI), walkers(15));
  for (auto _ : st) {
    MarginalTable t = par ? exact_marginals(gn) : exact_marginals_serial(gn);
    benchmark::DoNotOptimize(t.probability.data());
  }
}
BENCHMARK(BM_enumeration)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_mcsat(benchmark::State& st) {
  GroundNetwork gn = ground(compiled(InertiaVariant::SI), walkers(100));
  McSatOptions o;
  o.samples = 2000;
  o.chains = 4;
  o.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(mcsat(gn, o).marginals.data());
}
BENCHMARK(BM_mcsat)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_branch_and_bound(benchmark::State& st) {
  const bool par = st.range(0) != 0;
  GroundNetwork gn = ground(compiled(InertiaVariant::SI), walkers(19));
  for (auto _ : st) {
    MapAssignment m = par ? map_exact(gn) : map_exact_serial(gn);
    benchmark::DoNotOptimize(m.score);
  }
}
BENCHMARK(BM_branch_and_bound)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_local_search(benchmark::State& st) {
  GroundNetwork gn = ground(compiled(InertiaVariant::SI), walkers(200));
  LocalSearchOptions o;
  o.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(map_localsearch(gn, o).score);
}
BENCHMARK(BM_local_search)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_neg_cll(benchmark::State& st) {
  std::vector<TrainingInstance> data;
  for (std::uint64_t s = 1; s <= 8; ++s) {
    Narrative n = walkers(100, s);
    data.push_back(make_instance(ground(compiled(InertiaVariant::SI), n), n));
  }
  LearnOptions o;
  o.parallel = st.range(0) != 0;
  std::vector<double> w = compiled(InertiaVariant::SI).weights;
  for (auto _ : st) benchmark::DoNotOptimize(negative_cll(data, w, o));
}
BENCHMARK(BM_neg_cll)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

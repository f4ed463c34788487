// Serial reference vs OpenMP path for the hot kernels.
// Arg 0 selects the path: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "xspn/cluster.hpp"
#include "xspn/datagen.hpp"
#include "xspn/inference.hpp"
#include "xspn/learner.hpp"
#include "xspn/stats.hpp"

using namespace xspn;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

const BinaryDataset& mevm_data() {
  static const BinaryDataset data = generate_mevm(random_mevm(64, 4, 4, 1), 20000, 2);
  return data;
}

std::vector<VariableId> first_vars(std::size_t n) {
  std::vector<VariableId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<VariableId>(i);
  return v;
}

void BM_PairwiseCounts(benchmark::State& state) {
  const auto& data = mevm_data();
  const auto rows = all_rows(data.rows());
  const auto vars = first_vars(static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_counts(data, rows, vars, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows.size() * vars.size() * (vars.size() - 1) / 2));
}
BENCHMARK(BM_PairwiseCounts)->ArgsProduct({{0, 1}, {16, 64}})->Unit(benchmark::kMillisecond);

void BM_ClusterRows(benchmark::State& state) {
  const auto& data = mevm_data();
  const auto rows = all_rows(data.rows());
  const auto vars = first_vars(32);
  for (auto _ : state) benchmark::DoNotOptimize(cluster_rows(data, rows, vars, 2, 7, {}, mode(state)));
}
BENCHMARK(BM_ClusterRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LogLikelihoods(benchmark::State& state) {
  const auto& data = mevm_data();
  Hyperparams hp;
  hp.min_instances = 500;
  static const Network net = learn(data, hp);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihoods(net, data, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows()));
}
BENCHMARK(BM_LogLikelihoods)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GenerateConstraint(benchmark::State& state) {
  const ConstraintSpec spec{ConstraintKind::exact, 100, 5, 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(generate_constraint(spec, 20000, 3, mode(state)));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_GenerateConstraint)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

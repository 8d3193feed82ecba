// Serial reference kernels against the OpenMP versions. Run with
// OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include "subgcn/adjacency.hpp"
#include "subgcn/aligner.hpp"
#include "subgcn/kg.hpp"
#include "subgcn/matrix.hpp"
#include "subgcn/rng.hpp"
#include "subgcn/sgn.hpp"

using namespace subgcn;

namespace {

DenseMatrix random_dense(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

// Roughly `avg_degree` nonzeros per row, like a normalized KG adjacency.
SparseMatrix random_adjacency(std::size_t n, std::size_t avg_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
    for (std::size_t k = 0; k < avg_degree; ++k)
      t.push_back({i, static_cast<Index>(rng.below(n)), rng.unit()});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

const Dataset& synthetic() {
  static const Dataset d = [] {
    SyntheticSpec s;
    s.n_entities = 3000;
    s.n_rel_triples = 15000;
    return generate_synthetic_pair(s);
  }();
  return d;
}

void BM_spmm(benchmark::State& st) {
  auto a = random_adjacency(static_cast<std::size_t>(st.range(0)), 8, 1);
  auto b = random_dense(a.cols(), 200, 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::spmm(a, b));
}
void BM_spmm_reference(benchmark::State& st) {
  auto a = random_adjacency(static_cast<std::size_t>(st.range(0)), 8, 1);
  auto b = random_dense(a.cols(), 200, 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::spmm(a, b));
}

void BM_matmul(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 3), b = random_dense(200, 200, 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::matmul(a, b));
}
void BM_matmul_reference(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 3), b = random_dense(200, 200, 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::matmul(a, b));
}

// H^T G, the weight-gradient shape.
void BM_matmul_tn(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 5), b = random_dense(n, 200, 6);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::matmul_tn(a, b));
}
void BM_matmul_tn_reference(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 5), b = random_dense(n, 200, 6);
  for (auto _ : st) benchmark::DoNotOptimize(reference::matmul_tn(a, b));
}

// G W^T, the input-gradient shape.
void BM_matmul_nt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 7), b = random_dense(200, 200, 8);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::matmul_nt(a, b));
}
void BM_matmul_nt_reference(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto a = random_dense(n, 200, 7), b = random_dense(200, 200, 8);
  for (auto _ : st) benchmark::DoNotOptimize(reference::matmul_nt(a, b));
}

void BM_build_sgn(benchmark::State& st) {
  auto skel = build_skeleton(synthetic().kg1);
  for (auto _ : st) benchmark::DoNotOptimize(build_sgn(skel));
  st.counters["lines"] = static_cast<double>(skel.edges.size());
}
void BM_build_sgn_reference(benchmark::State& st) {
  auto skel = build_skeleton(synthetic().kg1);
  for (auto _ : st) benchmark::DoNotOptimize(reference::build_sgn(skel));
}

EmbeddingSet bench_embeddings() {
  EmbeddingSet e;
  e.kg1 = {random_dense(1500, 200, 9), random_dense(1500, 100, 10), random_dense(1500, 100, 11)};
  e.kg2 = {random_dense(1500, 200, 12), random_dense(1500, 100, 13), random_dense(1500, 100, 14)};
  return e;
}

std::vector<SeedPair> bench_test_pairs() {
  std::vector<SeedPair> t;
  for (Index i = 0; i < 1000; ++i) t.push_back({i, i});
  return t;
}

void BM_evaluate(benchmark::State& st) {
  auto e = bench_embeddings();
  auto t = bench_test_pairs();
  for (auto _ : st) benchmark::DoNotOptimize(evaluate(t, e, {}));
}
void BM_evaluate_reference(benchmark::State& st) {
  auto e = bench_embeddings();
  auto t = bench_test_pairs();
  for (auto _ : st) benchmark::DoNotOptimize(reference::evaluate(t, e, {}));
}

}  // namespace

BENCHMARK(BM_spmm)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmm_reference)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul_reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul_tn)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul_tn_reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul_nt)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul_nt_reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_sgn)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_sgn_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

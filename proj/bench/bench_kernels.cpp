// Serial reference kernels against the OpenMP kernels, plus one SVT and one
// full ADMM iteration, at the default problem size (24x24, 8 Rx, 8 Tx, 5x5).

#include <benchmark/benchmark.h>

#include <random>

#include "txlr/kernels.hpp"
#include "txlr/sampling.hpp"
#include "txlr/solver.hpp"
#include "txlr/svt.hpp"

using namespace txlr;

namespace {

const LiftShape kShape{24, 24, {5, 5}, 8, 8};

std::vector<cplx> random_values(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(static_cast<std::size_t>(n));
  for (cplx &x : v) x = {g(rng), g(rng)};
  return v;
}

Index kspace_size() { return kShape.nkx * kShape.nky * kShape.channels(); }
Index hankel_size() { return kShape.n1() * kShape.n2() * kShape.channels(); }

template <bool Parallel>
void BM_Lift(benchmark::State &state) {
  const auto k = random_values(kspace_size(), 1);
  std::vector<cplx> h(static_cast<std::size_t>(hankel_size()));
  for (auto _ : state) {
    if constexpr (Parallel) parallel::lift(kShape, k, h);
    else reference::lift(kShape, k, h);
    benchmark::DoNotOptimize(h.data());
  }
}

template <bool Parallel>
void BM_LiftAdjoint(benchmark::State &state) {
  const auto h = random_values(hankel_size(), 2);
  std::vector<cplx> k(static_cast<std::size_t>(kspace_size()));
  for (auto _ : state) {
    if constexpr (Parallel) parallel::lift_adjoint(kShape, h, k, false);
    else reference::lift_adjoint(kShape, h, k, false);
    benchmark::DoNotOptimize(k.data());
  }
}

template <bool Parallel>
void BM_Unfold(benchmark::State &state) {
  const auto u = static_cast<Unfolding>(state.range(0));
  const auto h = random_values(hankel_size(), 3);
  Matrix m(unfolded_rows(u, kShape), unfolded_cols(u, kShape));
  for (auto _ : state) {
    if constexpr (Parallel) parallel::unfold(u, kShape, h, m);
    else reference::unfold(u, kShape, h, m);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Parallel>
void BM_Refold(benchmark::State &state) {
  const auto u = static_cast<Unfolding>(state.range(0));
  const auto v = random_values(hankel_size(), 4);
  const Matrix m = Eigen::Map<const Matrix>(v.data(), unfolded_rows(u, kShape), unfolded_cols(u, kShape));
  std::vector<cplx> h(static_cast<std::size_t>(hankel_size()));
  for (auto _ : state) {
    if constexpr (Parallel) parallel::refold(u, kShape, m, h);
    else reference::refold(u, kShape, m, h);
    benchmark::DoNotOptimize(h.data());
  }
}

template <bool Parallel>
void BM_Combine(benchmark::State &state) {
  const auto d = random_values(kspace_size(), 5);
  const auto c = random_values(kspace_size(), 6);
  const SamplingMask mask = mask_variants_per_tx(24, 24, 4.0, 8, 7);
  std::vector<int> counts(24 * 24, 25);
  std::vector<cplx> z(static_cast<std::size_t>(kspace_size()));
  for (auto _ : state) {
    if constexpr (Parallel) parallel::combine(kShape, d, mask.view(), counts, c, 0.1, 2, z);
    else reference::combine(kShape, d, mask.view(), counts, c, 0.1, 2, z);
    benchmark::DoNotOptimize(z.data());
  }
}

void BM_Svt(benchmark::State &state) {
  const auto u = static_cast<Unfolding>(state.range(0));
  const auto v = random_values(hankel_size(), 8);
  const Matrix m = Eigen::Map<const Matrix>(v.data(), unfolded_rows(u, kShape), unfolded_cols(u, kShape));
  for (auto _ : state) benchmark::DoNotOptimize(svt(m, 50).data());
}

void BM_AdmmIteration(benchmark::State &state) {
  const auto method = static_cast<Method>(state.range(0));
  const auto v = random_values(kspace_size(), 9);
  const KSpaceTensor truth(Dims4{24, 24, 8, 8}, v);
  const SamplingMask mask = mask_variants_per_tx(24, 24, 4.0, 8, 10);
  const KSpaceTensor d = apply_mask(truth, mask);
  SolverConfig cfg = SolverConfig::defaults(method);
  cfg.max_iters = 1;
  for (auto _ : state) benchmark::DoNotOptimize(admm_reconstruct(d, mask, cfg).z_final.values().data());
}

}  // namespace

BENCHMARK(BM_Lift<false>)->Name("lift/reference");
BENCHMARK(BM_Lift<true>)->Name("lift/parallel");
BENCHMARK(BM_LiftAdjoint<false>)->Name("lift_adjoint/reference");
BENCHMARK(BM_LiftAdjoint<true>)->Name("lift_adjoint/parallel");
BENCHMARK(BM_Unfold<false>)->Name("unfold/reference")->DenseRange(0, 2);
BENCHMARK(BM_Unfold<true>)->Name("unfold/parallel")->DenseRange(0, 2);
BENCHMARK(BM_Refold<false>)->Name("refold/reference")->DenseRange(0, 2);
BENCHMARK(BM_Refold<true>)->Name("refold/parallel")->DenseRange(0, 2);
BENCHMARK(BM_Combine<false>)->Name("combine/reference");
BENCHMARK(BM_Combine<true>)->Name("combine/parallel");
BENCHMARK(BM_Svt)->Name("svt_rank50")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdmmIteration)->Name("admm_iteration")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP counterparts, plus full Strang steps.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "kgres/spectral/kernels.hpp"
#include "kgres/spectral/solver.hpp"

namespace ks = kgres::spectral::kernels;
using kgres::spectral::cplx;

namespace {

struct Buffers {
  std::size_t rows, cols;
  std::vector<cplx> uh, ph, q;
  std::vector<double> omega, c, s, f, g, radius;

  explicit Buffers(std::size_t n) : rows(n), cols(n / 2 + 1) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    const std::size_t m = rows * cols;
    for (std::size_t i = 0; i < m; ++i) {
      uh.emplace_back(d(rng), d(rng));
      ph.emplace_back(d(rng), d(rng));
      q.emplace_back(d(rng), d(rng));
      omega.push_back(1.0 + std::abs(d(rng)));
      c.push_back(std::cos(0.02 * omega.back()));
      s.push_back(std::sin(0.02 * omega.back()));
    }
    for (std::size_t i = 0; i < n * n; ++i) {
      f.push_back(d(rng));
      g.push_back(d(rng));
      radius.push_back(64.0 * std::abs(d(rng)));
    }
  }
};

template <bool Parallel>
void BM_Rotate(benchmark::State& st) {
  Buffers b(st.range(0));
  for (auto _ : st) {
    if constexpr (Parallel) {
      ks::parallel::rotate(b.uh.data(), b.ph.data(), b.omega.data(), b.c.data(), b.s.data(), b.rows, b.cols);
    } else {
      ks::serial::rotate(b.uh.data(), b.ph.data(), b.omega.data(), b.c.data(), b.s.data(), b.rows, b.cols);
    }
    benchmark::DoNotOptimize(b.uh.data());
  }
}

template <bool Parallel>
void BM_Product(benchmark::State& st) {
  Buffers b(st.range(0));
  std::vector<double> out(b.f.size());
  for (auto _ : st) {
    if constexpr (Parallel) {
      ks::parallel::accumulate_product(out.data(), 0.5, b.f.data(), b.g.data(), b.rows, b.rows);
    } else {
      ks::serial::accumulate_product(out.data(), 0.5, b.f.data(), b.g.data(), b.rows, b.rows);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Norms(benchmark::State& st) {
  Buffers b(st.range(0));
  for (auto _ : st) {
    auto r = Parallel ? ks::parallel::norms(b.f.data(), b.rows, b.rows) : ks::serial::norms(b.f.data(), b.rows, b.rows);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Exterior(benchmark::State& st) {
  Buffers b(st.range(0));
  for (auto _ : st) {
    auto r = Parallel ? ks::parallel::exterior(b.f.data(), b.radius.data(), 30.0, b.rows, b.rows)
                      : ks::serial::exterior(b.f.data(), b.radius.data(), 30.0, b.rows, b.rows);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_StrangStep(benchmark::State& st) {
  kgres::spectral::SolverOptions opt;
  opt.N = static_cast<std::size_t>(st.range(0));
  opt.parallel = Parallel;
  opt.horizon = 10.0;
  auto state = kgres::spectral::init(opt, {});
  const auto sys = kgres::parse_system("Q1 = v1*v2; Q2 = v1^2", kgres::Masses{});
  for (auto _ : st) kgres::spectral::strang_step(state, 0.02, sys);
}

}  // namespace

BENCHMARK(BM_Rotate<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Rotate<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_Product<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Product<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_Norms<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Norms<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_Exterior<false>)->Arg(256)->Arg(512);
BENCHMARK(BM_Exterior<true>)->Arg(256)->Arg(512);
BENCHMARK(BM_StrangStep<false>)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrangStep<true>)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

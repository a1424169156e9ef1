#include <map>
#include <random>
#include <utility>

#include <benchmark/benchmark.h>

#include "aqnpe/aqnpe_solver.hpp"
#include "aqnpe/baselines.hpp"
#include "aqnpe/hessian_learner.hpp"
#include "aqnpe/linear_solver.hpp"
#include "aqnpe/logistic.hpp"
#include "aqnpe/sep_oracle.hpp"

namespace {

using aqnpe::Index;
using aqnpe::SymmetricMatrix;
using aqnpe::Vector;

Vector gaussian(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

SymmetricMatrix random_psd(std::mt19937_64& rng, Index d) {
  Eigen::MatrixXd g(d, d);
  for (Index j = 0; j < d; ++j) g.col(j) = gaussian(rng, d);
  return SymmetricMatrix(Eigen::MatrixXd(g * g.transpose() / double(d)));
}

const aqnpe::Dataset& dataset(Index n, Index d) {
  static std::map<std::pair<Index, Index>, aqnpe::Dataset> cache;
  auto it = cache.find({n, d});
  if (it == cache.end()) {
    aqnpe::SyntheticLogisticSpec spec;
    spec.n = n;
    spec.d = d;
    it = cache.emplace(std::make_pair(n, d), aqnpe::generate_logistic(spec).data).first;
  }
  return it->second;
}

void BM_LogisticGradient(benchmark::State& state) {
  const Index d = state.range(0);
  const aqnpe::LogisticObjective f(dataset(10 * d, d));
  std::mt19937_64 rng(1);
  const Vector x = 0.1 * gaussian(rng, d);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(x));
}
BENCHMARK(BM_LogisticGradient)->Arg(50)->Arg(150);

void BM_ConjugateResidual(benchmark::State& state) {
  const Index d = state.range(0);
  std::mt19937_64 rng(2);
  const SymmetricMatrix b = random_psd(rng, d);
  const Vector rhs = gaussian(rng, d);
  const aqnpe::ShiftedIdentityOperator op(b, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        aqnpe::conjugate_residual(op, rhs, 0.1, aqnpe::default_cr_max_iters(d)));
  }
}
BENCHMARK(BM_ConjugateResidual)->Arg(50)->Arg(150);

void BM_LanczosExtreme(benchmark::State& state) {
  const Index d = state.range(0);
  std::mt19937_64 rng(3);
  const SymmetricMatrix w = random_psd(rng, d);
  const int steps = aqnpe::sep_refine_steps(d, 0.1, 0.05);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(aqnpe::lanczos_extreme(w, steps, seed++));
}
BENCHMARK(BM_LanczosExtreme)->Arg(50)->Arg(150);

void BM_SeparationOracle(benchmark::State& state) {
  const Index d = state.range(0);
  std::mt19937_64 rng(4);
  // Operator norm near 1 forces the refinement pass.
  SymmetricMatrix w = random_psd(rng, d);
  w *= 0.98 / aqnpe::lanczos_extreme(w, int(d), std::uint64_t{0}).lambda_max;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(aqnpe::sep(w, 0.1, 0.05, seed++));
}
BENCHMARK(BM_SeparationOracle)->Arg(50)->Arg(150);

void BM_LearnerStep(benchmark::State& state) {
  const Index d = state.range(0);
  std::mt19937_64 rng(5);
  aqnpe::LearnerConfig config;
  config.l1 = 1.0;
  const aqnpe::LearnerState s0 = aqnpe::make_learner_state(d, config);
  const SymmetricMatrix h = random_psd(rng, d);
  const Vector s = gaussian(rng, d);
  const aqnpe::LossSample sample{h.dense() * s, s};
  for (auto _ : state) benchmark::DoNotOptimize(aqnpe::learner_step(s0, sample));
}
BENCHMARK(BM_LearnerStep)->Arg(50)->Arg(150);

void BM_AqnpeSolve(benchmark::State& state) {
  const Index d = state.range(0);
  const aqnpe::LogisticObjective f(dataset(10 * d, d));
  aqnpe::SolverConfig config;
  config.max_iters = 100;
  const Vector x0 = Vector::Zero(d);
  for (auto _ : state) benchmark::DoNotOptimize(aqnpe::solve(f, x0, x0, config));
  state.SetItemsProcessed(state.iterations() * config.max_iters);
}
BENCHMARK(BM_AqnpeSolve)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_BfgsSolve(benchmark::State& state) {
  const Index d = state.range(0);
  const aqnpe::LogisticObjective f(dataset(10 * d, d));
  aqnpe::BaselineConfig config;
  config.method = aqnpe::BaselineMethod::bfgs;
  config.max_iters = 100;
  const Vector x0 = Vector::Zero(d);
  for (auto _ : state) benchmark::DoNotOptimize(aqnpe::bfgs_solve(f, x0, config));
}
BENCHMARK(BM_BfgsSolve)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

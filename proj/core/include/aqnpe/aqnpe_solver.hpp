#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "aqnpe/core_types.hpp"
#include "aqnpe/hessian_learner.hpp"
#include "aqnpe/line_search.hpp"
#include "aqnpe/objective.hpp"
#include "aqnpe/run_record.hpp"

namespace aqnpe {

struct SolverConfig {
  double alpha1 = 0.1;
  double alpha2 = 0.85;
  double beta = 0.5;
  /// Initial tentative step; defaults to alpha2 / L1.
  std::optional<double> sigma0;
  /// Smoothness constant; falls back to the oracle's, then to estimate_l1.
  std::optional<double> l1;
  int l1_probes = 5;
  int max_iters = 1000;
  /// Stop once an accepted (case I) iterate has ||grad f|| <= tolerance.
  /// The check reuses the line search's gradient, so it costs no query.
  double tolerance = 0.0;
  /// Optional stop once f(x_k) <= f_target (benchmarks with a known f*).
  std::optional<double> f_target;
  double failure_budget = 0.01;
  double rho = 1.0 / 128.0;
  std::uint64_t seed = 0;
  /// Initial Hessian approximation, must satisfy 0 <= B0 <= L1 I.
  std::optional<SymmetricMatrix> b0;

  LineSearchParams line_search() const { return {alpha1, alpha2, beta}; }
  /// Throws UsageError on constraint violations.
  void validate() const;
};

struct SolverState {
  Vector x;
  Vector z;
  double weight = 0.0;  ///< A_k, accumulated momentum weight
  double eta = 0.0;     ///< tentative step for the next line search
  SymmetricMatrix b;    ///< Hessian approximation in {0 <= B <= L1 I}
  std::uint64_t k = 0;
  LearnerState learner;
};

struct MomentumWeights {
  double a = 0.0;
  Vector y;
};

/// a = (eta + sqrt(eta^2 + 4 eta A)) / 2 and y = (A x + a z) / (A + a), so
/// that eta (A + a) = a^2.
MomentumWeights momentum_weights(double weight, double eta, const Vector& x, const Vector& z);

/// Everything computed inside one iteration, for observers and audits.
struct StepDetail {
  std::uint64_t k = 0;
  double a = 0.0;
  Vector y;
  Vector grad_y;
  double eta = 0.0;      ///< tentative step
  double eta_hat = 0.0;  ///< accepted step
  double damping = 1.0;  ///< eta_hat / eta (1 in case I)
  StepCase step_case = StepCase::accepted;
  int backtracks = 0;
  int linear_solver_iterations = 0;
  Vector x_hat;
  Vector grad_x_hat;
  std::optional<Vector> x_tilde;
  std::optional<Vector> grad_x_tilde;
  std::optional<LearnerStepResult> learner;  ///< present in case II
  double f_next = 0.0;
};

struct StepResult {
  SolverState state;
  TraceRow row;
  StepDetail detail;
};

/// Builds the k = 0 state: A = 0, eta = sigma0, learner started at B0.
SolverState initial_state(const Vector& x0, const Vector& z0, double l1, double sigma0,
                          const SolverConfig& config);

/// One accelerated iteration: momentum point, one gradient at y, backtracking
/// search, then the accepted-step update (x = x_hat, A += a, eta = eta_hat /
/// beta) or the damped update with gamma = eta_hat / eta, which also feeds
/// the secant pair of the last rejected trial to the learner. The gradient at
/// x_hat from the search is reused, and f at the new x is one value query.
StepResult step(const SolverState& state, const CountingOracle& oracle,
                const LineSearchParams& params);

using StepObserver =
    std::function<void(const SolverState& before, const StepDetail& detail, const SolverState& after)>;

/// Runs step() until max_iters, the gradient tolerance or the f target is
/// reached. A step-size collapse after the gradient norm has fallen below
/// 1e-10 times its first value ends the run with stop_reason "stalled". Other
/// errors are caught and recorded in RunRecord::error together with the
/// partial trace. Queries are reported to `accounting` when given.
RunRecord solve(const ObjectiveOracle& oracle, const Vector& x0, const Vector& z0,
                const SolverConfig& config, const StepObserver& observer = {},
                Accounting* accounting = nullptr);

}  // namespace aqnpe

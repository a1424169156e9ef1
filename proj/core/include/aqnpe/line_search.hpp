#pragma once

#include <optional>

#include "aqnpe/core_types.hpp"
#include "aqnpe/objective.hpp"

namespace aqnpe {

struct LineSearchParams {
  double alpha1 = 0.1;  ///< linear-solve accuracy, in (0,1)
  double alpha2 = 0.85; ///< extragradient slack, alpha1 + alpha2 < 1
  double beta = 0.5;    ///< backtracking factor, in (0,1)

  /// Throws UsageError if the constraints above fail.
  void validate() const;
};

struct LineSearchOutcome {
  double eta_hat = 0.0;
  Vector x_hat;
  Vector grad_at_x_hat;
  /// Last rejected trial point (computed with step eta_hat / beta) and its
  /// gradient; present iff backtracks > 0.
  std::optional<Vector> x_tilde;
  std::optional<Vector> grad_at_x_tilde;
  int backtracks = 0;
  int linear_solver_iterations = 0;
};

/// Backtracking search over eta_init * beta^i. Each trial solves
/// (I + eta B) s = -eta g to relative accuracy alpha1 with conjugate
/// residuals, sets x = y + s and spends one gradient query to test
/// ||x - y + eta grad f(x)|| <= (alpha1 + alpha2) ||x - y||
/// (equality accepts). `g` must be grad f(y); it is not re-queried.
///
/// Throws ConfigurationError if eta falls below 1e-16 * eta_init, which
/// signals an L1 or oracle inconsistency. Linear-solver errors propagate.
LineSearchOutcome backtracking_search(const Vector& y, const Vector& g, const SymmetricMatrix& b,
                                      double eta_init, const LineSearchParams& params,
                                      const CountingOracle& oracle);

}  // namespace aqnpe

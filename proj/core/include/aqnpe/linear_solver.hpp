#pragma once

#include <vector>

#include "aqnpe/core_types.hpp"
#include "aqnpe/objective.hpp"

namespace aqnpe {

struct LinearSolveResult {
  Vector s;
  int iterations = 0;
  double final_residual_norm = 0.0;
  /// ||r_k|| for k = 0 .. iterations (r_0 = b).
  std::vector<double> residual_norms;
};

/// The operator I + eta * B, applied matrix-free. Each apply() costs one
/// B-matvec reported to `accounting` under `source`.
class ShiftedIdentityOperator {
 public:
  ShiftedIdentityOperator(const SymmetricMatrix& b, double eta, Accounting* accounting = nullptr,
                          MatvecSource source = MatvecSource::linear_solver)
      : b_(b), eta_(eta), accounting_(accounting), source_(source) {}

  Vector operator()(const Vector& v) const {
    return v + eta_ * matvec(b_, v, accounting_, source_);
  }

  Index dim() const noexcept { return b_.dim(); }

 private:
  const SymmetricMatrix& b_;
  double eta_;
  Accounting* accounting_;
  MatvecSource source_;
};

/// Default cap for conjugate_residual: four times the dimension.
inline int default_cr_max_iters(Index dim) { return static_cast<int>(4 * dim); }

/// Conjugate residual method started from s_0 = 0 for a symmetric operator
/// with lambda_min >= 1. Returns the first iterate with
/// ||A s_k - b|| <= alpha ||s_k||; the test runs before every iteration, so
/// b = 0 returns s = 0 immediately. Recurrences keep A p_k and A r_k, so the
/// cost is one application of `apply_a` for r_0 plus one per iteration.
///
/// Throws UsageError for alpha outside (0,1) or a size mismatch,
/// ConvergenceError (with the smallest-residual iterate) after `max_iters`,
/// and NumericError on breakdown (<A p, A p> < 1e-300) or non-finite values.
LinearSolveResult conjugate_residual(const LinearMap& apply_a, const Vector& b, double alpha,
                                     int max_iters);

}  // namespace aqnpe

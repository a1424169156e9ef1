#include "aqnpe/line_search.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "aqnpe/errors.hpp"
#include "aqnpe/linear_solver.hpp"

namespace aqnpe {

void LineSearchParams::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw UsageError("line search: alpha1 must lie in (0,1)");
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw UsageError("line search: alpha2 must lie in (0,1)");
  if (!(alpha1 + alpha2 < 1.0)) throw UsageError("line search: alpha1 + alpha2 must be < 1");
  if (!(beta > 0.0 && beta < 1.0)) throw UsageError("line search: beta must lie in (0,1)");
}

namespace {

// Only used to make the underflow diagnostic actionable.
double operator_norm_estimate(const SymmetricMatrix& b, Accounting& accounting) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector start(b.dim());
  for (Index i = 0; i < start.size(); ++i) start(i) = normal(rng);
  return power_iteration(
             [&](const Vector& v) { return matvec(b, v, &accounting, MatvecSource::line_search); },
             start, 20)
      .eigenvalue;
}

}  // namespace

LineSearchOutcome backtracking_search(const Vector& y, const Vector& g, const SymmetricMatrix& b,
                                      double eta_init, const LineSearchParams& params,
                                      const CountingOracle& oracle) {
  params.validate();
  if (!(eta_init > 0.0) || !std::isfinite(eta_init)) {
    throw UsageError("line search: initial step must be positive and finite");
  }
  if (y.size() != g.size() || y.size() != b.dim()) {
    throw UsageError("line search: dimension mismatch");
  }
  Accounting& accounting = oracle.accounting();
  const int max_cr = default_cr_max_iters(b.dim());
  const double floor = 1e-16 * eta_init;

  LineSearchOutcome out;
  double eta = eta_init;
  for (;;) {
    const ShiftedIdentityOperator op(b, eta, &accounting);
    const LinearSolveResult solve = conjugate_residual(op, -eta * g, params.alpha1, max_cr);
    out.linear_solver_iterations += solve.iterations;
    Vector x = y + solve.s;
    Vector grad = oracle.gradient(x);
    const double lhs = (x - y + eta * grad).norm();
    const double rhs = (params.alpha1 + params.alpha2) * (x - y).norm();
    if (!std::isfinite(lhs)) throw NumericError("line search: non-finite trial gradient");
    if (!(lhs > rhs)) {
      out.eta_hat = eta;
      out.x_hat = std::move(x);
      out.grad_at_x_hat = std::move(grad);
      return out;
    }
    out.x_tilde = std::move(x);
    out.grad_at_x_tilde = std::move(grad);
    ++out.backtracks;
    eta *= params.beta;
    if (eta < floor) {
      std::ostringstream msg;
      msg << "line search: step collapsed to " << eta << " after " << out.backtracks
          << " backtracks (||B||_op ~ " << operator_norm_estimate(b, accounting)
          << "); the smoothness constant or oracle is inconsistent";
      throw ConfigurationError(msg.str());
    }
  }
}

}  // namespace aqnpe

#include "aqnpe/linear_solver.hpp"

#include <cmath>
#include <string>

#include "aqnpe/errors.hpp"

namespace aqnpe {

LinearSolveResult conjugate_residual(const LinearMap& apply_a, const Vector& b, double alpha,
                                     int max_iters) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("conjugate_residual: alpha must lie in (0,1)");
  }
  if (max_iters < 0) throw UsageError("conjugate_residual: max_iters must be >= 0");
  if (!b.allFinite()) throw NumericError("conjugate_residual: non-finite right-hand side");

  LinearSolveResult out;
  const Index d = b.size();
  Vector s = Vector::Zero(d);
  Vector r = b;
  Vector p = r;
  Vector ar;
  Vector ap;
  double r_ar = 0.0;

  Vector best = s;
  double best_residual = r.norm();

  for (int k = 0;; ++k) {
    const double residual = r.norm();
    out.residual_norms.push_back(residual);
    if (!std::isfinite(residual)) throw NumericError("conjugate_residual: non-finite residual");
    if (residual < best_residual) {
      best_residual = residual;
      best = s;
    }
    if (residual <= alpha * s.norm()) {
      out.s = std::move(s);
      out.iterations = k;
      out.final_residual_norm = residual;
      return out;
    }
    if (k == max_iters) {
      throw ConvergenceError("conjugate_residual: no convergence after " +
                                 std::to_string(max_iters) + " iterations (residual " +
                                 std::to_string(residual) + ")",
                             std::move(best));
    }
    if (k == 0) {
      ar = apply_a(r);
      if (ar.size() != d) throw UsageError("conjugate_residual: operator size mismatch");
      ap = ar;
      r_ar = r.dot(ar);
    }

    const double ap_ap = ap.dot(ap);
    if (!(ap_ap >= 1e-300)) {
      throw NumericError("conjugate_residual: breakdown, <Ap, Ap> = " + std::to_string(ap_ap));
    }
    const double step = r_ar / ap_ap;
    s += step * p;
    r -= step * ap;

    Vector ar_next = apply_a(r);
    const double r_ar_next = r.dot(ar_next);
    const double beta = r_ar_next / r_ar;
    p = r + beta * p;
    ap = ar_next + beta * ap;
    ar = std::move(ar_next);
    r_ar = r_ar_next;
  }
}

}  // namespace aqnpe

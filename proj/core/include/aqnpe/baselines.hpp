#pragma once

#include <optional>

#include "aqnpe/core_types.hpp"
#include "aqnpe/objective.hpp"
#include "aqnpe/run_record.hpp"

namespace aqnpe {

enum class BaselineMethod { nag, bfgs };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::nag;
  int max_iters = 1000;
  /// Gradient-norm stop. NAG checks the gradient it queries at y_k, BFGS the
  /// gradient at the new iterate. BFGS also stops on an exactly zero gradient
  /// when this is 0.
  double tolerance = 0.0;
  std::optional<double> f_target;

  // NAG
  double nag_initial_step = 1.0;
  double nag_shrink = 0.5;

  // BFGS (strong Wolfe)
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_zoom = 50;

  /// Throws UsageError on constraint violations (0 < c1 < c2 < 1, ...).
  void validate() const;
};

/// Monotone accelerated gradient (FISTA with a monotone safeguard): a
/// gradient step from y_k with backtracking on
/// f(z) <= f(y) - (eta/2) ||grad f(y)||^2, then x_{k+1} is whichever of z_k
/// and x_k has the smaller objective. One gradient query per iteration;
/// backtracking only spends function values. Step sizes never increase.
RunRecord nag_solve(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& config,
                    Accounting* accounting = nullptr);

/// Inverse-Hessian BFGS with a strong-Wolfe line search. H starts at I and is
/// rescaled by s^T y / y^T y before the first update. Pairs with
/// s^T y <= 1e-12 ||s|| ||y|| are skipped. Returns immediately (no rows)
/// when the gradient at x0 already meets the tolerance.
RunRecord bfgs_solve(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& config,
                     Accounting* accounting = nullptr);

/// H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T with rho = 1 / y^T s.
/// The single H y product is reported to `accounting`. Throws UsageError when
/// y^T s <= 0.
SymmetricMatrix bfgs_inverse_update(const SymmetricMatrix& h, const Vector& s, const Vector& y,
                                    Accounting* accounting = nullptr);

}  // namespace aqnpe

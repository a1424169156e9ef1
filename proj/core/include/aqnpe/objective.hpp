#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aqnpe/core_types.hpp"

namespace aqnpe {

/// A convex, L1-smooth objective. Hessians are an optional capability used by
/// tests and by estimate_l1; no solver calls hessian() on its own path.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual Index dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual bool has_hessian() const { return false; }
  /// Throws UsageError unless has_hessian().
  virtual SymmetricMatrix hessian(const Vector& x) const;

  /// Gradient-Lipschitz constant when known analytically.
  virtual std::optional<double> smoothness() const { return std::nullopt; }
};

/// Decorator that reports every gradient and value query to an Accounting
/// channel. Each gradient() call counts exactly one query.
class CountingOracle final : public ObjectiveOracle {
 public:
  CountingOracle(const ObjectiveOracle& inner, Accounting& accounting)
      : inner_(inner), accounting_(accounting) {}

  Index dimension() const override { return inner_.dimension(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return inner_.has_hessian(); }
  SymmetricMatrix hessian(const Vector& x) const override { return inner_.hessian(x); }
  std::optional<double> smoothness() const override { return inner_.smoothness(); }

  Accounting& accounting() const noexcept { return accounting_; }
  std::uint64_t gradient_queries() const noexcept { return accounting_.gradient_queries(); }
  std::uint64_t matvec_count() const noexcept { return accounting_.matvecs(); }

 private:
  const ObjectiveOracle& inner_;
  Accounting& accounting_;
};

/// f(x) = 1/2 (x - c)^T Q (x - c) + offset, Q symmetric positive semidefinite.
class QuadraticObjective final : public ObjectiveOracle {
 public:
  QuadraticObjective(SymmetricMatrix q, Vector center, double offset = 0.0);

  Index dimension() const override { return center_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return true; }
  SymmetricMatrix hessian(const Vector&) const override { return q_; }
  std::optional<double> smoothness() const override { return lambda_max_; }

  const Vector& minimizer() const noexcept { return center_; }
  double minimum() const noexcept { return offset_; }

 private:
  SymmetricMatrix q_;
  Vector center_;
  double offset_;
  double lambda_max_;
};

using LinearMap = std::function<Vector(const Vector&)>;

struct PowerIterationResult {
  double eigenvalue = 0.0;  ///< Rayleigh quotient at the final iterate
  Vector eigenvector;
  int iterations = 0;
};

/// Power iteration for the dominant eigenvalue of a symmetric positive
/// semidefinite map. Stops when successive Rayleigh quotients agree to
/// `rel_tol` or after `max_iters` steps.
PowerIterationResult power_iteration(const LinearMap& apply, const Vector& start, int max_iters,
                                     double rel_tol = 0.0);

struct SmoothnessEstimate {
  double value = 0.0;                ///< inflated estimate of sup ||hess f||_op
  std::vector<Vector> probe_points;  ///< where curvature was measured
  std::vector<double> curvatures;    ///< raw per-probe power-iteration estimates
};

inline constexpr double kSmoothnessSafetyFactor = 1.1;

/// Estimates L1 by power iteration on the Hessian at `probes` standard-normal
/// points, falling back to finite-difference Hessian-vector products when the
/// oracle has no Hessian. The largest curvature found is inflated by 1.1.
/// Throws UsageError if probes < 1, NumericError on non-finite curvature.
SmoothnessEstimate estimate_l1_with_probes(const ObjectiveOracle& oracle, int probes,
                                           std::uint64_t seed);

double estimate_l1(const ObjectiveOracle& oracle, int probes, std::uint64_t seed);

}  // namespace aqnpe

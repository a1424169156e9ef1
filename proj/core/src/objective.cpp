#include "aqnpe/objective.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "aqnpe/errors.hpp"

namespace aqnpe {

SymmetricMatrix ObjectiveOracle::hessian(const Vector&) const {
  throw UsageError("this objective does not provide Hessians");
}

double CountingOracle::value(const Vector& x) const {
  accounting_.add_value();
  return inner_.value(x);
}

Vector CountingOracle::gradient(const Vector& x) const {
  accounting_.add_gradient();
  return inner_.gradient(x);
}

QuadraticObjective::QuadraticObjective(SymmetricMatrix q, Vector center, double offset)
    : q_(std::move(q)), center_(std::move(center)), offset_(offset) {
  if (q_.dim() != center_.size()) throw UsageError("QuadraticObjective: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q_.dense(), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw UsageError("QuadraticObjective: Q must be positive semidefinite");
  }
  lambda_max_ = std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

double QuadraticObjective::value(const Vector& x) const {
  const Vector r = x - center_;
  return 0.5 * r.dot(q_.dense() * r) + offset_;
}

Vector QuadraticObjective::gradient(const Vector& x) const { return q_.dense() * (x - center_); }

PowerIterationResult power_iteration(const LinearMap& apply, const Vector& start, int max_iters,
                                     double rel_tol) {
  PowerIterationResult out;
  const double start_norm = start.norm();
  if (!(start_norm > 0.0)) throw UsageError("power_iteration: zero start vector");
  Vector v = start / start_norm;
  double previous = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Vector w = apply(v);
    if (!w.allFinite()) throw NumericError("power_iteration: non-finite product");
    const double rayleigh = v.dot(w);
    const double wn = w.norm();
    out.eigenvalue = rayleigh;
    out.eigenvector = v;
    out.iterations = it;
    if (wn == 0.0) break;
    v = w / wn;
    if (it > 1 && std::abs(rayleigh - previous) <= rel_tol * std::abs(rayleigh)) break;
    previous = rayleigh;
  }
  return out;
}

SmoothnessEstimate estimate_l1_with_probes(const ObjectiveOracle& oracle, int probes,
                                           std::uint64_t seed) {
  if (probes < 1) throw UsageError("estimate_l1: probes must be >= 1");
  const Index d = oracle.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&] {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = normal(rng);
    return v;
  };

  SmoothnessEstimate out;
  double largest = 0.0;
  for (int p = 0; p < probes; ++p) {
    Vector x = gaussian();
    const Vector start = gaussian();
    LinearMap apply;
    SymmetricMatrix h;
    if (oracle.has_hessian()) {
      h = oracle.hessian(x);
      apply = [&h](const Vector& v) { return Vector(h.dense() * v); };
    } else {
      const double step = 1e-5 * std::max(1.0, x.norm());
      apply = [&oracle, &x, step](const Vector& v) {
        return Vector((oracle.gradient(x + step * v) - oracle.gradient(x - step * v)) / (2.0 * step));
      };
    }
    const PowerIterationResult pi = power_iteration(apply, start, 200, 1e-12);
    if (!std::isfinite(pi.eigenvalue)) {
      throw NumericError("estimate_l1: non-finite curvature at probe " + std::to_string(p));
    }
    largest = std::max(largest, pi.eigenvalue);
    out.curvatures.push_back(pi.eigenvalue);
    out.probe_points.push_back(std::move(x));
  }
  if (!(largest > 0.0)) throw NumericError("estimate_l1: no positive curvature found");
  out.value = kSmoothnessSafetyFactor * largest;
  return out;
}

double estimate_l1(const ObjectiveOracle& oracle, int probes, std::uint64_t seed) {
  return estimate_l1_with_probes(oracle, probes, seed).value;
}

}  // namespace aqnpe

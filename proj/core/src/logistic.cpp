#include "aqnpe/logistic.hpp"

#include <cmath>
#include <random>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
  if (m > 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

// 1 / (1 + exp(m))
double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

}  // namespace

LogisticObjective::LogisticObjective(Dataset data) : data_(std::move(data)) {
  const Index n = data_.samples();
  const Index d = data_.dimension();
  if (n < 1 || d < 1) throw UsageError("LogisticObjective: empty dataset");
  if (data_.labels.size() != n) throw UsageError("LogisticObjective: label count mismatch");
  for (Index i = 0; i < n; ++i) {
    if (data_.labels(i) != 1.0 && data_.labels(i) != -1.0) {
      throw UsageError("LogisticObjective: labels must be +1 or -1");
    }
  }
  if (!data_.features.allFinite()) throw NumericError("LogisticObjective: non-finite feature");

  const Eigen::MatrixXd gram = data_.features.transpose() * data_.features / (4.0 * double(n));
  const PowerIterationResult pi = power_iteration(
      [&gram](const Vector& v) { return Vector(gram * v); }, Vector::Ones(d), 10000, 1e-15);
  l1_ = pi.eigenvalue;
}

double LogisticObjective::value(const Vector& x) const {
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  double sum = 0.0;
  for (Index i = 0; i < margins.size(); ++i) sum += log1p_exp_neg(margins(i));
  return sum / double(data_.samples());
}

Vector LogisticObjective::gradient(const Vector& x) const {
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  Vector weights(margins.size());
  for (Index i = 0; i < margins.size(); ++i) {
    weights(i) = -data_.labels(i) * sigmoid_neg(margins(i));
  }
  return data_.features.transpose() * weights / double(data_.samples());
}

SymmetricMatrix LogisticObjective::hessian(const Vector& x) const {
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  Vector curvature(margins.size());
  for (Index i = 0; i < margins.size(); ++i) {
    const double s = sigmoid_neg(margins(i));
    curvature(i) = s * (1.0 - s);
  }
  const Eigen::MatrixXd h = data_.features.transpose() * curvature.asDiagonal() *
                            data_.features / double(data_.samples());
  return SymmetricMatrix(h);
}

SyntheticLogistic generate_logistic(const SyntheticLogisticSpec& spec) {
  if (spec.n < 1) throw UsageError("generate_logistic: n must be >= 1");
  if (spec.d < 2) throw UsageError("generate_logistic: d must be >= 2");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw UsageError("generate_logistic: sigma must be finite and >= 0");
  }
  const Index n = spec.n;
  const Index p = spec.d - 1;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticLogistic out;
  out.true_parameter.resize(p);
  for (Index j = 0; j < p; ++j) out.true_parameter(j) = normal(rng);

  out.true_features.resize(n, p);
  out.data.features.resize(n, spec.d);
  out.data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) out.true_features(i, j) = normal(rng);
    for (Index j = 0; j < p; ++j) {
      const double noise = spec.sigma * normal(rng);
      out.data.features(i, j) = out.true_features(i, j) + noise + 1.0;
    }
    out.data.features(i, p) = 1.0;
    const double margin = out.true_features.row(i).dot(out.true_parameter);
    out.data.labels(i) = margin >= 0.0 ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace aqnpe

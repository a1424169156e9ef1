#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "aqnpe/objective.hpp"

namespace aqnpe {

/// Labelled binary-classification data: row i of `features` is a_i, labels
/// are +1 or -1.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Vector labels;             // n

  Index samples() const noexcept { return features.rows(); }
  Index dimension() const noexcept { return features.cols(); }
};

/// f(x) = (1/n) sum_i log(1 + exp(-y_i <a_i, x>)).
class LogisticObjective final : public ObjectiveOracle {
 public:
  /// Computes L1 = lambda_max(A^T A / (4n)) once by power iteration.
  explicit LogisticObjective(Dataset data);

  Index dimension() const override { return data_.dimension(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return true; }
  SymmetricMatrix hessian(const Vector& x) const override;
  std::optional<double> smoothness() const override { return l1_; }

  const Dataset& data() const noexcept { return data_; }

 private:
  Dataset data_;
  double l1_ = 0.0;
};

struct SyntheticLogisticSpec {
  Index n = 500;
  Index d = 50;  ///< includes the appended constant feature
  double sigma = 0.8;
  std::uint64_t seed = 0;
};

/// Dataset together with the latent quantities used to generate it.
struct SyntheticLogistic {
  Dataset data;
  Vector true_parameter;          ///< x*, length d-1
  Eigen::MatrixXd true_features;  ///< a*_i as rows, n x (d-1)
};

/// Draws x* and a*_i entrywise N(0,1) in dimension d-1, labels
/// y_i = sign(<a*_i, x*>) (zero maps to +1), and features
/// a_i = [a*_i + n_i + 1; 1] with n_i ~ N(0, sigma^2 I).
/// Draw order from one mt19937_64 stream: x*, then per sample a*_i followed by
/// the d-1 standard-normal noise draws. Throws UsageError on invalid spec.
SyntheticLogistic generate_logistic(const SyntheticLogisticSpec& spec);

}  // namespace aqnpe

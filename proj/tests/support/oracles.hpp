#pragma once

// Independent reference computations for the tests. Nothing here is used on
// the solve path.

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "aqnpe/core_types.hpp"
#include "aqnpe/logistic.hpp"
#include "aqnpe/objective.hpp"

namespace aqnpe::testing {

using Rng = std::mt19937_64;

Vector random_vector(Rng& rng, Index d);
/// Entries N(0,1), symmetrized.
Eigen::MatrixXd random_symmetric(Rng& rng, Index d);
/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
Eigen::MatrixXd random_orthogonal(Rng& rng, Index d);
/// Q diag(u) Q^T with u_i uniform in [lo, hi].
Eigen::MatrixXd random_spectrum(Rng& rng, Index d, double lo, double hi);
/// Random symmetric matrix rescaled to the given operator norm.
Eigen::MatrixXd random_with_op_norm(Rng& rng, Index d, double op_norm);
double uniform(Rng& rng, double lo, double hi);

/// Ascending eigenvalues by dense symmetric eigendecomposition.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m);
double lambda_max(const Eigen::MatrixXd& m);
double lambda_min(const Eigen::MatrixXd& m);
double op_norm(const Eigen::MatrixXd& m);
/// Sum of absolute eigenvalues.
double nuclear_norm(const Eigen::MatrixXd& m);

/// Row-by-row double loop, the textbook definition of M v.
Vector naive_matvec(const Eigen::MatrixXd& m, const Vector& v);

/// Nearest point of {0 <= B <= L1 I} in Frobenius norm: eigenvalues clamped
/// to [0, L1].
Eigen::MatrixXd project_onto_Z_dense(const Eigen::MatrixXd& m, double l1);

/// Central differences of a scalar function of a vector.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h);

struct Reference {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
};

/// Damped Newton with the oracle's Hessian until ||grad f|| <= tol or no
/// further decrease is representable.
Reference newton_reference(const ObjectiveOracle& oracle, const Vector& x0, double tol = 1e-13);

/// Synthetic logistic problem with its high-accuracy reference optimum.
struct LogisticProblem {
  SyntheticLogistic synthetic;
  LogisticObjective objective;
  Reference reference;
};

/// Cached per (n, d, seed); sigma = 0.8.
const LogisticProblem& logistic_problem(Index n, Index d, std::uint64_t seed);

}  // namespace aqnpe::testing

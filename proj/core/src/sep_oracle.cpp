#include "aqnpe/sep_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

constexpr double kBreakdown = 1e-14;

Vector unit_gaussian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  double norm = 0.0;
  // A zero draw has probability zero; retry anyway rather than divide by it.
  while (!(norm > 0.0)) {
    for (Index i = 0; i < d; ++i) v(i) = normal(rng);
    norm = v.norm();
  }
  return v / norm;
}

int clamp_steps(double raw, Index dim) {
  const double capped = std::min(std::ceil(raw), static_cast<double>(dim));
  return std::max(1, static_cast<int>(capped));
}

}  // namespace

LanczosExtremes lanczos_extreme(const SymmetricMatrix& w, int iterations, std::mt19937_64& rng,
                                Accounting* accounting) {
  const Index d = w.dim();
  if (d < 1) throw UsageError("lanczos_extreme: empty matrix");
  if (iterations < 1) throw UsageError("lanczos_extreme: iterations must be >= 1");
  const int max_steps = static_cast<int>(std::min<Index>(iterations, d));

  Eigen::MatrixXd basis(d, max_steps);
  std::vector<double> alphas;
  std::vector<double> betas;
  basis.col(0) = unit_gaussian(d, rng);

  int steps = 0;
  for (int j = 0; j < max_steps; ++j) {
    Vector next = matvec(w, basis.col(j), accounting, MatvecSource::separation_oracle);
    const double alpha = basis.col(j).dot(next);
    alphas.push_back(alpha);
    steps = j + 1;
    if (j + 1 == max_steps) break;

    next -= alpha * basis.col(j);
    if (j > 0) next -= betas.back() * basis.col(j - 1);
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(j + 1);
      next -= q * (q.transpose() * next);
    }
    const double beta = next.norm();
    if (!std::isfinite(beta)) throw NumericError("lanczos_extreme: non-finite Krylov vector");
    if (beta < kBreakdown) break;
    betas.push_back(beta);
    basis.col(j + 1) = next / beta;
  }

  Vector diag = Eigen::Map<const Vector>(alphas.data(), steps);
  Vector sub(std::max(0, steps - 1));
  for (int i = 0; i + 1 < steps; ++i) sub(i) = betas[static_cast<std::size_t>(i)];

  Eigen::MatrixXd ritz_vectors;
  Vector ritz_values;
  if (steps == 1) {
    ritz_values = diag;
    ritz_vectors = Eigen::MatrixXd::Ones(1, 1);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success) throw NumericError("lanczos_extreme: Ritz solve failed");
    ritz_values = tri.eigenvalues();
    ritz_vectors = tri.eigenvectors();
  }
  if (!ritz_values.allFinite()) throw NumericError("lanczos_extreme: non-finite Ritz value");

  const auto q = basis.leftCols(steps);
  LanczosExtremes out;
  out.steps = steps;
  out.u_max = q * ritz_vectors.col(steps - 1);
  out.u_max.normalize();
  out.u_min = q * ritz_vectors.col(0);
  out.u_min.normalize();
  out.lambda_max = out.u_max.dot(matvec(w, out.u_max, accounting, MatvecSource::separation_oracle));
  out.lambda_min = out.u_min.dot(matvec(w, out.u_min, accounting, MatvecSource::separation_oracle));
  return out;
}

LanczosExtremes lanczos_extreme(const SymmetricMatrix& w, int iterations, std::uint64_t seed,
                                Accounting* accounting) {
  std::mt19937_64 rng(seed);
  return lanczos_extreme(w, iterations, rng, accounting);
}

int sep_first_pass_steps(Index dim, double q) {
  return clamp_steps(std::log(11.0 * double(dim) / (q * q)) + 0.5, dim);
}

// The refinement must resolve extreme eigenvalues to eps = delta / 8 of the
// spread, i.e. ceil(eps^{-1/2} / 4 * log(11d/q^2) + 1/2) Lanczos steps.
int sep_refine_steps(Index dim, double delta, double q) {
  const double eps = delta / 8.0;
  return clamp_steps(0.25 / std::sqrt(eps) * std::log(11.0 * double(dim) / (q * q)) + 0.5, dim);
}

SepResult sep(const SymmetricMatrix& w, double delta, double q, std::mt19937_64& rng,
              Accounting* accounting) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw UsageError("sep: delta must be > 0");
  if (!(q > 0.0 && q < 1.0)) throw UsageError("sep: q must lie in (0,1)");
  const Index d = w.dim();

  SepResult out;
  out.s = SymmetricMatrix::zero(d);

  const LanczosExtremes first = lanczos_extreme(w, sep_first_pass_steps(d, q), rng, accounting);
  const double first_max = std::max(first.lambda_max, -first.lambda_min);
  if (!std::isfinite(first_max)) throw NumericError("sep: non-finite eigenvalue estimate");

  if (first_max <= 0.5) {
    out.gamma = 2.0 * first_max;
    out.which = SepCase::inside;
    out.branch = SepBranch::small;
    return out;
  }
  if (first_max >= 2.0) {
    out.gamma = 2.0 * first_max;
    out.which = SepCase::separated;
    out.branch = SepBranch::large;
    out.s = first.lambda_max >= -first.lambda_min ? SymmetricMatrix::rank_one(first.u_max, 3.0)
                                                  : SymmetricMatrix::rank_one(first.u_min, -3.0);
    return out;
  }

  const LanczosExtremes refined =
      lanczos_extreme(w, sep_refine_steps(d, delta, q), rng, accounting);
  const double refined_max = std::max(refined.lambda_max, -refined.lambda_min);
  if (!std::isfinite(refined_max)) throw NumericError("sep: non-finite eigenvalue estimate");
  out.gamma = refined_max + delta;
  if (refined_max <= 1.0 - delta) {
    out.which = SepCase::inside;
    out.branch = SepBranch::refined_in;
    return out;
  }
  out.which = SepCase::separated;
  out.branch = SepBranch::refined_out;
  out.s = refined.lambda_max >= -refined.lambda_min
              ? SymmetricMatrix::rank_one(refined.u_max, 1.0)
              : SymmetricMatrix::rank_one(refined.u_min, -1.0);
  return out;
}

SepResult sep(const SymmetricMatrix& w, double delta, double q, std::uint64_t seed,
              Accounting* accounting) {
  std::mt19937_64 rng(seed);
  return sep(w, delta, q, rng, accounting);
}

}  // namespace aqnpe

#include <gtest/gtest.h>

#include <cmath>

#include "aqnpe/aqnpe_solver.hpp"
#include "aqnpe/core_types.hpp"
#include "aqnpe/errors.hpp"
#include "aqnpe/logistic.hpp"
#include "aqnpe/objective.hpp"
#include "oracles.hpp"

namespace aqnpe {
namespace {

using testing::Rng;

bool exactly_symmetric(const SymmetricMatrix& m) {
  for (Index i = 0; i < m.dim(); ++i) {
    for (Index j = 0; j < m.dim(); ++j) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

TEST(Matvec, IdentityReturnsInput) {
  Vector v(3);
  v << 1, 2, 3;
  Accounting acct;
  const Vector out = matvec(SymmetricMatrix::identity(3), v, &acct);
  EXPECT_EQ(out, v);
  EXPECT_EQ(acct.matvecs(), 1u);
}

TEST(Matvec, ZeroMatrixGivesZero) {
  Rng rng(1);
  const Vector v = testing::random_vector(rng, 4);
  EXPECT_EQ(matvec(SymmetricMatrix::zero(4), v), Vector::Zero(4));
}

TEST(Matvec, MatchesNaiveDoubleLoopExactly) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const SymmetricMatrix m(testing::random_symmetric(rng, 5));
    const Vector v = testing::random_vector(rng, 5);
    const Vector got = matvec(m, v);
    const Vector want = testing::naive_matvec(m.dense(), v);
    for (Index i = 0; i < 5; ++i) EXPECT_EQ(got(i), want(i));
  }
}

TEST(Matvec, DimensionMismatchIsUsageError) {
  EXPECT_THROW(matvec(SymmetricMatrix::identity(3), Vector::Ones(2)), UsageError);
}

TEST(Matvec, ReportsToRequestedSource) {
  Accounting acct;
  matvec(SymmetricMatrix::identity(2), Vector::Ones(2), &acct, MatvecSource::learner);
  matvec(SymmetricMatrix::identity(2), Vector::Ones(2), &acct, MatvecSource::learner);
  matvec(SymmetricMatrix::identity(2), Vector::Ones(2), &acct, MatvecSource::linear_solver);
  EXPECT_EQ(acct.matvecs(MatvecSource::learner), 2u);
  EXPECT_EQ(acct.matvecs(MatvecSource::linear_solver), 1u);
  EXPECT_EQ(acct.matvecs(), acct.matvecs_by_source_total());
}

TEST(SymmetricMatrix, ConstructionSymmetrizesAndStaysSymmetric) {
  Rng rng(3);
  Eigen::MatrixXd raw(6, 6);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) raw(i, j) = testing::uniform(rng, -1, 1);
  }
  SymmetricMatrix m(raw);
  EXPECT_TRUE(exactly_symmetric(m));
  const SymmetricMatrix other(testing::random_symmetric(rng, 6));
  m += other;
  EXPECT_TRUE(exactly_symmetric(m));
  m *= 0.3;
  EXPECT_TRUE(exactly_symmetric(m));
  m -= 1.7 * other;
  EXPECT_TRUE(exactly_symmetric(m));
  EXPECT_TRUE(exactly_symmetric(SymmetricMatrix::rank_one(testing::random_vector(rng, 6), -2.5)));
}

TEST(SymmetricMatrix, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(SymmetricMatrix(Eigen::MatrixXd::Zero(2, 3)), UsageError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(SymmetricMatrix{bad}, NumericError);
}

TEST(SymmetricMatrix, FrobeniusInnerIsTraceOfProduct) {
  Rng rng(4);
  const SymmetricMatrix a(testing::random_symmetric(rng, 5));
  const SymmetricMatrix b(testing::random_symmetric(rng, 5));
  EXPECT_NEAR(frobenius_inner(a, b), (a.dense().transpose() * b.dense()).trace(), 1e-12);
}

TEST(CountingOracle, CountsEveryGradientCall) {
  const QuadraticObjective q(SymmetricMatrix::identity(3), Vector::Zero(3));
  Accounting acct;
  const CountingOracle counted(q, acct);
  std::uint64_t previous = 0;
  for (int i = 0; i < 5; ++i) {
    counted.gradient(Vector::Ones(3));
    EXPECT_EQ(counted.gradient_queries(), previous + 1);
    previous = counted.gradient_queries();
  }
  counted.value(Vector::Ones(3));
  EXPECT_EQ(counted.gradient_queries(), 5u);
  EXPECT_EQ(acct.value_queries(), 1u);
}

TEST(EstimateL1, HalfSquaredNorm) {
  const QuadraticObjective q(SymmetricMatrix::identity(4), Vector::Zero(4));
  const double est = estimate_l1(q, 3, 11);
  EXPECT_GE(est, 1.0);
  EXPECT_LE(est, 1.1);
}

TEST(EstimateL1, DiagonalQuadratic) {
  Vector diag(2);
  diag << 1.0, 4.0;
  const QuadraticObjective q(SymmetricMatrix::diagonal(diag), Vector::Zero(2));
  const double est = estimate_l1(q, 3, 12);
  EXPECT_GE(est, 4.0);
  EXPECT_LE(est, 4.4);
}

// Without a Hessian the estimate goes through finite differences of gradients.
class GradientOnly final : public ObjectiveOracle {
 public:
  explicit GradientOnly(const ObjectiveOracle& inner) : inner_(inner) {}
  Index dimension() const override { return inner_.dimension(); }
  double value(const Vector& x) const override { return inner_.value(x); }
  Vector gradient(const Vector& x) const override { return inner_.gradient(x); }

 private:
  const ObjectiveOracle& inner_;
};

TEST(EstimateL1, FiniteDifferencePathOnDiagonalQuadratic) {
  Vector diag(2);
  diag << 1.0, 4.0;
  const QuadraticObjective q(SymmetricMatrix::diagonal(diag), Vector::Zero(2));
  const double est = estimate_l1(GradientOnly(q), 3, 12);
  EXPECT_GE(est, 4.0 * (1.0 - 1e-6));
  EXPECT_LE(est, 4.4 * (1.0 + 1e-6));
}

TEST(EstimateL1, LogisticWithinTenPercentOfDenseEigAtProbes) {
  SyntheticLogisticSpec spec;
  spec.n = 200;
  spec.d = 20;
  spec.seed = 5;
  const LogisticObjective f(generate_logistic(spec).data);
  const SmoothnessEstimate est = estimate_l1_with_probes(f, 5, 21);
  double dense_max = 0.0;
  for (const Vector& p : est.probe_points) {
    dense_max = std::max(dense_max, testing::lambda_max(f.hessian(p).dense()));
  }
  EXPECT_LE(std::abs(est.value / dense_max - 1.0), 0.1 + 1e-9);
}

TEST(EstimateL1, RejectsZeroProbes) {
  const QuadraticObjective q(SymmetricMatrix::identity(2), Vector::Zero(2));
  EXPECT_THROW(estimate_l1(q, 0, 1), UsageError);
}

TEST(Logistic, GradientIsLipschitzWithStatedConstant) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  const double l1 = *p.objective.smoothness();
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const Vector x = testing::random_vector(rng, 50);
    const Vector y = x + 0.3 * testing::random_vector(rng, 50);
    const double lhs = (p.objective.gradient(x) - p.objective.gradient(y)).norm();
    EXPECT_LE(lhs, l1 * (x - y).norm() * (1.0 + 1e-12));
  }
}

TEST(Logistic, SmoothnessMatchesDenseEigenvalue) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  const Eigen::MatrixXd& a = p.objective.data().features;
  const double dense = testing::lambda_max(a.transpose() * a / (4.0 * 500.0));
  EXPECT_NEAR(*p.objective.smoothness(), dense, 1e-9 * dense);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 1);
  Rng rng(7);
  const Vector x = 0.1 * testing::random_vector(rng, 50);
  const Vector fd = testing::finite_difference_gradient(
      [&](const Vector& v) { return p.objective.value(v); }, x, 1e-6);
  EXPECT_LE((fd - p.objective.gradient(x)).norm(), 1e-7 * p.objective.gradient(x).norm() + 1e-9);
}

TEST(Accounting, SolverRunConservesMatvecsAcrossSources) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  SolverConfig config;
  config.max_iters = 60;
  Accounting acct;
  const Vector zero = Vector::Zero(50);
  const RunRecord rec = solve(p.objective, zero, zero, config, {}, &acct);
  ASSERT_TRUE(rec.ok());
  EXPECT_EQ(acct.matvecs(), acct.matvecs_by_source_total());
  EXPECT_EQ(rec.rows.back().matvecs, acct.matvecs());
  EXPECT_GT(acct.matvecs(MatvecSource::linear_solver), 0u);
  EXPECT_GT(acct.matvecs(MatvecSource::separation_oracle), 0u);
  EXPECT_GT(acct.matvecs(MatvecSource::learner), 0u);
}

TEST(Accounting, CountersAreMonotoneAndReproducible) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  SolverConfig config;
  config.max_iters = 80;
  config.seed = 3;
  const Vector zero = Vector::Zero(50);
  const RunRecord a = solve(p.objective, zero, zero, config);
  const RunRecord b = solve(p.objective, zero, zero, config);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].grad_queries, b.rows[k].grad_queries);
    EXPECT_EQ(a.rows[k].matvecs, b.rows[k].matvecs);
    if (k > 0) {
      EXPECT_GE(a.rows[k].grad_queries, a.rows[k - 1].grad_queries);
      EXPECT_GE(a.rows[k].matvecs, a.rows[k - 1].matvecs);
    }
  }
}

}  // namespace
}  // namespace aqnpe

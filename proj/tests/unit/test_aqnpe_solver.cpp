#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "aqnpe/aqnpe_solver.hpp"
#include "aqnpe/errors.hpp"
#include "audit.hpp"
#include "oracles.hpp"

namespace aqnpe {
namespace {

using testing::Rng;

TEST(MomentumWeights, FirstIterationPutsYOnZ) {
  Vector x(2), z(2);
  x << 1.0, 2.0;
  z << -3.0, 4.0;
  const MomentumWeights mw = momentum_weights(0.0, 0.7, x, z);
  EXPECT_EQ(mw.a, 0.7);
  EXPECT_EQ(mw.y, z);
}

TEST(MomentumWeights, ExactArithmeticExample) {
  Vector x(2), z(2);
  x << 1.0, 0.0;
  z << 0.0, 1.0;
  const MomentumWeights mw = momentum_weights(2.0, 1.0, x, z);
  EXPECT_DOUBLE_EQ(mw.a, 2.0);
  EXPECT_TRUE(mw.y.isApprox((2.0 * x + 2.0 * z) / 4.0));
}

TEST(MomentumWeights, QuadraticIdentityOverRandomDraws) {
  Rng rng(1);
  const Vector x = Vector::Zero(1);
  for (int i = 0; i < 1000; ++i) {
    const double weight = std::exp(testing::uniform(rng, -10.0, 10.0));
    const double eta = std::exp(testing::uniform(rng, -10.0, 10.0));
    const double a = momentum_weights(weight, eta, x, x).a;
    EXPECT_NEAR(eta * (weight + a), a * a, 1e-12 * a * a);
  }
}

TEST(MomentumWeights, RejectsInvalidArguments) {
  const Vector x = Vector::Zero(1);
  EXPECT_THROW(momentum_weights(-1.0, 1.0, x, x), UsageError);
  EXPECT_THROW(momentum_weights(1.0, 0.0, x, x), UsageError);
}

TEST(Step, AcceptedFirstIteration) {
  Vector diag(3);
  diag << 1.0, 2.0, 3.0;
  const SymmetricMatrix q = SymmetricMatrix::diagonal(diag);
  Vector c(3);
  c << 0.5, -1.0, 2.0;
  const QuadraticObjective f(q, c);
  SolverConfig config;
  config.b0 = q;
  const double sigma0 = 0.4;
  Rng rng(2);
  const Vector x0 = testing::random_vector(rng, 3);
  const Vector z0 = testing::random_vector(rng, 3);
  const SolverState s0 = initial_state(x0, z0, 3.0, sigma0, config);
  Accounting acct;
  const CountingOracle counted(f, acct);
  const StepResult r = step(s0, counted, config.line_search());
  ASSERT_EQ(r.detail.step_case, StepCase::accepted);
  EXPECT_EQ(r.state.weight, sigma0);
  EXPECT_EQ(r.state.x, r.detail.x_hat);
  EXPECT_TRUE(r.state.z.isApprox(z0 - sigma0 * f.gradient(r.state.x), 1e-14));
  EXPECT_DOUBLE_EQ(r.state.eta, sigma0 / config.beta);
  EXPECT_EQ(r.state.b.dense(), q.dense());
  EXPECT_EQ(r.row.iter, 1u);
  EXPECT_EQ(r.row.step_case, StepCase::accepted);
  EXPECT_DOUBLE_EQ(r.row.f, f.value(r.state.x));
  // One gradient at y plus one trial.
  EXPECT_EQ(acct.gradient_queries(), 2u);
}

TEST(Step, DampedUpdateWithHalfStep) {
  // f = 0.75 ||x||^2 and B = 0: the step 1 trial fails, 1/2 passes.
  const QuadraticObjective f(1.5 * SymmetricMatrix::identity(2), Vector::Zero(2));
  SolverConfig config;
  config.b0 = SymmetricMatrix::zero(2);
  Vector x(2), z(2);
  x << 1.0, 0.5;
  z << -0.5, 2.0;
  SolverState s0 = initial_state(x, z, 1.5, 1.0, config);
  s0.weight = 2.0;
  s0.eta = 1.0;
  Accounting acct;
  const CountingOracle counted(f, acct);
  const StepResult r = step(s0, counted, config.line_search());
  ASSERT_EQ(r.detail.step_case, StepCase::backtracked);
  EXPECT_DOUBLE_EQ(r.detail.a, 2.0);
  EXPECT_DOUBLE_EQ(r.detail.eta_hat, 0.5);
  EXPECT_DOUBLE_EQ(r.detail.damping, 0.5);
  EXPECT_DOUBLE_EQ(r.state.weight, 3.0);
  EXPECT_TRUE(r.state.x.isApprox((x + 2.0 * r.detail.x_hat) / 3.0, 1e-14));
  EXPECT_TRUE(r.state.z.isApprox(z - 1.0 * f.gradient(r.detail.x_hat), 1e-14));
  EXPECT_EQ(r.state.eta, 0.5);
  ASSERT_TRUE(r.detail.learner.has_value());
  EXPECT_EQ(r.state.learner.t, 1u);
  const LossSample sample{*r.detail.grad_x_tilde - r.detail.grad_y,
                          *r.detail.x_tilde - r.detail.y};
  EXPECT_DOUBLE_EQ(r.detail.learner->loss, loss(s0.b, sample));
  // Gradient at y, then two trials; the learner spends none.
  EXPECT_EQ(acct.gradient_queries(), 3u);
}

TEST(Step, FirstWeightEqualsAcceptedStep) {
  const testing::LogisticProblem& p = testing::logistic_problem(200, 10, 4);
  Accounting acct;
  const CountingOracle counted(p.objective, acct);
  for (double sigma0 : {1e-3, 1.0, 1e3}) {
    SolverConfig config;
    const Vector zero = Vector::Zero(10);
    const SolverState s0 = initial_state(zero, zero, *p.objective.smoothness(), sigma0, config);
    const StepResult r = step(s0, counted, config.line_search());
    EXPECT_NEAR(r.state.weight, r.detail.eta_hat, 1e-15 * r.detail.eta_hat) << sigma0;
  }
}

TEST(Solve, QuadraticSatisfiesCertificate) {
  Rng rng(5);
  const Vector c = testing::random_vector(rng, 6);
  const QuadraticObjective f(SymmetricMatrix::identity(6), c);
  SolverConfig config;
  config.max_iters = 60;
  const testing::AuditedRun run = testing::audited_run(f, config);
  ASSERT_TRUE(run.record.ok());
  ASSERT_EQ(run.iterations.size(), 60u);
  for (const testing::IterationSnapshot& it : run.iterations) {
    const double gap = f.value(it.x_after);
    EXPECT_LE(gap, c.squaredNorm() / (2.0 * it.weight_after) * (1.0 + 1e-10));
  }
}

TEST(Solve, StationaryStartStaysPut) {
  Vector c(3);
  c << 1.0, 2.0, 3.0;
  const QuadraticObjective f(SymmetricMatrix::identity(3), c);
  SolverConfig config;
  config.max_iters = 1;
  const RunRecord rec = solve(f, c, c, config);
  ASSERT_TRUE(rec.ok());
  ASSERT_EQ(rec.rows.size(), 1u);
  EXPECT_EQ(rec.rows[0].f, 0.0);
  EXPECT_EQ(rec.rows[0].step_case, StepCase::accepted);
  EXPECT_GT(rec.rows[0].eta_hat, 0.0);
}

TEST(Solve, DeskRunInvariants) {
  const testing::AuditedRun& run = testing::desk_run();
  const testing::Reference& ref = testing::logistic_problem(500, 50, 0).reference;
  const double sigma = run.config.alpha1 + run.config.alpha2;
  const double beta = run.config.beta;
  const double r0 = ref.x.norm();  // z0 = 0
  double previous_weight = 0.0;
  double displacement = 0.0;
  double inverse_sq = 0.0;
  double fed_loss = 0.0;
  for (const testing::IterationSnapshot& it : run.iterations) {
    EXPECT_GE(it.weight_after, previous_weight);
    previous_weight = it.weight_after;
    EXPECT_LE((it.z_after - ref.x).norm(), r0 * (1.0 + 1e-9));
    EXPECT_LE((it.x_after - ref.x).norm(), std::sqrt(2.0 / (1.0 - sigma * sigma)) * r0);
    const StepDetail& d = it.detail;
    displacement += d.a * d.a / (d.eta * d.eta) * (d.x_hat - d.y).squaredNorm();
    inverse_sq += 1.0 / (d.eta_hat * d.eta_hat);
    if (d.learner) fed_loss += d.learner->loss;
    const double c = (2.0 - beta * beta) / (1.0 - beta * beta);
    const double step_bound =
        c / (run.sigma0 * run.sigma0) +
        c / (run.config.alpha2 * run.config.alpha2 * beta * beta) * fed_loss;
    EXPECT_LE(inverse_sq, step_bound * (1.0 + 1e-12)) << "k " << d.k;
    const Eigen::VectorXd ev = testing::eigenvalues(it.b_after.dense());
    EXPECT_GE(ev(0), -1e-8 * run.l1);
    EXPECT_LE(ev(ev.size() - 1), run.l1 * (1.0 + 1e-8));
  }
  EXPECT_LE(displacement, r0 * r0 / (1.0 - sigma * sigma) * (1.0 + 1e-9));
}

TEST(Solve, StopsAtTargetValue) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  SolverConfig config;
  config.max_iters = 2000;
  config.f_target = p.reference.f + 1e-4;
  const RunRecord rec = solve(p.objective, Vector::Zero(50), Vector::Zero(50), config);
  ASSERT_TRUE(rec.ok());
  EXPECT_EQ(rec.metadata.at("stop_reason"), "f_target");
  EXPECT_LE(rec.rows.back().f, *config.f_target);
  for (std::size_t k = 0; k + 1 < rec.rows.size(); ++k) EXPECT_GT(rec.rows[k].f, *config.f_target);
}

TEST(Solve, StopsAtGradientTolerance) {
  const testing::LogisticProblem& p = testing::logistic_problem(500, 50, 0);
  SolverConfig config;
  config.max_iters = 2000;
  config.tolerance = 1e-6;
  Vector last_x;
  const RunRecord rec = solve(
      p.objective, Vector::Zero(50), Vector::Zero(50), config,
      [&](const SolverState&, const StepDetail&, const SolverState& after) { last_x = after.x; });
  ASSERT_TRUE(rec.ok());
  EXPECT_EQ(rec.metadata.at("stop_reason"), "tolerance");
  EXPECT_LE(p.objective.gradient(last_x).norm(), 1e-6);
  EXPECT_LT(rec.rows.size(), 2000u);
}

TEST(Solve, InvalidConfigurationThrows) {
  const QuadraticObjective f(SymmetricMatrix::identity(2), Vector::Zero(2));
  const Vector x0 = Vector::Ones(2);
  SolverConfig config;
  config.alpha1 = 0.5;
  config.alpha2 = 0.5;
  EXPECT_THROW(solve(f, x0, x0, config), UsageError);
  config = SolverConfig{};
  config.sigma0 = -1.0;
  EXPECT_THROW(solve(f, x0, x0, config), UsageError);
  config = SolverConfig{};
  config.beta = 1.0;
  EXPECT_THROW(solve(f, x0, x0, config), UsageError);
  EXPECT_THROW(solve(f, Vector::Ones(3), Vector::Ones(3), SolverConfig{}), UsageError);
}

// Returns NaN gradients after a fixed number of calls.
class Poisoned final : public ObjectiveOracle {
 public:
  Poisoned(const ObjectiveOracle& inner, int healthy) : inner_(inner), healthy_(healthy) {}
  Index dimension() const override { return inner_.dimension(); }
  double value(const Vector& x) const override { return inner_.value(x); }
  Vector gradient(const Vector& x) const override {
    if (calls_++ >= healthy_) {
      return Vector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
    }
    return inner_.gradient(x);
  }
  std::optional<double> smoothness() const override { return inner_.smoothness(); }

 private:
  const ObjectiveOracle& inner_;
  int healthy_;
  mutable int calls_ = 0;
};

TEST(Solve, ErrorIsRecordedWithPartialTrace) {
  const testing::LogisticProblem& p = testing::logistic_problem(200, 10, 4);
  const Poisoned f(p.objective, 25);
  SolverConfig config;
  config.max_iters = 100;
  const RunRecord rec = solve(f, Vector::Zero(10), Vector::Zero(10), config);
  ASSERT_FALSE(rec.ok());
  EXPECT_EQ(rec.metadata.at("stop_reason"), "error");
  EXPECT_GT(rec.rows.size(), 0u);
  EXPECT_LT(rec.rows.size(), 25u);
}

TEST(Solve, SmoothnessFallsBackToEstimate) {
  const testing::LogisticProblem& p = testing::logistic_problem(200, 10, 4);
  const Poisoned f(p.objective, 1 << 30);
  SolverConfig config;
  config.max_iters = 5;
  EXPECT_EQ(solve(f, Vector::Zero(10), Vector::Zero(10), config).metadata.at("L1_source"),
            "oracle");
  struct NoSmoothness final : public ObjectiveOracle {
    explicit NoSmoothness(const ObjectiveOracle& f) : f(f) {}
    Index dimension() const override { return f.dimension(); }
    double value(const Vector& x) const override { return f.value(x); }
    Vector gradient(const Vector& x) const override { return f.gradient(x); }
    const ObjectiveOracle& f;
  };
  const RunRecord rec = solve(NoSmoothness(p.objective), Vector::Zero(10), Vector::Zero(10), config);
  EXPECT_EQ(rec.metadata.at("L1_source"), "estimate");
  EXPECT_TRUE(rec.ok());
}

}  // namespace
}  // namespace aqnpe

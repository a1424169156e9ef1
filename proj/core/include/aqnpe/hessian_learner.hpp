#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "aqnpe/core_types.hpp"
#include "aqnpe/sep_oracle.hpp"

namespace aqnpe {

/// Secant pair observed on a backtracked iteration: w = grad(x_tilde) -
/// grad(y), s = x_tilde - y.
struct LossSample {
  Vector w;
  Vector s;
};

/// ||w - B s||^2 / ||s||^2. Throws UsageError if s = 0 or sizes disagree.
double loss(const SymmetricMatrix& b, const LossSample& sample, Accounting* accounting = nullptr);

/// Gradient of loss() in B: -(s r^T + r s^T) / ||s||^2 with r = w - B s.
SymmetricMatrix loss_gradient(const SymmetricMatrix& b, const LossSample& sample,
                              Accounting* accounting = nullptr);

/// Threshold schedule delta_t = 1 / (sqrt(t+2) ln(t+2)), t >= 0.
double learner_delta(std::uint64_t t);
/// Failure-probability schedule q_t = p / (2.5 (t+1) ln^2(t+1)), t >= 1.
double learner_q(std::uint64_t t, double failure_budget);

struct LearnerConfig {
  double l1 = 1.0;                ///< smoothness constant; Z = {0 <= B <= L1 I}
  double rho = 1.0 / 128.0;       ///< online gradient step size
  double failure_budget = 0.01;   ///< p, split across separation calls
  std::uint64_t seed = 0;
};

/// Learner state between fed losses. `w` lives in the Frobenius ball of radius
/// sqrt(d); `b_hat` is the action in the unit operator-norm ball and `b` the
/// matrix handed to the solver, b = (L1/2)(b_hat + I).
struct LearnerState {
  SymmetricMatrix w;
  SymmetricMatrix b_hat;
  SymmetricMatrix b;
  SymmetricMatrix separator;  ///< S from the separation call that produced b_hat
  double gamma = 0.0;
  SepCase sep_case = SepCase::inside;
  std::uint64_t t = 0;  ///< number of losses fed so far
  LearnerConfig config;
  std::mt19937_64 rng;
};

/// Starts the learner at `b0` (default (L1/2) I, i.e. w = 0). The caller
/// guarantees 0 <= b0 <= L1 I; only ||w_0||_F <= sqrt(d) is checked here.
LearnerState make_learner_state(Index dim, const LearnerConfig& config,
                                const std::optional<SymmetricMatrix>& b0 = std::nullopt);

struct LearnerStepResult {
  LearnerState state;             ///< advanced state; state.b is the next matrix to use
  double loss = 0.0;              ///< loss of the matrix that was in use
  SymmetricMatrix gradient;       ///< G_t = (2/L1) grad loss(B_t)
  SymmetricMatrix surrogate;      ///< G_t plus the separation correction
  double surrogate_coefficient = 0.0;
  SepResult separation;           ///< call made for the next action
};

/// Feeds one loss to the learner. The gradient is taken at state.b (the matrix
/// the solver used), corrected with max{0, -<G_t, b_hat_t>} S_t when the
/// current action came from a separated call, then w takes a projected step.
/// A separation call at (delta_{t+1}, q_{t+1}) turns the new w into the next
/// action. The initial action (t = 0) never calls the oracle.
LearnerStepResult learner_step(const LearnerState& state, const LossSample& sample,
                               Accounting* accounting = nullptr);

inline SymmetricMatrix from_unit_ball(const SymmetricMatrix& b_hat, double l1) {
  return 0.5 * l1 * (b_hat + SymmetricMatrix::identity(b_hat.dim()));
}

inline SymmetricMatrix to_unit_ball(const SymmetricMatrix& b, double l1) {
  return (2.0 / l1) * (b - 0.5 * l1 * SymmetricMatrix::identity(b.dim()));
}

}  // namespace aqnpe

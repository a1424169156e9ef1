#include "aqnpe/hessian_learner.hpp"

#include <algorithm>
#include <cmath>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

void check_sample(const SymmetricMatrix& b, const LossSample& sample) {
  if (sample.s.size() != b.dim() || sample.w.size() != b.dim()) {
    throw UsageError("loss: sample dimension does not match B");
  }
  if (!(sample.s.squaredNorm() > 0.0)) throw UsageError("loss: displacement s must be nonzero");
}

}  // namespace

double loss(const SymmetricMatrix& b, const LossSample& sample, Accounting* accounting) {
  check_sample(b, sample);
  const Vector r = sample.w - matvec(b, sample.s, accounting, MatvecSource::learner);
  return r.squaredNorm() / sample.s.squaredNorm();
}

SymmetricMatrix loss_gradient(const SymmetricMatrix& b, const LossSample& sample,
                              Accounting* accounting) {
  check_sample(b, sample);
  const Vector r = sample.w - matvec(b, sample.s, accounting, MatvecSource::learner);
  const Eigen::MatrixXd outer = sample.s * r.transpose();
  return SymmetricMatrix(Eigen::MatrixXd(-(outer + outer.transpose()) / sample.s.squaredNorm()));
}

double learner_delta(std::uint64_t t) {
  const double u = double(t) + 2.0;
  return 1.0 / (std::sqrt(u) * std::log(u));
}

double learner_q(std::uint64_t t, double failure_budget) {
  if (t < 1) throw UsageError("learner_q: defined for t >= 1");
  const double u = double(t) + 1.0;
  const double lg = std::log(u);
  return failure_budget / (2.5 * u * lg * lg);
}

LearnerState make_learner_state(Index dim, const LearnerConfig& config,
                                const std::optional<SymmetricMatrix>& b0) {
  if (dim < 1) throw UsageError("make_learner_state: dimension must be >= 1");
  if (!(config.l1 > 0.0) || !std::isfinite(config.l1)) {
    throw UsageError("make_learner_state: L1 must be positive and finite");
  }
  if (!(config.rho > 0.0)) throw UsageError("make_learner_state: rho must be positive");
  if (!(config.failure_budget > 0.0 && config.failure_budget < 1.0)) {
    throw UsageError("make_learner_state: failure budget must lie in (0,1)");
  }

  LearnerState state;
  state.config = config;
  state.rng.seed(config.seed);
  if (b0) {
    if (b0->dim() != dim) throw UsageError("make_learner_state: B0 dimension mismatch");
    state.b = *b0;
    state.w = to_unit_ball(*b0, config.l1);
    if (state.w.frobenius_norm() > std::sqrt(double(dim)) * (1.0 + 1e-12)) {
      throw UsageError("make_learner_state: B0 lies outside {0 <= B <= L1 I}");
    }
  } else {
    state.b = 0.5 * config.l1 * SymmetricMatrix::identity(dim);
    state.w = SymmetricMatrix::zero(dim);
  }
  state.b_hat = state.w;
  state.separator = SymmetricMatrix::zero(dim);
  state.gamma = 0.0;
  state.sep_case = SepCase::inside;
  state.t = 0;
  return state;
}

LearnerStepResult learner_step(const LearnerState& state, const LossSample& sample,
                               Accounting* accounting) {
  const Index d = state.w.dim();
  const double l1 = state.config.l1;

  LearnerStepResult out;
  out.loss = loss(state.b, sample, accounting);
  out.gradient = (2.0 / l1) * loss_gradient(state.b, sample, accounting);
  out.surrogate = out.gradient;
  if (state.sep_case == SepCase::separated) {
    out.surrogate_coefficient = std::max(0.0, -frobenius_inner(out.gradient, state.b_hat));
    out.surrogate += out.surrogate_coefficient * state.separator;
  }

  LearnerState next = state;
  SymmetricMatrix moved = state.w - state.config.rho * out.surrogate;
  const double radius = std::sqrt(double(d));
  const double norm = moved.frobenius_norm();
  if (!std::isfinite(norm)) throw NumericError("learner_step: non-finite learner iterate");
  if (norm > radius) moved *= radius / norm;
  next.w = std::move(moved);
  next.t = state.t + 1;

  out.separation = sep(next.w, learner_delta(next.t), learner_q(next.t, state.config.failure_budget),
                       next.rng, accounting);
  next.sep_case = out.separation.which;
  next.gamma = out.separation.gamma;
  next.separator = out.separation.s;
  next.b_hat = next.sep_case == SepCase::inside ? next.w : (1.0 / next.gamma) * next.w;
  next.b = from_unit_ball(next.b_hat, l1);
  out.state = std::move(next);
  return out;
}

}  // namespace aqnpe

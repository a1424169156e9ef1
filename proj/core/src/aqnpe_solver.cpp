#include "aqnpe/aqnpe_solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr double kStallRatio = 1e-10;

}  // namespace

void SolverConfig::validate() const {
  line_search().validate();
  if (sigma0 && !(*sigma0 > 0.0 && std::isfinite(*sigma0))) {
    throw UsageError("solver: sigma0 must be positive and finite");
  }
  if (l1 && !(*l1 > 0.0 && std::isfinite(*l1))) {
    throw UsageError("solver: L1 must be positive and finite");
  }
  if (max_iters < 0) throw UsageError("solver: max_iters must be >= 0");
  if (!(tolerance >= 0.0)) throw UsageError("solver: tolerance must be >= 0");
  if (!(failure_budget > 0.0 && failure_budget < 1.0)) {
    throw UsageError("solver: failure budget must lie in (0,1)");
  }
  if (!(rho > 0.0)) throw UsageError("solver: rho must be positive");
  if (l1_probes < 1) throw UsageError("solver: l1_probes must be >= 1");
}

MomentumWeights momentum_weights(double weight, double eta, const Vector& x, const Vector& z) {
  if (!(weight >= 0.0)) throw UsageError("momentum_weights: A must be >= 0");
  if (!(eta > 0.0)) throw UsageError("momentum_weights: eta must be > 0");
  MomentumWeights out;
  out.a = 0.5 * (eta + std::sqrt(eta * eta + 4.0 * eta * weight));
  const double total = weight + out.a;
  out.y = (weight / total) * x + (out.a / total) * z;
  return out;
}

SolverState initial_state(const Vector& x0, const Vector& z0, double l1, double sigma0,
                          const SolverConfig& config) {
  if (x0.size() != z0.size()) throw UsageError("solver: x0 and z0 differ in size");
  SolverState state;
  state.x = x0;
  state.z = z0;
  state.weight = 0.0;
  state.eta = sigma0;
  state.k = 0;
  LearnerConfig lc;
  lc.l1 = l1;
  lc.rho = config.rho;
  lc.failure_budget = config.failure_budget;
  lc.seed = config.seed;
  state.learner = make_learner_state(x0.size(), lc, config.b0);
  state.b = state.learner.b;
  return state;
}

StepResult step(const SolverState& state, const CountingOracle& oracle,
                const LineSearchParams& params) {
  Accounting& accounting = oracle.accounting();
  StepResult out;
  StepDetail& detail = out.detail;
  detail.k = state.k;
  detail.eta = state.eta;

  MomentumWeights mw = momentum_weights(state.weight, state.eta, state.x, state.z);
  detail.a = mw.a;
  detail.y = std::move(mw.y);
  detail.grad_y = oracle.gradient(detail.y);

  LineSearchOutcome ls =
      backtracking_search(detail.y, detail.grad_y, state.b, state.eta, params, oracle);
  detail.eta_hat = ls.eta_hat;
  detail.backtracks = ls.backtracks;
  detail.linear_solver_iterations = ls.linear_solver_iterations;
  detail.x_hat = std::move(ls.x_hat);
  detail.grad_x_hat = std::move(ls.grad_at_x_hat);
  detail.x_tilde = std::move(ls.x_tilde);
  detail.grad_x_tilde = std::move(ls.grad_at_x_tilde);

  SolverState next = state;
  const double a = detail.a;
  const double weight = state.weight;
  if (detail.backtracks == 0) {
    detail.step_case = StepCase::accepted;
    detail.damping = 1.0;
    next.x = detail.x_hat;
    next.z = state.z - a * detail.grad_x_hat;
    next.weight = weight + a;
    next.eta = detail.eta_hat / params.beta;
  } else {
    detail.step_case = StepCase::backtracked;
    const double gamma = detail.eta_hat / state.eta;
    detail.damping = gamma;
    const double denom = weight + gamma * a;
    next.x = ((1.0 - gamma) * weight / denom) * state.x +
             (gamma * (weight + a) / denom) * detail.x_hat;
    next.z = state.z - (gamma * a) * detail.grad_x_hat;
    next.weight = denom;
    next.eta = detail.eta_hat;

    LossSample sample{*detail.grad_x_tilde - detail.grad_y, *detail.x_tilde - detail.y};
    detail.learner = learner_step(state.learner, sample, &accounting);
    next.learner = detail.learner->state;
    next.b = next.learner.b;
  }
  next.k = state.k + 1;
  if (!next.x.allFinite() || !next.z.allFinite() || !std::isfinite(next.weight)) {
    throw NumericError("solver: non-finite iterate at k = " + std::to_string(state.k));
  }

  detail.f_next = oracle.value(next.x);
  out.row.iter = next.k;
  out.row.f = detail.f_next;
  out.row.eta_hat = detail.eta_hat;
  out.row.step_case = detail.step_case;
  out.row.backtracks = detail.backtracks;
  out.row.grad_queries = accounting.gradient_queries();
  out.row.matvecs = accounting.matvecs();
  out.state = std::move(next);
  return out;
}

RunRecord solve(const ObjectiveOracle& oracle, const Vector& x0, const Vector& z0,
                const SolverConfig& config, const StepObserver& observer, Accounting* accounting) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (x0.size() != oracle.dimension() || z0.size() != oracle.dimension()) {
    throw UsageError("solver: starting points do not match the objective dimension");
  }

  Accounting local;
  Accounting& acct = accounting != nullptr ? *accounting : local;
  const CountingOracle counted(oracle, acct);

  double l1 = 0.0;
  std::string l1_source;
  if (config.l1) {
    l1 = *config.l1;
    l1_source = "config";
  } else if (auto known = oracle.smoothness()) {
    l1 = *known;
    l1_source = "oracle";
  } else {
    l1 = estimate_l1(oracle, config.l1_probes, config.seed);
    l1_source = "estimate";
  }
  const double sigma0 = config.sigma0.value_or(config.alpha2 / l1);
  const LineSearchParams params = config.line_search();

  RunRecord record;
  record.metadata["method"] = "aqnpe";
  record.metadata["alpha1"] = real_text(config.alpha1);
  record.metadata["alpha2"] = real_text(config.alpha2);
  record.metadata["beta"] = real_text(config.beta);
  record.metadata["sigma0"] = real_text(sigma0);
  record.metadata["L1"] = real_text(l1);
  record.metadata["L1_source"] = l1_source;
  record.metadata["rho"] = real_text(config.rho);
  record.metadata["failure_budget"] = real_text(config.failure_budget);
  record.metadata["max_iters"] = std::to_string(config.max_iters);
  record.metadata["tolerance"] = real_text(config.tolerance);
  record.metadata["seed"] = std::to_string(config.seed);

  std::string stop_reason = "max_iters";
  try {
    SolverState state = initial_state(x0, z0, l1, sigma0, config);
    double first_grad_norm = -1.0;
    double last_grad_norm = -1.0;
    for (int it = 0; it < config.max_iters; ++it) {
      StepResult result;
      try {
        result = step(state, counted, params);
      } catch (const ConfigurationError&) {
        // A collapsing step once the gradient is at rounding level means no
        // representable progress is left.
        if (last_grad_norm >= 0.0 && last_grad_norm <= kStallRatio * first_grad_norm) {
          stop_reason = "stalled";
          break;
        }
        throw;
      }
      last_grad_norm = result.detail.grad_y.norm();
      if (first_grad_norm < 0.0) first_grad_norm = last_grad_norm;
      if (observer) observer(state, result.detail, result.state);
      record.rows.push_back(result.row);
      const bool reached_target = config.f_target && result.row.f <= *config.f_target;
      const bool reached_tolerance = config.tolerance > 0.0 &&
                                     result.detail.step_case == StepCase::accepted &&
                                     result.detail.grad_x_hat.norm() <= config.tolerance;
      state = std::move(result.state);
      if (reached_target) {
        stop_reason = "f_target";
        break;
      }
      if (reached_tolerance) {
        stop_reason = "tolerance";
        break;
      }
    }
  } catch (const std::exception& e) {
    record.error = e.what();
    stop_reason = "error";
  }
  record.metadata["stop_reason"] = stop_reason;
  record.metadata["matvecs_linear_solver"] =
      std::to_string(acct.matvecs(MatvecSource::linear_solver));
  record.metadata["matvecs_separation_oracle"] =
      std::to_string(acct.matvecs(MatvecSource::separation_oracle));
  record.metadata["matvecs_learner"] = std::to_string(acct.matvecs(MatvecSource::learner));
  record.metadata["matvecs_line_search"] = std::to_string(acct.matvecs(MatvecSource::line_search));
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

}  // namespace aqnpe

#include "aqnpe/baselines.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "aqnpe/errors.hpp"

namespace aqnpe {

namespace {

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct TrialPoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // grad f(x + alpha p) . p
  Vector x;
  Vector g;
};

// Strong-Wolfe search along p (Nocedal & Wright, Algorithms 3.5 and 3.6). The
// sufficient-decrease test also admits the approximate Wolfe condition of
// Hager & Zhang once f differences sink to rounding level.
class WolfeSearch {
 public:
  WolfeSearch(const CountingOracle& oracle, const Vector& x, const Vector& p, double f0,
              double slope0, const BaselineConfig& config)
      : oracle_(oracle), x_(x), p_(p), f0_(f0), slope0_(slope0), config_(config) {}

  TrialPoint run(double alpha) {
    TrialPoint prev{0.0, f0_, slope0_, x_, Vector()};
    for (int i = 0; i < config_.max_zoom; ++i) {
      TrialPoint cur = evaluate(alpha);
      if (!sufficient(cur) || (i > 0 && cur.f >= prev.f)) return zoom(std::move(prev), std::move(cur));
      if (std::abs(cur.slope) <= -config_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev));
      prev = std::move(cur);
      alpha *= 2.0;
    }
    throw ConvergenceError("bfgs: no bracketing step found", x_);
  }

  int evaluations() const noexcept { return evaluations_; }

 private:
  TrialPoint evaluate(double alpha) {
    ++evaluations_;
    TrialPoint t;
    t.alpha = alpha;
    t.x = x_ + alpha * p_;
    t.f = oracle_.value(t.x);
    t.g = oracle_.gradient(t.x);
    t.slope = t.g.dot(p_);
    if (!std::isfinite(t.f) || !std::isfinite(t.slope)) {
      throw NumericError("bfgs: non-finite objective during line search");
    }
    return t;
  }

  bool sufficient(const TrialPoint& t) const {
    if (t.f <= f0_ + config_.c1 * t.alpha * slope0_) return true;
    return t.f <= f0_ + 1e-10 * std::abs(f0_) && t.slope <= (2.0 * config_.c1 - 1.0) * slope0_;
  }

  static double interpolate(const TrialPoint& lo, const TrialPoint& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double width = b - a;
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a - b);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    double trial = 0.5 * (a + b);
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), width);
      const double cubic = b - width * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
      if (std::isfinite(cubic)) trial = cubic;
    }
    const double lo_bound = std::min(a, b) + 0.1 * std::abs(width);
    const double hi_bound = std::max(a, b) - 0.1 * std::abs(width);
    if (trial < lo_bound || trial > hi_bound) trial = 0.5 * (a + b);
    return trial;
  }

  TrialPoint zoom(TrialPoint lo, TrialPoint hi) {
    for (int j = 0; j < config_.max_zoom; ++j) {
      TrialPoint cur = evaluate(interpolate(lo, hi));
      if (!sufficient(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -config_.c2 * slope0_) return cur;
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
      lo = std::move(cur);
    }
    // Sufficient decrease without the curvature condition still makes progress.
    if (lo.alpha > 0.0) return lo;
    throw ConvergenceError("bfgs: strong-Wolfe zoom failed after " +
                               std::to_string(config_.max_zoom) + " steps",
                           lo.x);
  }

  const CountingOracle& oracle_;
  const Vector& x_;
  const Vector& p_;
  double f0_;
  double slope0_;
  const BaselineConfig& config_;
  int evaluations_ = 0;
};

// Line-search failure once the gradient has dropped to rounding level is a
// normal stop, not an error.
constexpr double kStallRatio = 1e-10;

struct Stalled {};

bool is_stalled(double grad_norm, double initial_grad_norm) {
  return grad_norm <= kStallRatio * initial_grad_norm;
}

void fill_common_metadata(RunRecord& record, const BaselineConfig& config) {
  record.metadata["max_iters"] = std::to_string(config.max_iters);
  record.metadata["tolerance"] = real_text(config.tolerance);
}

}  // namespace

void BaselineConfig::validate() const {
  if (max_iters < 0) throw UsageError("baseline: max_iters must be >= 0");
  if (!(tolerance >= 0.0)) throw UsageError("baseline: tolerance must be >= 0");
  if (!(nag_initial_step > 0.0)) throw UsageError("baseline: NAG initial step must be > 0");
  if (!(nag_shrink > 0.0 && nag_shrink < 1.0)) {
    throw UsageError("baseline: NAG shrink factor must lie in (0,1)");
  }
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) throw UsageError("baseline: need 0 < c1 < c2 < 1");
  if (max_zoom < 1) throw UsageError("baseline: max_zoom must be >= 1");
}

RunRecord nag_solve(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& config,
                    Accounting* accounting) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (x0.size() != oracle.dimension()) throw UsageError("nag: x0 dimension mismatch");
  Accounting local;
  Accounting& acct = accounting != nullptr ? *accounting : local;
  const CountingOracle counted(oracle, acct);

  RunRecord record;
  record.metadata["method"] = "nag";
  record.metadata["initial_step"] = real_text(config.nag_initial_step);
  record.metadata["shrink"] = real_text(config.nag_shrink);
  fill_common_metadata(record, config);

  std::string stop_reason = "max_iters";
  try {
    Vector x = x0;
    Vector y = x0;
    double fx = counted.value(x);
    double t = 1.0;
    double eta = config.nag_initial_step;
    const double floor = 1e-20 * config.nag_initial_step;
    double g0_norm = -1.0;
    for (int k = 0; k < config.max_iters; ++k) {
      const Vector g = counted.gradient(y);
      if (g0_norm < 0.0) g0_norm = g.norm();
      const double fy = counted.value(y);
      const double g2 = g.squaredNorm();
      int backtracks = 0;
      Vector z = y - eta * g;
      double fz = counted.value(z);
      while (!(fz <= fy - 0.5 * eta * g2)) {
        eta *= config.nag_shrink;
        ++backtracks;
        if (eta < floor) {
          if (is_stalled(std::sqrt(g2), g0_norm)) throw Stalled{};
          throw ConvergenceError("nag: step size underflow", x);
        }
        z = y - eta * g;
        fz = counted.value(z);
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      Vector x_next = fz <= fx ? z : x;
      const double f_next = fz <= fx ? fz : fx;
      y = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
      x = std::move(x_next);
      fx = f_next;
      t = t_next;

      TraceRow row;
      row.iter = static_cast<std::uint64_t>(k) + 1;
      row.f = fx;
      row.eta_hat = eta;
      row.step_case = StepCase::none;
      row.backtracks = backtracks;
      row.grad_queries = acct.gradient_queries();
      row.matvecs = acct.matvecs();
      record.rows.push_back(row);

      if (config.f_target && fx <= *config.f_target) {
        stop_reason = "f_target";
        break;
      }
      if (config.tolerance > 0.0 && std::sqrt(g2) <= config.tolerance) {
        stop_reason = "tolerance";
        break;
      }
    }
  } catch (const Stalled&) {
    stop_reason = "stalled";
  } catch (const std::exception& e) {
    record.error = e.what();
    stop_reason = "error";
  }
  record.metadata["stop_reason"] = stop_reason;
  record.wall_seconds = seconds_since(started);
  return record;
}

SymmetricMatrix bfgs_inverse_update(const SymmetricMatrix& h, const Vector& s, const Vector& y,
                                    Accounting* accounting) {
  const double sy = s.dot(y);
  if (!(sy > 0.0)) throw UsageError("bfgs_inverse_update: curvature s^T y must be positive");
  const double rho = 1.0 / sy;
  const Vector hy = matvec(h, y, accounting, MatvecSource::other);
  const double yhy = y.dot(hy);
  const Eigen::MatrixXd cross = s * hy.transpose();
  Eigen::MatrixXd updated = h.dense() - rho * (cross + cross.transpose()) +
                            (rho * rho * yhy + rho) * (s * s.transpose());
  return SymmetricMatrix(updated);
}

RunRecord bfgs_solve(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& config,
                     Accounting* accounting) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (x0.size() != oracle.dimension()) throw UsageError("bfgs: x0 dimension mismatch");
  Accounting local;
  Accounting& acct = accounting != nullptr ? *accounting : local;
  const CountingOracle counted(oracle, acct);
  const Index d = x0.size();

  RunRecord record;
  record.metadata["method"] = "bfgs";
  record.metadata["c1"] = real_text(config.c1);
  record.metadata["c2"] = real_text(config.c2);
  fill_common_metadata(record, config);

  std::string stop_reason = "max_iters";
  try {
    Vector x = x0;
    double fx = counted.value(x);
    Vector g = counted.gradient(x);
    const double g0_norm = g.norm();
    SymmetricMatrix h = SymmetricMatrix::identity(d);
    bool scaled = false;
    if (g.norm() <= config.tolerance) {
      stop_reason = "tolerance";
    } else {
      for (int k = 0; k < config.max_iters; ++k) {
        Vector p = -matvec(h, g, &acct, MatvecSource::other);
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
          // Lost descent through rounding; restart from steepest descent.
          h = SymmetricMatrix::identity(d);
          scaled = false;
          p = -g;
          slope = -g.squaredNorm();
        }
        WolfeSearch search(counted, x, p, fx, slope, config);
        TrialPoint accepted;
        try {
          accepted = search.run(1.0);
        } catch (const ConvergenceError&) {
          if (is_stalled(g.norm(), g0_norm)) throw Stalled{};
          throw;
        }

        const Vector s = accepted.x - x;
        const Vector yv = accepted.g - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
          if (!scaled) {
            h = (sy / yv.squaredNorm()) * SymmetricMatrix::identity(d);
            scaled = true;
          }
          h = bfgs_inverse_update(h, s, yv, &acct);
        }
        x = std::move(accepted.x);
        g = std::move(accepted.g);
        fx = accepted.f;

        TraceRow row;
        row.iter = static_cast<std::uint64_t>(k) + 1;
        row.f = fx;
        row.eta_hat = accepted.alpha;
        row.step_case = StepCase::none;
        row.backtracks = search.evaluations() - 1;
        row.grad_queries = acct.gradient_queries();
        row.matvecs = acct.matvecs();
        record.rows.push_back(row);

        if (config.f_target && fx <= *config.f_target) {
          stop_reason = "f_target";
          break;
        }
        if (g.norm() <= config.tolerance) {
          stop_reason = "tolerance";
          break;
        }
      }
    }
  } catch (const Stalled&) {
    stop_reason = "stalled";
  } catch (const std::exception& e) {
    record.error = e.what();
    stop_reason = "error";
  }
  record.metadata["stop_reason"] = stop_reason;
  record.wall_seconds = seconds_since(started);
  return record;
}

}  // namespace aqnpe

#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace aqnpe {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Where a d x d matrix-vector product was spent. Used to audit the
/// per-component cost of a run.
enum class MatvecSource : std::uint8_t {
  linear_solver = 0,
  separation_oracle,
  learner,
  line_search,
  other,
};

inline constexpr std::size_t kMatvecSourceCount = 5;

/// Shared query accounting for one solver run. Every gradient query and every
/// d x d matvec in the stack is reported here. Not thread-safe: one instance
/// per executing run.
class Accounting {
 public:
  void add_gradient() noexcept { ++gradient_queries_; }
  void add_value() noexcept { ++value_queries_; }
  void add_matvecs(MatvecSource source, std::uint64_t count = 1) noexcept {
    matvecs_ += count;
    by_source_[static_cast<std::size_t>(source)] += count;
  }

  std::uint64_t gradient_queries() const noexcept { return gradient_queries_; }
  std::uint64_t value_queries() const noexcept { return value_queries_; }
  std::uint64_t matvecs() const noexcept { return matvecs_; }
  std::uint64_t matvecs(MatvecSource source) const noexcept {
    return by_source_[static_cast<std::size_t>(source)];
  }

  /// Sum of the per-source tallies; equals matvecs() by construction.
  std::uint64_t matvecs_by_source_total() const noexcept;

 private:
  std::uint64_t gradient_queries_ = 0;
  std::uint64_t value_queries_ = 0;
  std::uint64_t matvecs_ = 0;
  std::array<std::uint64_t, kMatvecSourceCount> by_source_{};
};

/// Dense symmetric d x d matrix. Every constructor and arithmetic result is
/// re-symmetrized as (M + M^T) / 2, which makes the stored entries exactly
/// symmetric since floating-point addition commutes.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Index dim);
  /// Throws UsageError if `m` is not square, NumericError if not finite.
  explicit SymmetricMatrix(const Eigen::MatrixXd& m);

  static SymmetricMatrix zero(Index dim) { return SymmetricMatrix(dim); }
  static SymmetricMatrix identity(Index dim);
  /// scale * u u^T
  static SymmetricMatrix rank_one(const Vector& u, double scale = 1.0);
  static SymmetricMatrix diagonal(const Vector& diag);

  Index dim() const noexcept { return entries_.rows(); }
  const Eigen::MatrixXd& dense() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  double frobenius_norm() const { return entries_.norm(); }
  bool is_finite() const { return entries_.allFinite(); }

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator-=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double scale);

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) {
    return a += b;
  }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) {
    return a -= b;
  }
  friend SymmetricMatrix operator*(SymmetricMatrix a, double s) { return a *= s; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }

 private:
  void symmetrize();

  Eigen::MatrixXd entries_;
};

/// trace(A^T B)
double frobenius_inner(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Returns M v and reports one matvec to `accounting` (if non-null) under
/// `source`. Throws UsageError on dimension mismatch.
Vector matvec(const SymmetricMatrix& m, const Vector& v, Accounting* accounting = nullptr,
              MatvecSource source = MatvecSource::other);

}  // namespace aqnpe

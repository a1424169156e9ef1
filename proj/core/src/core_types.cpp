#include "aqnpe/core_types.hpp"

#include <numeric>
#include <string>

#include "aqnpe/errors.hpp"

namespace aqnpe {

std::uint64_t Accounting::matvecs_by_source_total() const noexcept {
  return std::accumulate(by_source_.begin(), by_source_.end(), std::uint64_t{0});
}

SymmetricMatrix::SymmetricMatrix(Index dim) : entries_(Eigen::MatrixXd::Zero(dim, dim)) {}

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) : entries_(m) {
  if (m.rows() != m.cols()) {
    throw UsageError("SymmetricMatrix: expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw NumericError("SymmetricMatrix: non-finite entry");
  }
  symmetrize();
}

SymmetricMatrix SymmetricMatrix::identity(Index dim) {
  SymmetricMatrix out(dim);
  out.entries_.diagonal().setOnes();
  return out;
}

SymmetricMatrix SymmetricMatrix::rank_one(const Vector& u, double scale) {
  return SymmetricMatrix(Eigen::MatrixXd(scale * (u * u.transpose())));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& diag) {
  SymmetricMatrix out(diag.size());
  out.entries_.diagonal() = diag;
  return out;
}

void SymmetricMatrix::symmetrize() {
  // (a + b) * 0.5 and (b + a) * 0.5 are bit-identical.
  Eigen::MatrixXd sym = (entries_ + entries_.transpose()) * 0.5;
  entries_ = std::move(sym);
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  if (other.dim() != dim()) throw UsageError("SymmetricMatrix +=: dimension mismatch");
  entries_ += other.entries_;
  symmetrize();
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) {
  if (other.dim() != dim()) throw UsageError("SymmetricMatrix -=: dimension mismatch");
  entries_ -= other.entries_;
  symmetrize();
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double scale) {
  entries_ *= scale;
  symmetrize();
  return *this;
}

double frobenius_inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw UsageError("frobenius_inner: dimension mismatch");
  return a.dense().cwiseProduct(b.dense()).sum();
}

Vector matvec(const SymmetricMatrix& m, const Vector& v, Accounting* accounting,
              MatvecSource source) {
  if (m.dim() != v.size()) {
    throw UsageError("matvec: matrix is " + std::to_string(m.dim()) + "x" +
                     std::to_string(m.dim()) + " but vector has length " +
                     std::to_string(v.size()));
  }
  if (accounting != nullptr) accounting->add_matvecs(source);
  // Column-ordered accumulation: y_i = sum_j m_ij v_j summed in increasing j,
  // the same order as a naive row dot product.
  Vector y = Vector::Zero(v.size());
  for (Index j = 0; j < v.size(); ++j) y += m.dense().col(j) * v(j);
  return y;
}

}  // namespace aqnpe

#pragma once

#include <cstdint>
#include <random>

#include "aqnpe/core_types.hpp"

namespace aqnpe {

/// Extreme Ritz pairs from a randomly started Lanczos run.
struct LanczosExtremes {
  Vector u_max;       ///< unit vector, Ritz vector of the largest Ritz value
  double lambda_max;  ///< <W u_max, u_max>
  Vector u_min;       ///< unit vector, Ritz vector of the smallest Ritz value
  double lambda_min;  ///< <W u_min, u_min>
  int steps = 0;      ///< Lanczos steps actually taken (< requested on breakdown)
};

/// Lanczos with full reorthogonalization from a start drawn uniformly on the
/// unit sphere (normalized standard Gaussian). A Krylov breakdown
/// (beta_j < 1e-14) truncates the run; the returned Rayleigh quotients stay
/// valid. Costs `steps + 2` matvecs, reported under separation_oracle.
LanczosExtremes lanczos_extreme(const SymmetricMatrix& w, int iterations, std::mt19937_64& rng,
                                Accounting* accounting = nullptr);
LanczosExtremes lanczos_extreme(const SymmetricMatrix& w, int iterations, std::uint64_t seed,
                                Accounting* accounting = nullptr);

enum class SepCase : std::uint8_t { inside, separated };

/// Which exit of the separation oracle produced the answer.
enum class SepBranch : std::uint8_t {
  small,       ///< first-pass estimate <= 1/2
  large,       ///< first-pass estimate >= 2, S = +-3 u u^T
  refined_in,  ///< refined estimate <= 1 - delta
  refined_out  ///< refined estimate > 1 - delta, S = +-u u^T
};

struct SepResult {
  double gamma = 0.0;
  SymmetricMatrix s;
  SepCase which = SepCase::inside;
  SepBranch branch = SepBranch::small;
};

/// Lanczos step counts used by the oracle:
/// first pass min(ceil(log(11d/q^2) + 1/2), d), refinement
/// min(ceil(log(11d/q^2) / sqrt(2 delta) + 1/2), d), the count that resolves
/// the extreme eigenvalues to delta/8 of the spectral spread.
int sep_first_pass_steps(Index dim, double q);
int sep_refine_steps(Index dim, double delta, double q);

/// Approximate separation oracle for the operator-norm unit ball. Either
/// certifies ||W||_op <= 1 (gamma <= 1, S = 0) or returns gamma > 1 with
/// ||W / gamma||_op <= 1 and a rank-one S with
/// <S, W - B> >= gamma - 1 - delta for every ||B||_op <= 1, each with
/// probability at least 1 - q. Ties lambda_1 = -lambda_d pick the +u u^T side.
/// Throws UsageError for delta <= 0 or q outside (0,1).
SepResult sep(const SymmetricMatrix& w, double delta, double q, std::mt19937_64& rng,
              Accounting* accounting = nullptr);
SepResult sep(const SymmetricMatrix& w, double delta, double q, std::uint64_t seed,
              Accounting* accounting = nullptr);

}  // namespace aqnpe

#pragma once

// Finite Markov chain with transition costs and the multiplicative matrix
// C o P built from it.

#include <cstddef>

#include "riskbound/spectral.hpp"

namespace riskbound {

struct ChainValidationReport {
  bool square = true;
  bool row_stochastic = false;
  bool irreducible = false;
  bool aperiodic = false;
  bool strictly_positive = false;
  std::size_t period = 0;  ///< 0 when the chain is reducible

  /// The chain meets the evaluation hypotheses (stochastic, irreducible,
  /// aperiodic). Strict positivity is only needed by some bounds.
  bool valid() const { return row_stochastic && irreducible && aperiodic; }
};

/// Checks P for the evaluation hypotheses. Pure; never throws for square
/// finite input. Throws DimensionError for non-square input and DomainError
/// for non-finite entries.
ChainValidationReport validate_chain(const Matrix& p);

/// Transition matrix P, cost matrix c(i,j) and the reference state i0
/// (zero-based here; the JSON document is one-based).
struct ChainSpec {
  Matrix p;
  Matrix c;
  std::size_t i0 = 0;

  std::size_t size() const { return static_cast<std::size_t>(p.rows()); }

  /// Shape and finiteness checks only; see validate_chain for the rest.
  static ChainSpec create(Matrix p, Matrix c, std::size_t i0);
};

/// Throws StructureError naming the first failed flag unless the chain is
/// valid.
void require_valid(const ChainSpec& chain);

struct StationaryDistribution {
  Vector pi;
  double residual = 0.0;  ///< || pi^T P - pi^T ||_1

  Matrix d() const { return pi.asDiagonal(); }
};

/// Stationary distribution by power iteration on P^T (l1 step tolerance
/// 1e-12, cap 10^6). Falls back to a dense linear solve for s <= 64 when the
/// iteration does not converge. Throws NumericalError otherwise.
StationaryDistribution stationary_distribution(const ChainSpec& chain);
StationaryDistribution stationary_distribution(const Matrix& p);

/// gamma_ij = exp(c(i,j)) p(j|i).
struct MultiplicativeMatrix {
  Matrix entries;
  bool positive = false;
};

/// Largest accepted cost entry; exp(700) is still finite in double.
inline constexpr double kMaxCost = 700.0;

/// Throws RangeError if any cost exceeds kMaxCost.
MultiplicativeMatrix multiplicative_matrix(const ChainSpec& chain);

/// State of maximal stationary mass, lowest index on ties.
std::size_t default_reference_state(const StationaryDistribution& pi);

}  // namespace riskbound

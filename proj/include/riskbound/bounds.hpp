#pragma once

// Error between the exact risk-sensitive cost ln(lambda) and its
// approximation ln(mu), together with every upper bound on ln(lambda/mu),
// their validity conditions and the orderings between them.
//
// Generic routines take a pair (A, B) of nonnegative matrices with Perron
// values lambda = r(A) and mu = r(B). In the reinforcement-learning
// instantiation A = C o P and B = Q = Pi (C o P).

#include <optional>
#include <string>
#include <vector>

#include "riskbound/approximation.hpp"
#include "riskbound/spectral.hpp"

namespace riskbound {

/// ln(lambda) - ln(mu). Throws DomainError unless both are positive.
double actual_error(double lambda, double mu);

/// ln(1 + (||A|| + ||B||)^(1 - 1/s) ||A - B||^(1/s) / mu) with the
/// l1-induced norm. Matrix-generic, so it ignores the Perron structure.
double spectral_variation_bound(const Matrix& a, const Matrix& b, double mu);

/// sum_ij (a_ij x_i y_j / r(A)) ln(a_ij / b_ij), the log of Bapat's product
/// bound on r(A)/r(B). perron must belong to A and be biorthogonal.
/// Terms with a_ij = 0 vanish. Throws DomainError naming the entry when
/// b_ij < 0, or when b_ij = 0 while a_ij > 0.
double bapat_ratio_bound(const Matrix& a, const Matrix& b, const PerronPair& perron);

/// L = sum_i x_i y_i (a_ii - b_ii) + sum_{i != j} a_ij x_i y_j ln(a_ij / b_ij)
/// with <x, y> = 1. Same zero conventions as bapat_ratio_bound.
double lindqvist_quantity(const Matrix& a, const Matrix& b, const Vector& x,
                          const Vector& y);

struct LindqvistLower {
  bool valid = false;  ///< r(A) > L
  std::optional<double> value;  ///< ln r(A) - ln(r(A) - L) when valid
};

LindqvistLower lindqvist_lower_bound(double perron_value, double l);

/// ln(1 + L / mu). Throws DomainError when 1 + L/mu <= 0.
double lindqvist_additive_bound(double mu, double l);

struct OperatorNormBound {
  double value = 0.0;
  double alpha = 0.0;            ///< max_i 1 / x_i, x the unit-l1 left Perron vector of A
  double norm_difference = 0.0;  ///< ||A - B||
};

/// ln(1 + alpha(A^T) ||A - B|| / mu). A must be nonnegative and irreducible
/// (StructureError otherwise); B may be arbitrary.
OperatorNormBound operator_norm_bound(const Matrix& a, const Matrix& b, double mu);

/// Diagnostic for |lambda - mu| <= ||A - B||, an inequality that is only
/// guaranteed for normal A. Computed with the l1-induced norm.
struct NormalMatrixGap {
  double value = 0.0;      ///< ||A - B||
  bool normal = false;     ///< A A^T = A^T A within 1e-10
  double eigen_gap = 0.0;  ///< |r(A) - r(B)|, spectral radii of nonnegative A, B
  bool holds = false;      ///< eigen_gap <= value
};

NormalMatrixGap normal_matrix_gap(const Matrix& a, const Matrix& b);

/// Necessary and sufficient validity condition of the Lindqvist lower bound:
/// r(A) > L, paired with the always-true bracket min_i sum_j a_ij <= r(A).
struct LindqvistValidity {
  bool holds = false;
  bool l_clause = false;
  bool row_sum_clause = false;
  double l = 0.0;
  double perron_value = 0.0;
  double min_row_sum = 0.0;
};

LindqvistValidity check_lindqvist_validity(const Matrix& a, const Matrix& b,
                                           const Vector& x, const Vector& y,
                                           double perron_value);

/// Entrywise conditions of the reinforcement-learning instantiation
/// (A = gamma, B = delta under one-positive-entry-per-row features).
struct RlConditions {
  /// min_i sum_j gamma_ij > L evaluated from chain quantities; sufficient
  /// for the Lindqvist lower bound to be valid.
  bool expanded_validity = false;
  /// delta_ii = gamma_ii for every i, written in chain quantities.
  bool diagonal_match = false;
  /// delta_ij = gamma_ij for every i != j, written in chain quantities.
  bool off_diagonal_match = false;
  /// Some i with gamma_ii > max_{l != i} gamma_li.
  bool dominant_diagonal = false;
  /// Some i with gamma_ii < min_{l != i} gamma_li.
  bool recessive_diagonal = false;
  /// For every column j some i has delta_ij > gamma_ij (reported only).
  bool every_column_has_excess = false;
  double min_row_sum = 0.0;
  double expanded_l = 0.0;
};

/// Requires star features and a strictly positive P (PreconditionError).
RlConditions check_rl_conditions(const ChainSpec& chain, const FeatureMatrix& phi,
                                 const ProjectedSystem& system);

/// Bounds written directly in chain quantities (costs, transition
/// probabilities, features, stationary masses), without forming Q. They
/// coincide with the generic forms at A = gamma, B = delta and serve as an
/// independent evaluation route.
struct ExpandedBounds {
  double ratio = 0.0;
  double l = 0.0;
  LindqvistLower lower;
  double additive = 0.0;
};

/// perron: biorthogonal Perron pair of gamma. Requires star features and a
/// strictly positive P.
ExpandedBounds expanded_rl_bounds(const ChainSpec& chain, const FeatureMatrix& phi,
                                  const StationaryDistribution& pi,
                                  const PerronPair& perron, double mu);

/// Hypotheses under which one bound is known to dominate another.
struct ComparisonHypotheses {
  /// b_ii = a_ii for all i: the ratio bound beats the Lindqvist lower bound.
  bool diagonal_match = false;
  /// b_ij = a_ij off the diagonal and some diagonal entry differs: the
  /// Lindqvist lower bound beats the ratio bound.
  bool off_diagonal_match = false;
};

/// Hypotheses read off the matrices themselves (relative tolerance 1e-12).
ComparisonHypotheses structural_hypotheses(const Matrix& a, const Matrix& b);

/// Hypotheses from the chain-level conditions: diagonal_match, and
/// off_diagonal_match together with a dominant or recessive diagonal.
ComparisonHypotheses hypotheses_from(const RlConditions& conditions);

struct Verdict {
  bool applicable = false;
  bool holds = false;
  double margin = 0.0;  ///< positive when the claimed ordering holds strictly
};

struct OrderingVerdicts {
  Verdict additive_below_lower;  ///< always, whenever the lower bound is valid
  Verdict ratio_below_lower;     ///< under diagonal_match
  Verdict lower_below_ratio;     ///< under off_diagonal_match
};

enum class Direction { kLambdaGreater, kMuGreater, kEqual };

const char* to_string(Direction d);

/// A bound value with its applicability.
struct BoundValue {
  std::optional<double> value;
  bool valid = false;
  std::string note;  ///< why the bound is absent or invalid
};

struct BoundReport {
  double lambda = 0.0;
  double mu = 0.0;
  Direction direction = Direction::kEqual;
  /// When mu > lambda every bound is evaluated with A and B exchanged and
  /// bounds ln(mu / lambda) instead.
  bool swapped = false;
  std::optional<double> actual;  ///< ln(lambda / mu), signed
  std::optional<double> bounded_gap;  ///< |actual|, the quantity the bounds bound

  double norm_a = 0.0;
  double norm_b = 0.0;
  double norm_difference = 0.0;

  BoundValue spectral_variation;
  BoundValue bapat_ratio;
  std::optional<double> l;
  BoundValue lindqvist_lower;
  BoundValue lindqvist_additive;
  BoundValue operator_norm;
  std::optional<double> alpha;
  NormalMatrixGap normal_matrix;
  std::optional<LindqvistValidity> validity;
  OrderingVerdicts orderings;
  std::vector<std::string> warnings;
};

OrderingVerdicts compare_bounds(const BoundReport& report,
                                const ComparisonHypotheses& hypotheses);

/// Every bound for the pair (A, B). Inapplicable bounds are flagged, not
/// thrown. When hypotheses is empty, structural_hypotheses(A, B) is used.
BoundReport bound_report(const Matrix& a, const Matrix& b,
                         std::optional<ComparisonHypotheses> hypotheses = {});

/// Conditions under which delta != gamma still gives mu = lambda:
/// (1) delta_ij = lambda0 gamma_ij beta_i / beta_j for positive lambda0, beta;
/// (2) sum_ij gamma_ij x_i y_j (ln delta_ij - ln gamma_ij) = 0.
struct ZeroErrorCertificate {
  struct Similarity {
    bool holds = false;
    double lambda0 = 0.0;
    Vector beta;
    double residual = 0.0;  ///< max relative entry mismatch
  } similarity;
  struct LogBalance {
    bool holds = false;
    double value = 0.0;
  } log_balance;
  bool certified = false;
  double relative_gap = 0.0;  ///< |r(gamma) - r(delta)| / r(gamma)
};

/// x, y: Perron vectors of gamma with <x, y> = 1. Throws DomainError when
/// gamma or delta has a nonpositive entry, and NumericalError if a certified
/// pair nonetheless shows |lambda - mu| / lambda > 1e-8.
ZeroErrorCertificate zero_error_certificate(const Matrix& gamma, const Matrix& delta,
                                            const Vector& x, const Vector& y);

}  // namespace riskbound

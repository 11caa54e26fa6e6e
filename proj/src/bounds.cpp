#include "riskbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riskbound/errors.hpp"

namespace riskbound {

namespace {

constexpr double kOrderingTolerance = 1e-12;
constexpr double kConditionTolerance = 1e-9;

void require_same_square(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() ||
      a.rows() == 0) {
    throw DimensionError(std::string(who) + ": A and B must be square of equal size");
  }
}

// a * ln(a / b) with the conventions shared by the Bapat and Lindqvist
// forms: zero when a = 0, an error when b <= 0 < a or b < 0.
double entropy_term(double a, double b, Eigen::Index i, Eigen::Index j,
                    const char* who) {
  if (b < 0.0 || (a > 0.0 && b == 0.0)) {
    std::ostringstream os;
    os << who << ": entry (" << i << ',' << j << ") of B is " << b
       << " where A is " << a << "; bound inapplicable";
    throw DomainError(os.str());
  }
  if (a == 0.0) return 0.0;
  return a * (std::log(a) - std::log(b));
}

bool nearly_equal(double lhs, double rhs, double scale) {
  return std::abs(lhs - rhs) <= kConditionTolerance * std::max(scale, 1e-300);
}

Verdict make_verdict(bool applicable, double margin, double scale) {
  Verdict v;
  v.applicable = applicable;
  if (applicable) {
    v.margin = margin;
    v.holds = margin >= -kOrderingTolerance * std::max(1.0, scale);
  }
  return v;
}

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kLambdaGreater:
      return "lambda_greater";
    case Direction::kMuGreater:
      return "mu_greater";
    case Direction::kEqual:
      return "equal";
  }
  return "unknown";
}

double actual_error(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0)) {
    throw DomainError("actual_error: lambda and mu must be positive");
  }
  return std::log(lambda) - std::log(mu);
}

double spectral_variation_bound(const Matrix& a, const Matrix& b, double mu) {
  require_same_square(a, b, "spectral_variation_bound");
  if (!(mu > 0.0)) {
    throw DomainError("spectral_variation_bound: mu must be positive");
  }
  const double s = static_cast<double>(a.rows());
  const double sum = induced_one_norm(a) + induced_one_norm(b);
  const double diff = induced_one_norm(a - b);
  if (diff == 0.0) return 0.0;
  const double log_term = (1.0 - 1.0 / s) * std::log(sum) + std::log(diff) / s;
  return std::log1p(std::exp(log_term - std::log(mu)));
}

double bapat_ratio_bound(const Matrix& a, const Matrix& b, const PerronPair& perron) {
  require_same_square(a, b, "bapat_ratio_bound");
  if (perron.normalization != Normalization::kBiorthogonal) {
    throw PreconditionError("bapat_ratio_bound: Perron pair must be biorthogonal");
  }
  if (!(perron.value > 0.0)) {
    throw DomainError("bapat_ratio_bound: Perron value must be positive");
  }
  const Vector& x = perron.left;
  const Vector& y = perron.right;
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      total += x(i) * y(j) * entropy_term(a(i, j), b(i, j), i, j, "bapat_ratio_bound");
    }
  }
  return total / perron.value;
}

double lindqvist_quantity(const Matrix& a, const Matrix& b, const Vector& x,
                          const Vector& y) {
  require_same_square(a, b, "lindqvist_quantity");
  double l = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j) {
        l += x(i) * y(i) * (a(i, i) - b(i, i));
      } else {
        l += x(i) * y(j) * entropy_term(a(i, j), b(i, j), i, j, "lindqvist_quantity");
      }
    }
  }
  return l;
}

LindqvistLower lindqvist_lower_bound(double perron_value, double l) {
  LindqvistLower out;
  out.valid = perron_value > l;
  if (out.valid) {
    out.value = std::log(perron_value) - std::log(perron_value - l);
  }
  return out;
}

double lindqvist_additive_bound(double mu, double l) {
  if (!(mu > 0.0)) {
    throw DomainError("lindqvist_additive_bound: mu must be positive");
  }
  const double ratio = l / mu;
  if (!(1.0 + ratio > 0.0)) {
    throw DomainError("lindqvist_additive_bound: 1 + L/mu must be positive");
  }
  return std::log1p(ratio);
}

OperatorNormBound operator_norm_bound(const Matrix& a, const Matrix& b, double mu) {
  require_same_square(a, b, "operator_norm_bound");
  if (!(mu > 0.0)) {
    throw DomainError("operator_norm_bound: mu must be positive");
  }
  // Perron vector of A^T is the left Perron vector of A.
  const auto [value, x] = perron_right(a.transpose());
  (void)value;
  OperatorNormBound out;
  out.alpha = x.cwiseInverse().maxCoeff();
  out.norm_difference = induced_one_norm(a - b);
  out.value = std::log1p(out.alpha * out.norm_difference / mu);
  return out;
}

NormalMatrixGap normal_matrix_gap(const Matrix& a, const Matrix& b) {
  require_same_square(a, b, "normal_matrix_gap");
  NormalMatrixGap gap;
  gap.value = induced_one_norm(a - b);
  const Matrix commutator = a * a.transpose() - a.transpose() * a;
  gap.normal = commutator.cwiseAbs().maxCoeff() <= 1e-10;
  gap.eigen_gap = std::abs(spectral_radius(a) - spectral_radius(b));
  gap.holds = gap.eigen_gap <= gap.value;
  return gap;
}

LindqvistValidity check_lindqvist_validity(const Matrix& a, const Matrix& b,
                                           const Vector& x, const Vector& y,
                                           double perron_value) {
  LindqvistValidity v;
  v.l = lindqvist_quantity(a, b, x, y);
  v.perron_value = perron_value;
  v.min_row_sum = a.rowwise().sum().minCoeff();
  v.l_clause = perron_value > v.l;
  // Perron bracketing makes this automatic; a failure means the Perron value
  // is wrong, and it is surfaced through the flag.
  v.row_sum_clause = v.min_row_sum <= perron_value * (1.0 + 1e-12);
  v.holds = v.l_clause && v.row_sum_clause;
  return v;
}

namespace {

struct FeatureSums {
  Vector weight;  // per column k: sum_m phi_k(m)^2 pi_m
  Matrix mixture;  // (k, j): sum_l phi_k(l) pi_l gamma_lj
};

void require_rl_setting(const ChainSpec& chain, const FeatureMatrix& phi,
                        const char* who) {
  if (!phi.flags().star) {
    throw PreconditionError(std::string(who) +
                            ": features must have one positive entry per row");
  }
  if (!(chain.p.minCoeff() > 0.0)) {
    throw PreconditionError(std::string(who) + ": transition matrix must be positive");
  }
  if (phi.states() != chain.size()) {
    throw DimensionError(std::string(who) + ": Phi rows must match the state count");
  }
}

// gamma_lj = exp(c(l,j)) p(j|l), computed here from the chain itself.
FeatureSums feature_sums(const ChainSpec& chain, const FeatureMatrix& features,
                         const Vector& pi) {
  const Matrix& phi = features.phi();
  const Eigen::Index s = chain.p.rows();
  FeatureSums sums;
  sums.weight.resize(phi.cols());
  sums.mixture.resize(phi.cols(), s);
  for (Eigen::Index k = 0; k < phi.cols(); ++k) {
    double w = 0.0;
    for (Eigen::Index m = 0; m < s; ++m) w += phi(m, k) * phi(m, k) * pi(m);
    sums.weight(k) = w;
    for (Eigen::Index j = 0; j < s; ++j) {
      double acc = 0.0;
      for (Eigen::Index l = 0; l < s; ++l) {
        acc += phi(l, k) * pi(l) * std::exp(chain.c(l, j)) * chain.p(l, j);
      }
      sums.mixture(k, j) = acc;
    }
  }
  return sums;
}

}  // namespace

ExpandedBounds expanded_rl_bounds(const ChainSpec& chain, const FeatureMatrix& features,
                                  const StationaryDistribution& pi,
                                  const PerronPair& perron, double mu) {
  require_rl_setting(chain, features, "expanded_rl_bounds");
  if (perron.normalization != Normalization::kBiorthogonal) {
    throw PreconditionError("expanded_rl_bounds: Perron pair must be biorthogonal");
  }
  const Matrix& phi = features.phi();
  const Eigen::Index s = chain.p.rows();
  const FeatureSums sums = feature_sums(chain, features, pi.pi);
  const Vector& x = perron.left;
  const Vector& y = perron.right;
  const double lambda = perron.value;

  double ratio = 0.0;
  double l = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto k = static_cast<Eigen::Index>(features.active_column(static_cast<std::size_t>(i)));
    const double phi_i = phi(i, k);
    for (Eigen::Index j = 0; j < s; ++j) {
      const double cost = chain.c(i, j);
      const double prob = chain.p(i, j);
      const double g = std::exp(cost) * prob;
      const double log_ratio = cost + std::log(prob) - std::log(phi_i) -
                               std::log(sums.mixture(k, j)) + std::log(sums.weight(k));
      ratio += g * x(i) * y(j) * log_ratio;
      if (i == j) {
        l += x(i) * y(i) * (g - phi_i * sums.mixture(k, i) / sums.weight(k));
      } else {
        l += g * x(i) * y(j) *
             (cost + std::log(prob) + std::log(sums.weight(k) / sums.mixture(k, j)) -
              std::log(phi_i));
      }
    }
  }
  ExpandedBounds out;
  out.ratio = ratio / lambda;
  out.l = l;
  out.lower = lindqvist_lower_bound(lambda, l);
  out.additive = lindqvist_additive_bound(mu, l);
  return out;
}

RlConditions check_rl_conditions(const ChainSpec& chain, const FeatureMatrix& features,
                                 const ProjectedSystem& system) {
  require_rl_setting(chain, features, "check_rl_conditions");
  const Matrix& phi = features.phi();
  const Vector& pi = system.pi.pi;
  const Eigen::Index s = chain.p.rows();
  const Matrix gamma = chain.c.array().exp() * chain.p.array();
  const FeatureSums sums = feature_sums(chain, features, pi);

  RlConditions out;
  out.diagonal_match = true;
  out.off_diagonal_match = true;
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto k = static_cast<Eigen::Index>(features.active_column(static_cast<std::size_t>(i)));
    const double phi_i = phi(i, k);
    const double rest_weight = sums.weight(k) - phi_i * phi_i * pi(i);
    for (Eigen::Index j = 0; j < s; ++j) {
      double others = 0.0;
      for (Eigen::Index l = 0; l < s; ++l) {
        if (l != i) others += phi(l, k) * pi(l) * gamma(l, j);
      }
      const double lhs = gamma(i, j) * rest_weight;
      const double rhs = phi_i * others;
      const bool match = nearly_equal(lhs, rhs, gamma(i, j) * sums.weight(k));
      if (i == j) {
        out.diagonal_match = out.diagonal_match && match;
      } else {
        out.off_diagonal_match = out.off_diagonal_match && match;
      }
    }

    double col_max = -std::numeric_limits<double>::infinity();
    double col_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < s; ++l) {
      if (l == i) continue;
      col_max = std::max(col_max, gamma(l, i));
      col_min = std::min(col_min, gamma(l, i));
    }
    out.dominant_diagonal = out.dominant_diagonal || gamma(i, i) > col_max;
    out.recessive_diagonal = out.recessive_diagonal || gamma(i, i) < col_min;
  }

  out.every_column_has_excess = true;
  for (Eigen::Index j = 0; j < s; ++j) {
    bool excess = false;
    for (Eigen::Index i = 0; i < s && !excess; ++i) {
      excess = system.q(i, j) > gamma(i, j);
    }
    out.every_column_has_excess = out.every_column_has_excess && excess;
  }

  const PerronPair perron = perron_pair(gamma, Normalization::kBiorthogonal);
  const ExpandedBounds expanded =
      expanded_rl_bounds(chain, features, system.pi, perron, system.mu);
  out.expanded_l = expanded.l;
  out.min_row_sum = gamma.rowwise().sum().minCoeff();
  out.expanded_validity = out.min_row_sum > out.expanded_l;
  return out;
}

ComparisonHypotheses structural_hypotheses(const Matrix& a, const Matrix& b) {
  require_same_square(a, b, "structural_hypotheses");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * std::max(scale, 1e-300);
  bool diagonal = true;
  bool off_diagonal = true;
  bool nonzero_b_diagonal = true;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const bool equal = std::abs(a(i, j) - b(i, j)) <= tol;
      if (i == j) {
        diagonal = diagonal && equal;
        nonzero_b_diagonal = nonzero_b_diagonal && b(i, i) != 0.0;
      } else {
        off_diagonal = off_diagonal && equal;
      }
    }
  }
  ComparisonHypotheses h;
  h.diagonal_match = diagonal;
  h.off_diagonal_match = off_diagonal && !diagonal && nonzero_b_diagonal;
  return h;
}

ComparisonHypotheses hypotheses_from(const RlConditions& conditions) {
  ComparisonHypotheses h;
  h.diagonal_match = conditions.diagonal_match;
  h.off_diagonal_match = conditions.off_diagonal_match &&
                         (conditions.dominant_diagonal || conditions.recessive_diagonal);
  return h;
}

OrderingVerdicts compare_bounds(const BoundReport& report,
                                const ComparisonHypotheses& hypotheses) {
  OrderingVerdicts out;
  const auto& lower = report.lindqvist_lower;
  const auto& additive = report.lindqvist_additive;
  const auto& ratio = report.bapat_ratio;
  const bool have_lower = lower.valid && lower.value.has_value();
  if (have_lower && additive.valid) {
    out.additive_below_lower = make_verdict(true, *lower.value - *additive.value,
                                            std::abs(*lower.value));
  }
  if (have_lower && ratio.valid) {
    const double scale = std::max(std::abs(*lower.value), std::abs(*ratio.value));
    out.ratio_below_lower =
        make_verdict(hypotheses.diagonal_match, *lower.value - *ratio.value, scale);
    out.lower_below_ratio =
        make_verdict(hypotheses.off_diagonal_match, *ratio.value - *lower.value, scale);
  }
  return out;
}

BoundReport bound_report(const Matrix& a, const Matrix& b,
                         std::optional<ComparisonHypotheses> hypotheses) {
  require_same_square(a, b, "bound_report");
  BoundReport report;
  report.norm_a = induced_one_norm(a);
  report.norm_b = induced_one_norm(b);
  report.norm_difference = induced_one_norm(a - b);
  report.lambda = spectral_radius(a);
  report.mu = spectral_radius(b);
  report.normal_matrix = normal_matrix_gap(a, b);
  if (!report.normal_matrix.normal) {
    report.warnings.emplace_back(
        "A is not normal; |lambda - mu| <= ||A - B|| is diagnostic only");
  }

  if (report.lambda > report.mu) {
    report.direction = Direction::kLambdaGreater;
  } else if (report.mu > report.lambda) {
    report.direction = Direction::kMuGreater;
    report.swapped = true;
    report.warnings.emplace_back("mu > lambda: bounds evaluated with A and B exchanged");
  }
  if (report.lambda > 0.0 && report.mu > 0.0) {
    report.actual = actual_error(report.lambda, report.mu);
    report.bounded_gap = std::abs(*report.actual);
  }

  const Matrix& first = report.swapped ? b : a;
  const Matrix& second = report.swapped ? a : b;
  const double smaller = std::min(report.lambda, report.mu);

  auto mark_all = [&](const std::string& note) {
    for (BoundValue* v : {&report.spectral_variation, &report.bapat_ratio,
                          &report.lindqvist_lower, &report.lindqvist_additive,
                          &report.operator_norm}) {
      if (!v->valid && v->note.empty()) v->note = note;
    }
  };

  if (!(smaller > 0.0)) {
    mark_all("smaller spectral radius is zero; log bounds undefined");
    return report;
  }

  report.spectral_variation.value = spectral_variation_bound(first, second, smaller);
  report.spectral_variation.valid = true;

  if (!is_irreducible(first)) {
    mark_all("matrix with the larger Perron value is reducible");
    report.orderings = compare_bounds(
        report, hypotheses.value_or(structural_hypotheses(a, b)));
    return report;
  }

  const PerronPair perron = perron_pair(first, Normalization::kBiorthogonal);
  try {
    report.bapat_ratio.value = bapat_ratio_bound(first, second, perron);
    report.bapat_ratio.valid = true;
  } catch (const DomainError& e) {
    report.bapat_ratio.note = e.what();
  }

  try {
    const LindqvistValidity validity =
        check_lindqvist_validity(first, second, perron.left, perron.right, perron.value);
    report.validity = validity;
    report.l = validity.l;
    if (!validity.row_sum_clause) {
      report.warnings.emplace_back(
          "min row sum exceeds the computed Perron value; Perron computation suspect");
    }
    const LindqvistLower lower = lindqvist_lower_bound(perron.value, validity.l);
    report.lindqvist_lower.valid = validity.holds && lower.valid;
    report.lindqvist_lower.value = lower.value;
    if (!report.lindqvist_lower.valid) {
      report.lindqvist_lower.note = "validity condition r(A) > L fails";
    }
    try {
      report.lindqvist_additive.value = lindqvist_additive_bound(smaller, validity.l);
      report.lindqvist_additive.valid = true;
    } catch (const DomainError& e) {
      report.lindqvist_additive.note = e.what();
    }
  } catch (const DomainError& e) {
    report.lindqvist_lower.note = e.what();
    report.lindqvist_additive.note = e.what();
  }

  const OperatorNormBound op = operator_norm_bound(first, second, smaller);
  report.operator_norm.value = op.value;
  report.operator_norm.valid = true;
  report.alpha = op.alpha;

  report.orderings =
      compare_bounds(report, hypotheses.value_or(structural_hypotheses(a, b)));
  return report;
}

ZeroErrorCertificate zero_error_certificate(const Matrix& gamma, const Matrix& delta,
                                            const Vector& x, const Vector& y) {
  require_same_square(gamma, delta, "zero_error_certificate");
  if (!(gamma.minCoeff() > 0.0) || !(delta.minCoeff() > 0.0)) {
    throw DomainError("zero_error_certificate: gamma and delta must be positive");
  }
  const Eigen::Index s = gamma.rows();
  const Matrix log_ratio = delta.array().log() - gamma.array().log();

  ZeroErrorCertificate cert;
  // With beta_1 = 1: ln lambda0 = log_ratio(0,0), ln beta_i from column 0.
  const double log_lambda0 = log_ratio(0, 0);
  Vector log_beta(s);
  for (Eigen::Index i = 0; i < s; ++i) log_beta(i) = log_ratio(i, 0) - log_lambda0;

  double residual = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      const double predicted =
          std::exp(log_lambda0 + log_beta(i) - log_beta(j)) * gamma(i, j);
      residual = std::max(residual, std::abs(delta(i, j) - predicted) / delta(i, j));
    }
  }
  cert.similarity.lambda0 = std::exp(log_lambda0);
  cert.similarity.beta = log_beta.array().exp();
  cert.similarity.residual = residual;
  cert.similarity.holds = residual <= 1e-9;

  double balance = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      balance += gamma(i, j) * x(i) * y(j) * log_ratio(i, j);
    }
  }
  cert.log_balance.value = balance;
  cert.log_balance.holds = std::abs(balance) <= 1e-10;
  cert.certified = cert.similarity.holds && cert.log_balance.holds;

  const double lambda = spectral_radius(gamma);
  const double mu = spectral_radius(delta);
  cert.relative_gap = std::abs(lambda - mu) / lambda;
  if (cert.certified && cert.relative_gap > 1e-8) {
    std::ostringstream os;
    os << "zero_error_certificate: certified pair has relative eigenvalue gap "
       << cert.relative_gap;
    throw NumericalError(os.str(), cert.relative_gap);
  }
  return cert;
}

}  // namespace riskbound

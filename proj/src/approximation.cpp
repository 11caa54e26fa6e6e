#include "riskbound/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskbound/errors.hpp"

namespace riskbound {

namespace {

constexpr double kOrthogonalityTolerance = 1e-12;
constexpr double kTdTolerance = 1e-10;
// Entries of Q below this fraction of max |Q| are rounding noise.
constexpr double kZeroFraction = 1e-13;

bool rows_have_single_positive(const Matrix& phi) {
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    int positives = 0;
    for (Eigen::Index k = 0; k < phi.cols(); ++k) {
      const double v = phi(i, k);
      if (v > 0.0) {
        ++positives;
      } else if (v != 0.0) {
        return false;
      }
    }
    if (positives != 1) return false;
  }
  return true;
}

bool nonnegative_orthogonal(const Matrix& phi) {
  if (phi.size() > 0 && phi.minCoeff() < 0.0) return false;
  for (Eigen::Index a = 0; a < phi.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < phi.cols(); ++b) {
      const double inner = phi.col(a).dot(phi.col(b));
      const double scale = phi.col(a).norm() * phi.col(b).norm();
      if (std::abs(inner) > kOrthogonalityTolerance * scale) return false;
    }
  }
  return true;
}

std::vector<std::size_t> dependent_columns(const Matrix& weighted) {
  std::vector<std::size_t> dependent;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < weighted.cols(); ++k) {
    Matrix candidate(weighted.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
    for (std::size_t j = 0; j < kept.size(); ++j) {
      candidate.col(static_cast<Eigen::Index>(j)) = weighted.col(kept[j]);
    }
    candidate.col(candidate.cols() - 1) = weighted.col(k);
    Eigen::ColPivHouseholderQR<Matrix> qr(candidate);
    qr.setThreshold(1e-10);
    if (qr.rank() == candidate.cols()) {
      kept.push_back(k);
    } else {
      dependent.push_back(static_cast<std::size_t>(k));
    }
  }
  return dependent;
}

}  // namespace

FeatureFlags check_assumptions(const Matrix& phi, const StationaryDistribution* pi) {
  FeatureFlags flags;
  flags.star = rows_have_single_positive(phi);
  flags.dagger = flags.star || nonnegative_orthogonal(phi);
  if (pi != nullptr) flags.td_condition = check_td_condition(phi, *pi);
  return flags;
}

bool check_td_condition(const Matrix& phi, const StationaryDistribution& pi) {
  if (phi.rows() != pi.pi.size()) {
    throw DimensionError("check_td_condition: Phi rows must match the state count");
  }
  const Matrix outer = phi * phi.transpose();
  for (Eigen::Index i = 0; i < outer.rows(); ++i) {
    for (Eigen::Index j = 0; j < outer.cols(); ++j) {
      const double target = i == j ? 1.0 / pi.pi(i) : 0.0;
      const double tol = kTdTolerance * std::max(1.0, std::abs(target));
      if (std::abs(outer(i, j) - target) > tol) return false;
    }
  }
  return true;
}

FeatureMatrix::FeatureMatrix(Matrix phi) : phi_(std::move(phi)) {
  if (phi_.rows() == 0 || phi_.cols() == 0) {
    throw DimensionError("FeatureMatrix: Phi must be nonempty");
  }
  if (!phi_.allFinite()) {
    throw DomainError("FeatureMatrix: Phi has non-finite entries");
  }
  flags_ = check_assumptions(phi_);
}

std::size_t FeatureMatrix::active_column(std::size_t row) const {
  if (!flags_.star) {
    throw PreconditionError("FeatureMatrix: active column requires one positive entry per row");
  }
  Eigen::Index k = 0;
  phi_.row(static_cast<Eigen::Index>(row)).maxCoeff(&k);
  return static_cast<std::size_t>(k);
}

Matrix projection(const FeatureMatrix& features, const StationaryDistribution& pi) {
  const Matrix& phi = features.phi();
  if (phi.rows() != pi.pi.size()) {
    throw DimensionError("projection: Phi rows must match the state count");
  }
  const Matrix phi_t_d = phi.transpose() * pi.pi.asDiagonal();
  const Matrix gram = phi_t_d * phi;
  try {
    return phi * solve_gram(gram, phi_t_d);
  } catch (const RankError&) {
    const Matrix weighted = pi.pi.cwiseSqrt().asDiagonal() * phi;
    auto dependent = dependent_columns(weighted);
    std::ostringstream os;
    os << "projection: Phi^T D Phi is singular; dependent columns:";
    for (auto k : dependent) os << ' ' << k;
    throw RankError(os.str(), std::move(dependent));
  }
}

ProjectedSystem projected_system(const ChainSpec& chain, const FeatureMatrix& phi) {
  ProjectedSystem system;
  system.pi = stationary_distribution(chain);
  system.gamma = multiplicative_matrix(chain);
  system.projection = projection(phi, system.pi);
  system.q = system.projection * system.gamma.entries;

  const double scale = system.q.cwiseAbs().maxCoeff();
  const double floor = kZeroFraction * scale;
  for (Eigen::Index i = 0; i < system.q.rows(); ++i) {
    for (Eigen::Index j = 0; j < system.q.cols(); ++j) {
      double& v = system.q(i, j);
      if (std::abs(v) <= floor) {
        v = 0.0;
      } else if (v < 0.0) {
        std::ostringstream os;
        os << "projected_system: Q(" << i << ',' << j << ") = " << v
           << " is negative; Perron value undefined for these features";
        throw PreconditionError(os.str());
      }
    }
  }

  system.q_irreducible = is_irreducible(system.q);
  if (!system.q_irreducible) {
    system.warnings.emplace_back(
        "Q is reducible; mu is its spectral radius and its Perron vector may "
        "have zero components");
  }
  system.mu = spectral_radius(system.q);
  return system;
}

Matrix delta_closed_form(const Matrix& gamma, const Vector& pi,
                         const FeatureMatrix& features) {
  if (!features.flags().star) {
    throw PreconditionError("delta_closed_form: features must have one positive entry per row");
  }
  const Matrix& phi = features.phi();
  const Eigen::Index s = gamma.rows();
  if (phi.rows() != s || pi.size() != s || gamma.cols() != s) {
    throw DimensionError("delta_closed_form: inconsistent sizes");
  }
  // Per column k: weighted row mixture sum_l phi_k(l) pi_l gamma_l. and the
  // normalizer sum_m phi_k(m)^2 pi_m.
  const Eigen::Index m = phi.cols();
  Matrix mixture(m, s);
  Vector normalizer(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Vector weights = phi.col(k).cwiseProduct(pi);
    mixture.row(k) = weights.transpose() * gamma;
    normalizer(k) = phi.col(k).cwiseProduct(phi.col(k)).dot(pi);
  }
  Matrix delta(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto k = static_cast<Eigen::Index>(features.active_column(static_cast<std::size_t>(i)));
    delta.row(i) = phi(i, k) * mixture.row(k) / normalizer(k);
  }
  return delta;
}

Matrix delta_closed_form(const ChainSpec& chain, const FeatureMatrix& phi) {
  const auto pi = stationary_distribution(chain);
  const auto gamma = multiplicative_matrix(chain);
  return delta_closed_form(gamma.entries, pi.pi, phi);
}

FeatureMatrix zero_error_features(const MultiplicativeMatrix& gamma,
                                  const StationaryDistribution& pi) {
  if (gamma.entries.rows() != pi.pi.size()) {
    throw DimensionError("zero_error_features: size mismatch");
  }
  if (!(pi.pi.minCoeff() > 0.0)) {
    throw PreconditionError("zero_error_features: stationary distribution must be positive");
  }
  const PerronPair pair = perron_pair(gamma.entries, Normalization::kL1Unit);
  Matrix phi = pair.left.cwiseQuotient(pi.pi);
  return FeatureMatrix(std::move(phi));
}

}  // namespace riskbound

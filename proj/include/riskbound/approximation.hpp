#pragma once

// Linear feature architectures: assumption checks, the D-weighted projection
// onto the feature span and the projected matrix Q = Pi (C o P).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "riskbound/chain_model.hpp"

namespace riskbound {

struct FeatureFlags {
  /// Nonnegative entries and mutually orthogonal columns.
  bool dagger = false;
  /// Every row has exactly one strictly positive entry, the rest zero.
  bool star = false;
  /// Phi Phi^T = D^{-1}; only known once a stationary distribution is given.
  std::optional<bool> td_condition;
};

/// s x M basis matrix, row i holding the features of state i.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix phi);

  const Matrix& phi() const { return phi_; }
  std::size_t states() const { return static_cast<std::size_t>(phi_.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(phi_.cols()); }
  const FeatureFlags& flags() const { return flags_; }

  /// Column k(i) holding the positive entry of row i. Requires star.
  std::size_t active_column(std::size_t row) const;

 private:
  Matrix phi_;
  FeatureFlags flags_;
};

/// dagger and star flags; td_condition as well when pi is supplied.
FeatureFlags check_assumptions(const Matrix& phi,
                               const StationaryDistribution* pi = nullptr);

/// True iff Phi Phi^T equals diag(1 / pi_i) within 1e-10 (relative to the
/// entry scale for entries above one).
bool check_td_condition(const Matrix& phi, const StationaryDistribution& pi);

/// Pi = Phi (Phi^T D Phi)^{-1} Phi^T D.
/// Throws RankError naming the dependent columns when Phi^T D Phi is
/// singular.
Matrix projection(const FeatureMatrix& phi, const StationaryDistribution& pi);

struct ProjectedSystem {
  StationaryDistribution pi;
  MultiplicativeMatrix gamma;
  Matrix projection;
  Matrix q;         ///< Q = Pi (C o P); entries delta_ij
  double mu = 0.0;  ///< spectral radius of Q
  bool q_irreducible = false;
  std::vector<std::string> warnings;
};

/// Builds Pi, Q and mu for a valid chain. mu is the Perron value of Q when Q
/// is irreducible and its spectral radius otherwise (reported with a
/// warning). Throws PreconditionError when Q has negative entries, since
/// then no Perron value exists.
ProjectedSystem projected_system(const ChainSpec& chain, const FeatureMatrix& phi);

/// delta_ij = phi_k(i)(i) sum_l phi_k(i)(l) pi_l gamma_lj
///            / sum_m phi_k(i)(m)^2 pi_m,   k(i) the active column of row i.
/// Entry-wise formula valid under star; throws PreconditionError otherwise.
Matrix delta_closed_form(const Matrix& gamma, const Vector& pi,
                         const FeatureMatrix& phi);
Matrix delta_closed_form(const ChainSpec& chain, const FeatureMatrix& phi);

/// Single-column features phi_i = x_i / pi_i with x the left Perron vector
/// of C o P. With this choice mu equals lambda.
FeatureMatrix zero_error_features(const MultiplicativeMatrix& gamma,
                                  const StationaryDistribution& pi);

}  // namespace riskbound

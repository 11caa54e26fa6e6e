#pragma once

// Perron-Frobenius machinery for nonnegative matrices, the l1-induced
// operator norm and the small symmetric solver used for Gram systems.

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace riskbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Normalization {
  kL1Unit,         ///< both vectors scaled to unit l1 norm
  kBiorthogonal,   ///< right vector unit l1, left vector scaled so <x,y> = 1
};

const char* to_string(Normalization n);

/// Leading eigenvalue of a nonnegative irreducible matrix with its positive
/// left and right eigenvectors.
struct PerronPair {
  double value = 0.0;
  Vector right;  ///< A y = r(A) y
  Vector left;   ///< x^T A = r(A) x^T
  Normalization normalization = Normalization::kL1Unit;
};

struct PowerIterationOptions {
  double tolerance = 1e-13;        ///< l1 distance of successive iterates
  std::size_t max_iterations = 1'000'000;
};

/// Digraph helpers over the pattern {(i,j) : a_ij > 0}.
bool is_irreducible(const Matrix& a);
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const Matrix& a);

bool is_nonnegative(const Matrix& a);

/// Perron eigenvalue and eigenvectors of a nonnegative irreducible matrix.
///
/// Power iteration runs on A + rho*I with rho = max_i a_ii + 1, which makes
/// the iteration matrix primitive even when A is periodic; rho is
/// subtracted from the reported value. The left vector is obtained by the
/// same routine on A^T.
///
/// Throws StructureError if A has a negative entry or is reducible, and
/// NumericalError if the iteration cap is hit with an unacceptable residual.
PerronPair perron_pair(const Matrix& a,
                       Normalization normalization = Normalization::kL1Unit,
                       const PowerIterationOptions& options = {});

/// Right Perron vector only (unit l1 norm) together with its eigenvalue.
std::pair<double, Vector> perron_right(const Matrix& a,
                                       const PowerIterationOptions& options = {});

/// Spectral radius of a nonnegative, possibly reducible, matrix. Computed as
/// the maximum Perron value over the irreducible diagonal blocks given by the
/// strongly connected components; trivial components contribute their
/// diagonal entry.
double spectral_radius(const Matrix& a, const PowerIterationOptions& options = {});

/// x' = x / <x, y>, y' = y. Throws DomainError when <x, y> <= 0.
std::pair<Vector, Vector> biorthogonalize(const Vector& x, const Vector& y);

/// Maximum absolute column sum, the operator norm induced by ||v|| = sum |v_i|.
double induced_one_norm(const Matrix& a);

/// Solves G X = rhs for symmetric positive-definite G.
/// Throws RankError when G is singular or indefinite and DimensionError on
/// shape mismatch.
Matrix solve_gram(const Matrix& g, const Matrix& rhs);

}  // namespace riskbound

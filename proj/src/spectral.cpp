#include "riskbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "riskbound/errors.hpp"

namespace riskbound {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::kL1Unit:
      return "l1_unit";
    case Normalization::kBiorthogonal:
      return "biorthogonal";
  }
  return "unknown";
}

bool is_nonnegative(const Matrix& a) {
  return a.size() == 0 || a.minCoeff() >= 0.0;
}

// Iterative Tarjan over the positive-entry digraph.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("strongly_connected_components: matrix is not square");
  }
  const std::size_t n = static_cast<std::size_t>(a.rows());
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
        adjacency[i].push_back(j);
      }
    }
  }

  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  std::vector<Frame> call_stack;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call_stack.empty()) {
      Frame& frame = call_stack.back();
      const std::size_t v = frame.node;
      if (frame.next_edge < adjacency[v].size()) {
        const std::size_t w = adjacency[v][frame.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call_stack.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        std::vector<std::size_t> component;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call_stack.pop_back();
      if (!call_stack.empty()) {
        const std::size_t parent = call_stack.back().node;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return components;
}

bool is_irreducible(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("is_irreducible: matrix is not square");
  }
  if (a.rows() <= 1) return true;
  return strongly_connected_components(a).size() == 1;
}

namespace {

struct PowerResult {
  double value = 0.0;
  Vector vector;
};

// Power iteration on (A / scale) + rho I. The returned vector has unit l1
// norm and the value is r(A).
PowerResult power_iterate(const Matrix& a, const PowerIterationOptions& options) {
  const Eigen::Index n = a.rows();
  const double scale = a.maxCoeff();
  if (!(scale > 0.0)) {
    // The zero matrix: every positive vector is an eigenvector.
    return {0.0, Vector::Constant(n, 1.0 / static_cast<double>(n))};
  }
  const Matrix scaled = a / scale;
  const double rho = scaled.diagonal().maxCoeff() + 1.0;

  Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector w(n);
  bool converged = false;
  double diff = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    w.noalias() = scaled * v;
    w += rho * v;
    w /= w.sum();
    diff = (w - v).lpNorm<1>();
    v.swap(w);
    if (diff <= options.tolerance) {
      converged = true;
      break;
    }
  }

  const Vector av = a * v;
  const double value = av.sum() / v.sum();
  const double residual = (av - value * v).lpNorm<1>();
  if (!converged && residual > 1e-10 * std::max(value, 1e-300)) {
    std::ostringstream os;
    os << "power iteration did not converge within " << options.max_iterations
       << " iterations (last step " << diff << ", residual " << residual << ")";
    throw NumericalError(os.str(), residual);
  }
  return {value, v};
}

void require_square_nonnegative(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError(std::string(who) + ": matrix must be square and nonempty");
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(who) + ": matrix has non-finite entries");
  }
  if (!is_nonnegative(a)) {
    throw StructureError(std::string(who) + ": matrix has a negative entry");
  }
}

}  // namespace

std::pair<double, Vector> perron_right(const Matrix& a,
                                       const PowerIterationOptions& options) {
  require_square_nonnegative(a, "perron_right");
  if (!is_irreducible(a)) {
    throw StructureError("perron_right: matrix is reducible");
  }
  auto result = power_iterate(a, options);
  return {result.value, std::move(result.vector)};
}

PerronPair perron_pair(const Matrix& a, Normalization normalization,
                       const PowerIterationOptions& options) {
  require_square_nonnegative(a, "perron_pair");
  if (!is_irreducible(a)) {
    throw StructureError("perron_pair: matrix is reducible");
  }
  PowerResult right = power_iterate(a, options);
  const Matrix at = a.transpose();
  PowerResult left = power_iterate(at, options);

  PerronPair pair;
  // Both runs estimate the same eigenvalue; the right run is reported.
  pair.value = right.value;
  pair.right = std::move(right.vector);
  pair.left = std::move(left.vector);
  pair.normalization = normalization;
  if (normalization == Normalization::kBiorthogonal) {
    auto [x, y] = biorthogonalize(pair.left, pair.right);
    pair.left = std::move(x);
    pair.right = std::move(y);
  }
  return pair;
}

double spectral_radius(const Matrix& a, const PowerIterationOptions& options) {
  require_square_nonnegative(a, "spectral_radius");
  double radius = 0.0;
  for (const auto& component : strongly_connected_components(a)) {
    const auto m = static_cast<Eigen::Index>(component.size());
    if (m == 1) {
      const auto i = static_cast<Eigen::Index>(component.front());
      radius = std::max(radius, a(i, i));
      continue;
    }
    Matrix block(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        block(r, c) = a(static_cast<Eigen::Index>(component[static_cast<std::size_t>(r)]),
                        static_cast<Eigen::Index>(component[static_cast<std::size_t>(c)]));
      }
    }
    radius = std::max(radius, power_iterate(block, options).value);
  }
  return radius;
}

std::pair<Vector, Vector> biorthogonalize(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw DimensionError("biorthogonalize: vector lengths differ");
  }
  const double inner = x.dot(y);
  if (!(inner > 0.0) || !std::isfinite(inner)) {
    throw DomainError("biorthogonalize: <x, y> must be positive");
  }
  return {x / inner, y};
}

double induced_one_norm(const Matrix& a) {
  if (!a.allFinite()) {
    throw DomainError("induced_one_norm: matrix has non-finite entries");
  }
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix solve_gram(const Matrix& g, const Matrix& rhs) {
  if (g.rows() != g.cols()) {
    throw DimensionError("solve_gram: Gram matrix is not square");
  }
  if (rhs.rows() != g.rows()) {
    throw DimensionError("solve_gram: right-hand side has wrong row count");
  }
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("solve_gram: Gram matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    throw RankError("solve_gram: Gram matrix is not positive definite", {});
  }
  const Vector diag = Matrix(llt.matrixL()).diagonal();
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  if (!(ratio * ratio > 1e-14)) {
    throw RankError("solve_gram: Gram matrix is numerically singular", {});
  }
  return llt.solve(rhs);
}

}  // namespace riskbound

#include "riskbound/chain_model.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "riskbound/errors.hpp"

namespace riskbound {

namespace {

constexpr double kRowSumTolerance = 1e-12;

// Period of an irreducible digraph: gcd over edges (u, v) of
// level(u) + 1 - level(v), with BFS levels from state 0.
std::size_t period_of(const Matrix& p) {
  const auto n = static_cast<std::size_t>(p.rows());
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(n, kUnseen);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  std::size_t g = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (!(p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0)) {
        continue;
      }
      if (level[v] == kUnseen) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      } else {
        const auto diff = static_cast<long long>(level[u]) + 1 -
                          static_cast<long long>(level[v]);
        g = std::gcd(g, static_cast<std::size_t>(std::llabs(diff)));
      }
    }
  }
  return g;
}

}  // namespace

ChainValidationReport validate_chain(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    throw DimensionError("validate_chain: transition matrix must be square and nonempty");
  }
  if (!p.allFinite()) {
    throw DomainError("validate_chain: transition matrix has non-finite entries");
  }
  ChainValidationReport report;
  const bool in_unit_interval = p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0;
  const Vector sums = p.rowwise().sum();
  report.row_stochastic =
      in_unit_interval &&
      (sums.array() - 1.0).abs().maxCoeff() <= kRowSumTolerance;
  report.strictly_positive = p.minCoeff() > 0.0;
  report.irreducible = is_irreducible(p);
  if (report.irreducible) {
    report.period = period_of(p);
    report.aperiodic = report.period == 1;
  }
  return report;
}

ChainSpec ChainSpec::create(Matrix p, Matrix c, std::size_t i0) {
  if (p.rows() != p.cols()) {
    throw DimensionError("ChainSpec: P must be square");
  }
  if (p.rows() < 2) {
    throw DimensionError("ChainSpec: at least two states are required");
  }
  if (c.rows() != p.rows() || c.cols() != p.cols()) {
    throw DimensionError("ChainSpec: c must have the same shape as P");
  }
  if (!p.allFinite() || !c.allFinite()) {
    throw DomainError("ChainSpec: P and c must be finite");
  }
  if (i0 >= static_cast<std::size_t>(p.rows())) {
    throw DomainError("ChainSpec: i0 out of range");
  }
  return ChainSpec{std::move(p), std::move(c), i0};
}

void require_valid(const ChainSpec& chain) {
  const auto report = validate_chain(chain.p);
  if (!report.row_stochastic) throw StructureError("chain: row_stochastic: false");
  if (!report.irreducible) throw StructureError("chain: irreducible: false");
  if (!report.aperiodic) throw StructureError("chain: aperiodic: false");
}

namespace {

StationaryDistribution dense_solve(const Matrix& p) {
  const Eigen::Index n = p.rows();
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix system = p.transpose() - Matrix::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector pi = system.partialPivLu().solve(rhs);
  return {pi, (p.transpose() * pi - pi).lpNorm<1>()};
}

}  // namespace

StationaryDistribution stationary_distribution(const Matrix& p) {
  const Eigen::Index n = p.rows();
  constexpr double kTolerance = 1e-12;
  constexpr std::size_t kMaxIterations = 1'000'000;

  const Matrix pt = p.transpose();
  Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  bool converged = false;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    next.noalias() = pt * pi;
    next /= next.sum();
    const double diff = (next - pi).lpNorm<1>();
    pi.swap(next);
    if (diff <= kTolerance) {
      converged = true;
      break;
    }
  }
  const double residual = (pt * pi - pi).lpNorm<1>();
  if (converged && residual <= 1e-10) return {pi, residual};
  if (n <= 64) return dense_solve(p);

  std::ostringstream os;
  os << "stationary_distribution: no convergence (residual " << residual << ")";
  throw NumericalError(os.str(), residual);
}

StationaryDistribution stationary_distribution(const ChainSpec& chain) {
  require_valid(chain);
  return stationary_distribution(chain.p);
}

MultiplicativeMatrix multiplicative_matrix(const ChainSpec& chain) {
  if (chain.c.maxCoeff() > kMaxCost) {
    std::ostringstream os;
    os << "multiplicative_matrix: cost entry " << chain.c.maxCoeff()
       << " exceeds the representable limit " << kMaxCost;
    throw RangeError(os.str());
  }
  MultiplicativeMatrix m;
  m.entries = chain.c.array().exp() * chain.p.array();
  m.positive = m.entries.minCoeff() > 0.0;
  return m;
}

std::size_t default_reference_state(const StationaryDistribution& pi) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < pi.pi.size(); ++i) {
    if (pi.pi(i) > pi.pi(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

}  // namespace riskbound

#include "riskbound/learners.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "riskbound/errors.hpp"

namespace riskbound {

StepSchedule::StepSchedule(Kind kind, double a, double b, double kappa)
    : kind_(kind), a_(a), b_(b), kappa_(kappa) {}

StepSchedule StepSchedule::harmonic(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0)) {
    throw DomainError("StepSchedule: harmonic schedule needs a > 0 and b >= 0");
  }
  return StepSchedule(Kind::kHarmonic, a, b, 1.0);
}

StepSchedule StepSchedule::polynomial(double a, double kappa) {
  if (!(a > 0.0) || !(kappa > 0.5 && kappa <= 1.0)) {
    throw DomainError("StepSchedule: polynomial schedule needs a > 0 and kappa in (0.5, 1]");
  }
  return StepSchedule(Kind::kPolynomial, a, 0.0, kappa);
}

double StepSchedule::operator()(std::size_t n) const {
  const double t = static_cast<double>(n);
  if (kind_ == Kind::kHarmonic) {
    // n + b is zero only for n = b = 0; count from 1 in that case.
    const double denom = t + b_;
    return a_ / (denom > 0.0 ? denom : 1.0);
  }
  return a_ / std::pow(t + 1.0, kappa_);
}

namespace {

double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::size_t reference_state(const LearnerOptions& options,
                            const StationaryDistribution& pi) {
  const std::size_t i0 = options.i0.value_or(default_reference_state(pi));
  if (i0 >= static_cast<std::size_t>(pi.pi.size())) {
    throw DomainError("learner: reference state out of range");
  }
  return i0;
}

Vector initial_parameters(const LearnerOptions& options, Eigen::Index m) {
  if (!options.initial) return Vector::Ones(m);
  if (options.initial->size() != m) {
    throw DimensionError("learner: initial parameter vector has wrong length");
  }
  return *options.initial;
}

void finish(LearnerTrace& trace) {
  if (trace.target && !trace.estimates.empty() && *trace.target != 0.0) {
    trace.final_abs_rel_error =
        std::abs(trace.estimates.back() - *trace.target) / std::abs(*trace.target);
  }
}

void check_trajectory(const std::vector<std::size_t>& trajectory, std::size_t states) {
  if (trajectory.size() < 2) {
    throw DomainError("learner: trajectory needs at least one transition");
  }
  for (auto x : trajectory) {
    if (x >= states) throw DomainError("learner: trajectory state out of range");
  }
}

}  // namespace

std::vector<std::size_t> sample_trajectory(const ChainSpec& chain, std::size_t horizon,
                                           std::uint64_t seed) {
  if (horizon < 1) throw DomainError("sample_trajectory: horizon must be >= 1");
  const auto s = static_cast<std::size_t>(chain.p.rows());
  std::vector<std::vector<double>> cumulative(s, std::vector<double>(s));
  for (std::size_t i = 0; i < s; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      acc += chain.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      cumulative[i][j] = acc;
    }
  }

  std::mt19937_64 gen(seed);
  std::vector<std::size_t> states;
  states.reserve(horizon + 1);
  std::size_t x = std::min(s - 1, static_cast<std::size_t>(unit_uniform(gen) *
                                                           static_cast<double>(s)));
  states.push_back(x);
  for (std::size_t n = 0; n < horizon; ++n) {
    const double u = unit_uniform(gen) * cumulative[x].back();
    const auto& row = cumulative[x];
    auto it = std::upper_bound(row.begin(), row.end(), u);
    std::size_t next = static_cast<std::size_t>(it - row.begin());
    if (next >= s) next = s - 1;
    // Skip zero-probability states that share a cumulative value.
    while (chain.p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(next)) <= 0.0 &&
           next + 1 < s) {
      ++next;
    }
    x = next;
    states.push_back(x);
  }
  return states;
}

Vector expected_step_costs(const ChainSpec& chain) {
  return chain.p.cwiseProduct(chain.c).rowwise().sum();
}

LearnerTrace run_average_cost(const std::vector<std::size_t>& trajectory,
                              const Vector& state_costs, const StepSchedule& schedule,
                              const StationaryDistribution* pi) {
  check_trajectory(trajectory, static_cast<std::size_t>(state_costs.size()));
  LearnerTrace trace;
  if (pi != nullptr) trace.target = pi->pi.dot(state_costs);

  double theta = state_costs(static_cast<Eigen::Index>(trajectory.front()));
  const std::size_t horizon = trajectory.size() - 1;
  trace.estimates.reserve(horizon);
  for (std::size_t n = 0; n < horizon; ++n) {
    const double cost = state_costs(static_cast<Eigen::Index>(trajectory[n]));
    theta += schedule(n) * (cost - theta);
    trace.estimates.push_back(theta);
  }
  finish(trace);
  return trace;
}

LearnerTrace run_lspe(const std::vector<std::size_t>& trajectory, const ChainSpec& chain,
                      const FeatureMatrix& features, const LearnerOptions& options) {
  check_trajectory(trajectory, chain.size());
  if (!features.flags().dagger) {
    throw PreconditionError("run_lspe: features must be nonnegative with orthogonal columns");
  }
  const Matrix& phi = features.phi();
  const Eigen::Index m = phi.cols();
  const auto pi = stationary_distribution(chain);
  const std::size_t i0 = reference_state(options, pi);
  const Vector phi0 = phi.row(static_cast<Eigen::Index>(i0)).transpose();

  LearnerTrace trace;
  try {
    trace.target = projected_system(chain, features).mu;
  } catch (const PreconditionError& e) {
    trace.diagnostic = e.what();
  }

  Vector r = initial_parameters(options, m);
  if (!(phi0.dot(r) > 0.0)) {
    throw PreconditionError("run_lspe: phi(i0)^T r_0 must be positive");
  }
  const Matrix exp_cost = chain.c.array().exp();
  Matrix a_acc = Matrix::Zero(m, m);
  Matrix b_acc = Matrix::Zero(m, m);
  const Matrix ridge = options.ridge * Matrix::Identity(m, m);
  bool gate_open = false;

  const std::size_t horizon = trajectory.size() - 1;
  trace.estimates.reserve(horizon);
  trace.params.push_back(r);
  for (std::size_t n = 0; n < horizon; ++n) {
    const auto x = static_cast<Eigen::Index>(trajectory[n]);
    const auto x_next = static_cast<Eigen::Index>(trajectory[n + 1]);
    a_acc.noalias() += exp_cost(x, x_next) * phi.row(x).transpose() * phi.row(x_next);
    b_acc.noalias() += phi.row(x).transpose() * phi.row(x);

    const Matrix regularized = b_acc + ridge;
    if (!gate_open) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(regularized, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      gate_open = lo > 0.0 && hi / lo <= options.max_condition;
    }
    if (gate_open) {
      const Matrix k = solve_gram(regularized, a_acc);
      const double denom = std::max(phi0.dot(r), options.epsilon_guard);
      r += options.schedule(n) * (k * r / denom - r);
    }
    if (!r.allFinite() || r.norm() > options.divergence_threshold) {
      trace.diverged = true;
      std::ostringstream os;
      os << "run_lspe: iterate left the bounded region at step " << n;
      trace.diagnostic = os.str();
      break;
    }
    trace.estimates.push_back(phi0.dot(r));
    if (options.thin > 0 && (n + 1) % options.thin == 0) trace.params.push_back(r);
  }
  finish(trace);
  return trace;
}

LearnerTrace run_td(const std::vector<std::size_t>& trajectory, const ChainSpec& chain,
                    const FeatureMatrix& features, const LearnerOptions& options) {
  check_trajectory(trajectory, chain.size());
  const Matrix& phi = features.phi();
  const Eigen::Index m = phi.cols();
  const auto pi = stationary_distribution(chain);
  const std::size_t i0 = reference_state(options, pi);
  const Vector phi0 = phi.row(static_cast<Eigen::Index>(i0)).transpose();

  LearnerTrace trace;
  if (check_td_condition(phi, pi)) {
    trace.target = perron_pair(multiplicative_matrix(chain).entries).value;
  } else {
    trace.diagnostic = "Phi Phi^T != D^{-1}; no analytic target";
  }

  Vector theta = initial_parameters(options, m);
  const Matrix exp_cost = chain.c.array().exp();
  const std::size_t horizon = trajectory.size() - 1;
  trace.estimates.reserve(horizon);
  trace.params.push_back(theta);
  for (std::size_t n = 0; n < horizon; ++n) {
    const auto x = static_cast<Eigen::Index>(trajectory[n]);
    const auto x_next = static_cast<Eigen::Index>(trajectory[n + 1]);
    const double denom = std::max(phi0.dot(theta), options.epsilon_guard);
    const double next_value = phi.row(x_next).dot(theta);
    const double value = phi.row(x).dot(theta);
    const double td = exp_cost(x, x_next) * next_value / denom - value;
    theta += options.schedule(n) * td * phi.row(x).transpose();
    if (!theta.allFinite() || theta.norm() > options.divergence_threshold) {
      trace.diverged = true;
      std::ostringstream os;
      os << "run_td: ||theta|| exceeded " << options.divergence_threshold << " at step "
         << n << "; iterates are not bounded on this instance";
      trace.diagnostic = os.str();
      break;
    }
    trace.estimates.push_back(phi0.dot(theta));
    if (options.thin > 0 && (n + 1) % options.thin == 0) trace.params.push_back(theta);
  }
  finish(trace);
  return trace;
}

}  // namespace riskbound

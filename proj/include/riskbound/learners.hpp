#pragma once

// Chain simulation and the three stochastic-approximation recursions: the
// average-cost tracker, the projected multiplicative value iteration (LSPE
// form) and its temporal-difference variant.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskbound/approximation.hpp"

namespace riskbound {

/// Robbins-Monro step sizes: a/(n+b), or a/(n+1)^kappa with kappa in (0.5, 1].
class StepSchedule {
 public:
  enum class Kind { kHarmonic, kPolynomial };

  static StepSchedule harmonic(double a = 1.0, double b = 100.0);
  static StepSchedule polynomial(double a, double kappa);

  double operator()(std::size_t n) const;

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double kappa() const { return kappa_; }

 private:
  StepSchedule(Kind kind, double a, double b, double kappa);

  Kind kind_;
  double a_;
  double b_;
  double kappa_;
};

struct LearnerTrace {
  /// Scalar estimate after each update: theta_n, phi(i0)^T r_n or
  /// phi(i0)^T theta_n.
  std::vector<double> estimates;
  std::optional<double> target;
  /// Parameter vectors every `thin` steps (first entry is the initial value).
  std::vector<Vector> params;
  std::uint64_t seed = 0;
  std::optional<double> final_abs_rel_error;
  bool diverged = false;
  std::string diagnostic;
};

/// X_0 uniform, X_{m+1} ~ P(. | X_m). Returns horizon + 1 states.
/// Deterministic for a given seed on every platform.
std::vector<std::size_t> sample_trajectory(const ChainSpec& chain, std::size_t horizon,
                                           std::uint64_t seed);

struct LearnerOptions {
  StepSchedule schedule = StepSchedule::harmonic();
  /// Reference state; defaults to the state of largest stationary mass.
  std::optional<std::size_t> i0;
  double epsilon_guard = 1e-6;
  /// Initial parameter vector; all ones when empty.
  std::optional<Vector> initial;
  /// Record a parameter vector every `thin` steps.
  std::size_t thin = 1000;
  /// LSPE: ridge added to B_n and the condition-number gate for starting
  /// updates.
  double ridge = 1e-8;
  double max_condition = 1e8;
  /// TD: abort once ||theta|| exceeds this.
  double divergence_threshold = 1e9;
};

/// r(i) = sum_j p(j|i) c(i,j), the expected one-step cost out of state i.
Vector expected_step_costs(const ChainSpec& chain);

/// theta_{n+1} = theta_n + a(n) (c(X_n) - theta_n), theta_0 = c(X_0).
/// target: sum_i pi_i c(i) when pi is given.
LearnerTrace run_average_cost(const std::vector<std::size_t>& trajectory,
                              const Vector& state_costs, const StepSchedule& schedule,
                              const StationaryDistribution* pi = nullptr);

/// r_{n+1} = r_n + a(n) (B_n^{-1} A_n / max(phi(i0)^T r_n, eps) - I) r_n with
/// A_n = sum_m exp(c(X_m, X_{m+1})) phi(X_m) phi(X_{m+1})^T and
/// B_n = sum_m phi(X_m) phi(X_m)^T. Target: mu of the projected system.
LearnerTrace run_lspe(const std::vector<std::size_t>& trajectory, const ChainSpec& chain,
                      const FeatureMatrix& phi, const LearnerOptions& options = {});

/// theta_{n+1} = theta_n + a(n) [exp(c(X_n, X_{n+1})) phi(X_{n+1})^T theta_n
///               / max(phi(i0)^T theta_n, eps) - phi(X_n)^T theta_n] phi(X_n).
/// Target lambda when Phi Phi^T = D^{-1}, none otherwise. Stops and marks the
/// trace diverged when ||theta_n|| exceeds the threshold.
LearnerTrace run_td(const std::vector<std::size_t>& trajectory, const ChainSpec& chain,
                    const FeatureMatrix& phi, const LearnerOptions& options = {});

}  // namespace riskbound

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "riskbound/errors.hpp"
#include "riskbound/learners.hpp"

using namespace riskbound;

TEST_CASE("step schedules") {
  const auto h = StepSchedule::harmonic();
  CHECK(h(0) == doctest::Approx(0.01));
  CHECK(h(900) == doctest::Approx(0.001));
  CHECK(StepSchedule::harmonic(1.0, 0.0)(0) == 1.0);
  const auto p = StepSchedule::polynomial(2.0, 0.75);
  CHECK(p(15) == doctest::Approx(2.0 / 8.0));
  CHECK_THROWS_AS(StepSchedule::polynomial(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(StepSchedule::harmonic(0.0, 1.0), DomainError);
}

TEST_CASE("trajectory sampling") {
  Matrix p = Matrix::Constant(2, 2, 0.5);
  const auto chain = ChainSpec::create(p, Matrix::Zero(2, 2), 0);
  const auto x = sample_trajectory(chain, 100'000, 42);
  CHECK(x.size() == 100'001);
  const double ones = static_cast<double>(std::count(x.begin(), x.end(), 1u));
  CHECK(std::abs(ones / static_cast<double>(x.size()) - 0.5) < 0.01);
  CHECK(sample_trajectory(chain, 1000, 7) == sample_trajectory(chain, 1000, 7));
  CHECK(sample_trajectory(chain, 1000, 7) != sample_trajectory(chain, 1000, 8));

  Matrix sparse(3, 3);
  sparse << 0, 1, 0, 0, 0, 1, 0.5, 0.5, 0;
  const auto cyc = ChainSpec::create(sparse, Matrix::Zero(3, 3), 0);
  const auto y = sample_trajectory(cyc, 2000, 3);
  for (std::size_t n = 0; n + 1 < y.size(); ++n) CHECK(sparse(y[n], y[n + 1]) > 0.0);
}

TEST_CASE("average cost recursion") {
  Matrix p(2, 2);
  p << 0.8, 0.2, 0.4, 0.6;
  const auto chain = ChainSpec::create(p, Matrix::Zero(2, 2), 0);
  const auto pi = stationary_distribution(chain);
  const auto x = sample_trajectory(chain, 100'000, 1);

  Vector constant = Vector::Constant(2, 5.0);
  const auto flat = run_average_cost(x, constant, StepSchedule::harmonic(), &pi);
  CHECK(flat.estimates.back() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(flat.estimates.size() == 100'000);

  Vector costs(2);
  costs << 0.0, 3.0;
  const auto trace = run_average_cost(x, costs, StepSchedule::harmonic(), &pi);
  REQUIRE(trace.target.has_value());
  CHECK(*trace.target == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(trace.estimates.back() - 1.0) <= 0.05);
}

TEST_CASE("expected step costs") {
  Matrix p(2, 2);
  p << 0.5, 0.5, 0.25, 0.75;
  Matrix c(2, 2);
  c << 1, 3, 4, 0;
  const Vector r = expected_step_costs(ChainSpec::create(p, c, 0));
  CHECK(r(0) == doctest::Approx(2.0));
  CHECK(r(1) == doctest::Approx(1.0));
}

TEST_CASE("LSPE with identity features tracks lambda") {
  oracle::Rng rng(12);
  const auto chain = ChainSpec::create(oracle::positive_stochastic(rng, 3, 0.1),
                                       oracle::random_costs(rng, 3, 0.0, 0.5), 0);
  const FeatureMatrix phi(Matrix::Identity(3, 3));
  const auto x = sample_trajectory(chain, 100'000, 5);
  const auto trace = run_lspe(x, chain, phi);
  const double lambda = oracle::perron_root(multiplicative_matrix(chain).entries);
  REQUIRE(trace.target.has_value());
  CHECK(*trace.target == doctest::Approx(lambda).epsilon(1e-10));
  CHECK(std::abs(trace.estimates.back() - lambda) / lambda <= 0.05);
  CHECK_FALSE(trace.diverged);

  LearnerOptions scaled;
  scaled.initial = Vector::Constant(3, 10.0);
  const auto other = run_lspe(x, chain, phi, scaled);
  CHECK(std::abs(other.estimates.back() - lambda) / lambda <= 0.05);
}

TEST_CASE("LSPE refuses features outside the orthogonal class") {
  Matrix p = Matrix::Constant(2, 2, 0.5);
  const auto chain = ChainSpec::create(p, Matrix::Zero(2, 2), 0);
  Matrix phi(2, 2);
  phi << 1, 1, 1, 2;
  const auto x = sample_trajectory(chain, 10, 1);
  CHECK_THROWS_AS(run_lspe(x, chain, FeatureMatrix(phi)), PreconditionError);
}

TEST_CASE("TD under the diagonal condition") {
  oracle::Rng rng(4);
  const int s = 4;
  const auto chain = ChainSpec::create(oracle::doubly_stochastic(rng, s),
                                       oracle::random_costs(rng, s, 0.0, 0.3), 0);
  const FeatureMatrix phi(std::sqrt(double(s)) * Matrix::Identity(s, s));
  const auto x = sample_trajectory(chain, 100'000, 9);
  const auto trace = run_td(x, chain, phi);
  REQUIRE(trace.target.has_value());
  const double lambda = oracle::perron_root(multiplicative_matrix(chain).entries);
  CHECK(*trace.target == doctest::Approx(lambda).epsilon(1e-10));
  CHECK(std::abs(trace.estimates.back() - lambda) / lambda <= 0.05);
}

TEST_CASE("TD with zero costs converges to one") {
  oracle::Rng rng(6);
  const int s = 4;
  const auto chain =
      ChainSpec::create(oracle::doubly_stochastic(rng, s), Matrix::Zero(s, s), 0);
  const FeatureMatrix phi(2.0 * Matrix::Identity(s, s));
  const auto trace = run_td(sample_trajectory(chain, 100'000, 2), chain, phi);
  CHECK(std::abs(trace.estimates.back() - 1.0) <= 0.02);
}

TEST_CASE("TD without the diagonal condition has no target") {
  Matrix p(2, 2);
  p << 0.7, 0.3, 0.2, 0.8;
  const auto chain = ChainSpec::create(p, Matrix::Zero(2, 2), 0);
  const auto trace =
      run_td(sample_trajectory(chain, 1000, 1), chain, FeatureMatrix(Matrix::Identity(2, 2)));
  CHECK_FALSE(trace.target.has_value());
  CHECK_FALSE(trace.diagnostic.empty());
}

TEST_CASE("TD divergence detector") {
  Matrix p = Matrix::Constant(2, 2, 0.5);
  const auto chain = ChainSpec::create(p, Matrix::Constant(2, 2, 5.0), 0);
  LearnerOptions options;
  options.schedule = StepSchedule::harmonic(1.0, 0.0);
  options.i0 = 0;
  Matrix phi(2, 1);
  phi << 1.0, 10.0;
  const auto trace =
      run_td(sample_trajectory(chain, 10'000, 1), chain, FeatureMatrix(phi), options);
  CHECK(trace.diverged);
  CHECK(trace.estimates.size() < 10'000);
}

TEST_CASE("runs are deterministic") {
  oracle::Rng rng(13);
  const auto chain = ChainSpec::create(oracle::positive_stochastic(rng, 4),
                                       oracle::random_costs(rng, 4, 0.0, 0.5), 0);
  const FeatureMatrix phi(oracle::star_features(rng, 4, 2));
  const auto a = run_lspe(sample_trajectory(chain, 5000, 77), chain, phi);
  const auto b = run_lspe(sample_trajectory(chain, 5000, 77), chain, phi);
  CHECK(a.estimates == b.estimates);
}

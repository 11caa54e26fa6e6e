#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "riskbound/approximation.hpp"
#include "riskbound/errors.hpp"

using namespace riskbound;

namespace {

ChainSpec random_chain(oracle::Rng& rng, int s) {
  return ChainSpec::create(oracle::positive_stochastic(rng, s), oracle::random_costs(rng, s),
                           0);
}

}  // namespace

TEST_CASE("assumption flags") {
  Matrix star(3, 2);
  star << 1, 0, 0, 2, 0.5, 0;
  const auto f = check_assumptions(star);
  CHECK(f.star);
  CHECK(f.dagger);

  Matrix orthogonal(3, 2);
  orthogonal << 1, 0, 0, 1, 0, 0;
  const auto g = check_assumptions(orthogonal);
  CHECK_FALSE(g.star);  // row 3 has no positive entry
  CHECK(g.dagger);

  Matrix mixed(2, 2);
  mixed << 1, 1, 1, -1;
  const auto h = check_assumptions(mixed);
  CHECK_FALSE(h.dagger);
  CHECK_FALSE(h.star);
}

TEST_CASE("td condition") {
  Matrix p = Matrix::Constant(4, 4, 0.25);
  const auto pi = stationary_distribution(p);
  CHECK(check_td_condition(2.0 * Matrix::Identity(4, 4), pi));
  CHECK_FALSE(check_td_condition(Matrix::Identity(4, 4), pi));
}

TEST_CASE("projection is a D-orthogonal projector") {
  oracle::Rng rng(5);
  const ChainSpec chain = random_chain(rng, 6);
  const auto pi = stationary_distribution(chain);
  Matrix phi(6, 2);
  for (int i = 0; i < 6; ++i) {
    phi(i, 0) = 1.0;
    phi(i, 1) = i;
  }
  const Matrix proj = projection(FeatureMatrix(phi), pi);
  CHECK((proj * proj - proj).norm() < 1e-12);
  CHECK((proj * phi - phi).norm() < 1e-12);
  const Matrix d = pi.d();
  CHECK((d * proj - proj.transpose() * d).norm() < 1e-12);
}

TEST_CASE("rank deficient features name the dependent column") {
  Matrix p = Matrix::Constant(3, 3, 1.0 / 3.0);
  const auto pi = stationary_distribution(p);
  Matrix phi(3, 3);
  phi << 1, 0, 2, 0, 1, 0, 1, 0, 2;
  try {
    projection(FeatureMatrix(phi), pi);
    FAIL("expected RankError");
  } catch (const RankError& e) {
    REQUIRE(e.dependent_columns().size() == 1);
    CHECK(e.dependent_columns()[0] == 2);
  }
}

TEST_CASE("identity features reproduce lambda") {
  oracle::Rng rng(8);
  const ChainSpec chain = random_chain(rng, 4);
  const auto system = projected_system(chain, FeatureMatrix(Matrix::Identity(4, 4)));
  CHECK((system.q - system.gamma.entries).norm() < 1e-12);
  CHECK(system.mu == doctest::Approx(perron_pair(system.gamma.entries).value).epsilon(1e-12));
}

TEST_CASE("closed-form delta matches the matricial route") {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int s = rng.integer(2, 8);
    const int m = rng.integer(1, s);
    const ChainSpec chain = random_chain(rng, s);
    const FeatureMatrix phi(oracle::star_features(rng, s, m));
    const auto pi = stationary_distribution(chain);
    const auto gamma = multiplicative_matrix(chain);
    const Matrix expected = oracle::projected(gamma.entries, oracle::stationary(chain.p), phi.phi());
    const Matrix closed = delta_closed_form(gamma.entries, pi.pi, phi);
    CHECK((closed - expected).cwiseAbs().maxCoeff() < 1e-12 * expected.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("closed form refuses non-star features") {
  Matrix p = Matrix::Constant(2, 2, 0.5);
  const auto chain = ChainSpec::create(p, Matrix::Zero(2, 2), 0);
  CHECK_THROWS_AS(delta_closed_form(chain, FeatureMatrix(Matrix::Ones(2, 2))),
                  PreconditionError);
}

TEST_CASE("negative Q is rejected") {
  Matrix p(3, 3);
  p << 0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8;
  const auto chain = ChainSpec::create(p, Matrix::Zero(3, 3), 0);
  Matrix phi(3, 1);
  phi << 1, -1, 0.1;
  CHECK_THROWS_AS(projected_system(chain, FeatureMatrix(phi)), PreconditionError);
}

TEST_CASE("zero-error features give mu = lambda") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int s = rng.integer(3, 8);
    const ChainSpec chain = random_chain(rng, s);
    const auto pi = stationary_distribution(chain);
    const auto gamma = multiplicative_matrix(chain);
    const FeatureMatrix phi = zero_error_features(gamma, pi);
    CHECK(phi.features() == 1);
    const double lambda = oracle::perron_root(gamma.entries);
    const double mu = projected_system(chain, phi).mu;
    CHECK(std::abs(lambda - mu) / lambda < 1e-8);
  }
}

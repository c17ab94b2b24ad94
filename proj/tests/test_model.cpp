#include <doctest.h>

#include <cmath>
#include <random>

#include "tpsir/errors.hpp"
#include "tpsir/model.hpp"

using namespace tpsir;

namespace {

ModelParams single_pathogen1(double r01) {
  ModelParams p;
  p.beta1 = r01 * (p.nu1 + p.mu);
  return p;
}

State random_state(std::mt19937_64& rng, double n_pop) {
  // Random point on the scaled simplex.
  std::exponential_distribution<double> expo(1.0);
  State x;
  double sum = 0.0;
  for (int i = 0; i < kCompartments; ++i) {
    x[i] = expo(rng);
    sum += x[i];
  }
  return x * (n_pop / sum);
}

ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r0_range(0.2, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelParams p;
  p.beta1 = r0_range(rng) * (p.nu1 + p.mu);
  p.beta2 = r0_range(rng) * (p.nu2 + p.mu);
  p.a = unit(rng) * p.beta1;
  p.b = unit(rng) * p.beta1;
  p.c = unit(rng) * p.beta2;
  p.d = unit(rng) * p.beta2;
  return p;
}

}  // namespace

TEST_CASE("rhs vanishes at the disease-free equilibrium") {
  std::mt19937_64 rng(1);
  ModelParams p = random_params(rng);
  State dfe = State::Zero();
  dfe[kSS] = p.n_pop;
  const State f = rhs(dfe, p);
  CHECK(f.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("rhs vanishes at EE1 when r01 > 1") {
  ModelParams p = single_pathogen1(2.0);
  const auto eqs = equilibria(p);
  REQUIRE(eqs.size() == 2);
  CHECK(eqs[1].kind == EquilibriumKind::EE1);
  const State f = rhs(eqs[1].state, p);
  CHECK(f.cwiseAbs().maxCoeff() < 1e-9 * p.n_pop);
}

TEST_CASE("rhs matches the hand evaluation for a one-infected seed") {
  ModelParams p;
  p.beta1 = 0.5;
  const double n = p.n_pop;
  State x = State::Zero();
  x[kSS] = n - 1.0;
  x[kSI] = 1.0;
  const State f = rhs(x, p);
  const double expected = 0.5 * (1.0 / n) * (n - 1.0) - (p.nu1 + p.mu) * 1.0;
  CHECK(f[kSI] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("component sum of rhs is exactly the demographic balance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = random_params(rng);
    const State x = random_state(rng, p.n_pop);
    const State f = rhs(x, p);
    const double expected = p.mu * p.n_pop - p.mu * x.sum();
    CHECK(f.sum() == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("rhs commutes with the pathogen swap") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = random_params(rng);
    const State x = random_state(rng, p.n_pop);
    const State lhs = swap_state<double>(rhs(x, p));
    const State rhs_swapped = rhs(swap_state(x), p.swapped());
    CHECK((lhs - rhs_swapped).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("reproduction numbers") {
  SUBCASE("beta1 pinned to 1.5x the removal rate") {
    ModelParams p = single_pathogen1(1.5);
    CHECK(r0(p).r01 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(r0(p).r0 == doctest::Approx(1.5).epsilon(1e-14));
  }
  SUBCASE("no transmission, no reproduction") {
    ModelParams p;
    CHECK(r0(p).r0 == 0.0);
  }
  SUBCASE("frozen arithmetic check") {
    ModelParams p;
    p.beta1 = 0.3;
    CHECK(r0(p).r01 == doctest::Approx(2.099463150975093).epsilon(1e-14));
  }
}

TEST_CASE("equilibria existence follows the reproduction numbers") {
  SUBCASE("subthreshold gives only the DFE") {
    ModelParams p;
    p.beta1 = 0.5 * (p.nu1 + p.mu);
    p.beta2 = 0.9 * (p.nu2 + p.mu);
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].kind == EquilibriumKind::DFE);
    CHECK(eqs[0].state[kSS] == p.n_pop);
  }
  SUBCASE("r01 = 2 gives EE1 with half the population susceptible") {
    const auto eqs = equilibria(single_pathogen1(2.0));
    REQUIRE(eqs.size() == 2);
    CHECK(eqs[1].state[kSS] == doctest::Approx(5e5).epsilon(1e-12));
  }
  SUBCASE("symmetric rates give a swapped pair") {
    ModelParams p = single_pathogen1(2.0);
    p.beta2 = p.beta1;
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 3);
    CHECK(eqs[1].kind == EquilibriumKind::EE1);
    CHECK(eqs[2].kind == EquilibriumKind::EE2);
    const State mirrored = swap_state(eqs[1].state);
    CHECK((eqs[2].state - mirrored).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("residuals stay below 1e-9 N for random parameter draws") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const ModelParams p = random_params(rng);
      for (const auto& eq : equilibria(p)) {
        CHECK(rhs(eq.state, p).cwiseAbs().maxCoeff() < 1e-9 * p.n_pop);
      }
    }
  }
}

TEST_CASE("DFE stability") {
  SUBCASE("stable below threshold") {
    ModelParams p;
    p.beta1 = 0.5 * (p.nu1 + p.mu);
    p.beta2 = 0.5 * (p.nu2 + p.mu);
    CHECK(dfe_stability(p) == Stability::Stable);
  }
  SUBCASE("unstable above threshold") {
    CHECK(dfe_stability(single_pathogen1(1.5)) == Stability::Unstable);
  }
  SUBCASE("marginal case refuses to decide") {
    ModelParams p = single_pathogen1(1.0);
    CHECK_THROWS_AS(dfe_stability(p), MarginalCase);
  }
  SUBCASE("the Jacobian at the DFE carries the analytic growth rate") {
    const ModelParams p = single_pathogen1(1.5);
    State dfe = State::Zero();
    dfe[kSS] = p.n_pop;
    const Matrix9d j = finite_difference_jacobian(dfe, p);
    // Infection of susceptibles feeds back through the SI column.
    CHECK(j(kSI, kSI) == doctest::Approx(p.beta1 - p.nu1 - p.mu).epsilon(1e-9));
    const Eigen::EigenSolver<Matrix9d> solver(j);
    double max_real = -1e300;
    for (int i = 0; i < kCompartments; ++i) {
      max_real = std::max(max_real, solver.eigenvalues()[i].real());
    }
    CHECK(max_real == doctest::Approx(p.beta1 - p.nu1 - p.mu).epsilon(1e-6));
  }
}

TEST_CASE("finite-difference Jacobian matches the analytic one") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const ModelParams p = random_params(rng);
    const State x = random_state(rng, p.n_pop);
    const Matrix9d fd = finite_difference_jacobian(x, p);
    const Matrix9d an = rhs_jacobian(x, p);
    const double scale = an.cwiseAbs().maxCoeff();
    CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-5 * scale);
  }
}

TEST_CASE("replacement numbers") {
  SUBCASE("equal the reproduction numbers at the DFE") {
    std::mt19937_64 rng(37);
    const ModelParams p = random_params(rng);
    State dfe = State::Zero();
    dfe[kSS] = p.n_pop;
    const auto [r1, r2] = replacement_numbers(dfe, p);
    CHECK(r1 == r0(p).r01);
    CHECK(r2 == r0(p).r02);
  }
  SUBCASE("vanish without transmission") {
    ModelParams p;
    std::mt19937_64 rng(41);
    const State x = random_state(rng, p.n_pop);
    const auto [r1, r2] = replacement_numbers(x, p);
    CHECK(r1 == 0.0);
    CHECK(r2 == 0.0);
  }
}

TEST_CASE("regime classification") {
  ModelParams p;
  p.beta1 = 0.3;
  p.beta2 = 0.25;
  SUBCASE("perfect cross immunity") {
    CHECK(classify_regime(p) == RegimeLabel::CompetitiveExclusion);
  }
  SUBCASE("one-way superinfection") {
    p.a = p.b = p.beta1;
    CHECK(classify_regime(p) == RegimeLabel::SuperinfectionBy1);
    ModelParams q;
    q.beta1 = 0.3;
    q.beta2 = 0.25;
    q.c = q.d = q.beta2;
    CHECK(classify_regime(q) == RegimeLabel::SuperinfectionBy2);
  }
  SUBCASE("cocirculation without coinfection") {
    p.b = p.d = p.beta1;
    CHECK(classify_regime(p) == RegimeLabel::Cocirculation);
  }
  SUBCASE("everything active is the general model") {
    p.a = p.b = p.c = p.d = 0.2;
    CHECK(classify_regime(p) == RegimeLabel::General);
  }
  SUBCASE("mixed below/above threshold falls back to general") {
    p.a = p.beta1;
    CHECK(classify_regime(p) == RegimeLabel::General);
  }
  SUBCASE("threshold scales with the dominant contact rate") {
    p.a = p.b = p.beta1;
    p.c = p.d = 0.04 * p.beta1;  // below 0.05 * max(beta)
    CHECK(classify_regime(p) == RegimeLabel::SuperinfectionBy1);
    CHECK(classify_regime(p, 0.01) == RegimeLabel::General);
  }
}

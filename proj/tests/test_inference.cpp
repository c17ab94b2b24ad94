#include <doctest.h>

#include <cmath>
#include <random>

#include "tpsir/inference.hpp"
#include "tpsir/integrate.hpp"
#include "tpsir/observation.hpp"

using namespace tpsir;

TEST_CASE("sample quantiles interpolate linearly") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(sample_quantile(v, 0.0) == 1.0);
  CHECK(sample_quantile(v, 1.0) == 4.0);
  CHECK(sample_quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(sample_quantile(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("bimodality detector") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  SUBCASE("a single Gaussian is not bimodal") {
    Eigen::VectorXd x(8000);
    for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    CHECK_FALSE(is_bimodal(fd_histogram(x)));
  }
  SUBCASE("a separated mixture is bimodal") {
    Eigen::VectorXd x(8000);
    for (int i = 0; i < x.size(); ++i) {
      x[i] = (i % 2 == 0 ? -4.0 : 4.0) + gauss(rng);
    }
    CHECK(is_bimodal(fd_histogram(x)));
  }
  SUBCASE("a shallow valley does not count") {
    Histogram h;
    h.edges = {0, 1, 2, 3, 4, 5, 6, 7};
    h.counts = {100, 90, 60, 55, 60, 90, 100};  // valley well above half
    CHECK_FALSE(is_bimodal(h));
    h.counts = {100, 90, 10, 5, 10, 90, 100};  // deep wide valley
    CHECK(is_bimodal(h));
  }
  SUBCASE("constant draws produce a single bin and no flag") {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(100, 2.5);
    CHECK_FALSE(is_bimodal(fd_histogram(x)));
  }
}

TEST_CASE("map estimate") {
  PosteriorSample s;
  s.draws.resize(3, 2);
  s.draws << 1.0, 2.0, 1.5, 2.5, 0.5, 1.0;
  s.log_post.resize(3);
  s.log_post << -5.0, -2.0, -9.0;
  s.iat = Eigen::VectorXd::Ones(2);

  SUBCASE("argmax over draws") {
    const MapEstimate est = map_estimate(s);
    CHECK(est.point[0] == 1.5);
    CHECK(est.point[1] == 2.5);
    CHECK(est.log_post == -2.0);
  }
  SUBCASE("all draws equal returns that draw") {
    PosteriorSample t;
    t.draws = Eigen::MatrixXd::Constant(4, 2, 3.0);
    t.log_post = Eigen::VectorXd::Constant(4, -1.0);
    const MapEstimate est = map_estimate(t);
    CHECK(est.point[0] == 3.0);
    CHECK(est.log_post == -1.0);
  }
  SUBCASE("polish never decreases the target and finds the mode") {
    const LogDensity target = [](const Eigen::VectorXd& x) {
      return -(x[0] - 1.7) * (x[0] - 1.7) - 2.0 * (x[1] - 2.2) * (x[1] - 2.2);
    };
    const MapEstimate raw = map_estimate(s);
    const MapEstimate polished = map_estimate(s, true, target);
    CHECK(polished.log_post >= target(raw.point));
    CHECK(polished.point[0] == doctest::Approx(1.7).epsilon(1e-6));
    CHECK(polished.point[1] == doctest::Approx(2.2).epsilon(1e-6));
  }
}

TEST_CASE("replacement series on a staggered two-pathogen season") {
  // Pathogen 2 leads with the higher reproduction number; pathogen 1 follows
  // by superinfecting the recovered pool.
  ModelParams p;
  p.beta2 = 2.2 * (p.nu2 + p.mu);
  p.beta1 = 1.3 * (p.nu1 + p.mu);
  p.a = 0.25;
  p.b = 0.25;
  p.c = 1e-4;
  p.d = 1e-4;
  State x0 = State::Zero();
  x0[kIS] = 30.0;
  x0[kSI] = 3.0;
  x0[kSS] = p.n_pop - 33.0;

  const Trajectory traj = integrate(x0, p, 0.0, 210.0, 1e-8);
  std::vector<double> grid;
  for (double t = 0.0; t <= 210.0; t += 1.0) grid.push_back(t);
  const ReplacementSeries series = replacement_series(traj, p, grid);

  CHECK(series.r2.front() > series.r1.front());
  CHECK(series.r1.front() == doctest::Approx(r0(p).r01).epsilon(1e-4));
  REQUIRE(series.crossovers.size() == 1);
  CHECK(series.crossovers.front() > 0.0);
  CHECK(series.crossovers.front() < 210.0);
  // After the crossover the follower keeps the fitness edge to season end.
  CHECK(series.r1.back() > series.r2.back());
}

TEST_CASE("fit report summarizes draws faithfully") {
  const ModelParams fixed;
  ObservationWindow w;
  for (int i = 0; i <= 8; ++i) w.week_bounds.push_back(7.0 * i);
  w.counts = {2, 5, 9, 14, 12, 7, 3, 1};

  Theta base;
  base.beta1 = 1.5 * (fixed.nu1 + fixed.mu);
  base.beta2 = 1e-8;
  base.a = base.b = base.c = base.d = 1e-8;
  base.x_si0 = 10.0;
  base.x_is0 = 1e-8;
  base.k_scale = 0.01;

  SUBCASE("point-mass draws give zero-width quantiles and one regime") {
    PosteriorSample s;
    s.draws.resize(50, Theta::kDim);
    for (int i = 0; i < 50; ++i) s.draws.row(i) = base.to_vector().transpose();
    s.log_post = Eigen::VectorXd::Constant(50, -3.0);
    s.iat = Eigen::VectorXd::Ones(Theta::kDim);
    const FitReport rep = fit_report(s, w, fixed);
    for (int j = 0; j < Theta::kDim; ++j) {
      CHECK(rep.quantiles[static_cast<std::size_t>(j)].q025 ==
            rep.quantiles[static_cast<std::size_t>(j)].q975);
    }
    CHECK(rep.regime_counts[static_cast<std::size_t>(RegimeLabel::CompetitiveExclusion)] == 50);
    CHECK(rep.regime_mode == RegimeLabel::CompetitiveExclusion);
    CHECK(rep.map_weekly_incidence.size() == 8);
  }
  SUBCASE("mirrored contact-rate modes raise the bimodality flag") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 0.002);
    PosteriorSample s;
    const int n = 2000;
    s.draws.resize(n, Theta::kDim);
    Theta alt = base.swapped();
    alt.x_is0 = 10.0;  // keep the seeds identifiable
    alt.x_si0 = 1e-8;
    alt.k_scale = base.k_scale;
    for (int i = 0; i < n; ++i) {
      Theta t = (i % 2 == 0) ? base : alt;
      t.beta1 = std::max(t.beta1 + noise(rng), 1e-9);
      t.beta2 = std::max(t.beta2 + noise(rng), 1e-9);
      s.draws.row(i) = t.to_vector().transpose();
    }
    s.log_post = Eigen::VectorXd::Constant(n, -3.0);
    s.iat = Eigen::VectorXd::Ones(Theta::kDim);
    const FitReport rep = fit_report(s, w, fixed);
    CHECK(rep.bimodal[0]);  // beta1 splits between ~0 and ~0.21
    CHECK(rep.bimodal[1]);
  }
}

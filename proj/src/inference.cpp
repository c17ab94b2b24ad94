#include "tpsir/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpsir {

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_quantile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Histogram fd_histogram(const Eigen::VectorXd& values) {
  Histogram h;
  const auto n = values.size();
  if (n == 0) return h;
  std::vector<double> v(values.data(), values.data() + n);
  const double q25 = sample_quantile(v, 0.25);
  const double q75 = sample_quantile(v, 0.75);
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  const double iqr = q75 - q25;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));

  int nbins = 1;
  if (width > 0.0 && hi > lo) {
    nbins = static_cast<int>(std::ceil((hi - lo) / width));
    nbins = std::clamp(nbins, 1, 400);
  }
  h.edges.resize(static_cast<std::size_t>(nbins) + 1);
  for (int i = 0; i <= nbins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / nbins;
  }
  h.counts.assign(static_cast<std::size_t>(nbins), 0);
  for (double x : v) {
    int bin = hi > lo ? static_cast<int>((x - lo) / (hi - lo) * nbins) : 0;
    bin = std::clamp(bin, 0, nbins - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  return h;
}

bool is_bimodal(const Histogram& h) {
  if (h.counts.size() < 3) return false;
  // Light 3-bin smoothing: single-bin sampling spikes in an autocorrelated
  // chain's histogram must not read as modes, while genuinely separated modes
  // (many low bins between two towers) survive untouched.
  const std::size_t n = h.counts.size();
  std::vector<double> smooth(n);
  double tallest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = static_cast<double>(h.counts[i]);
    double m = 1.0;
    if (i > 0) {
      sum += static_cast<double>(h.counts[i - 1]);
      m += 1.0;
    }
    if (i + 1 < n) {
      sum += static_cast<double>(h.counts[i + 1]);
      m += 1.0;
    }
    smooth[i] = sum / m;
    tallest = std::max(tallest, smooth[i]);
  }

  // Compress equal-value runs so plateaus count as one candidate peak.
  struct Run {
    double value;
    std::size_t first;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < n; ++i) {
    if (runs.empty() || runs.back().value != smooth[i]) runs.push_back({smooth[i], i});
  }
  std::vector<std::size_t> peaks;  // indices into runs
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const bool up = r == 0 || runs[r].value > runs[r - 1].value;
    const bool down = r + 1 == runs.size() || runs[r].value > runs[r + 1].value;
    // Peaks below a fifth of the tallest bin are sampling noise, not modes.
    if (up && down && 5.0 * runs[r].value >= tallest) peaks.push_back(r);
  }
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    for (std::size_t j = i + 1; j < peaks.size(); ++j) {
      const double smaller = std::min(runs[peaks[i]].value, runs[peaks[j]].value);
      double valley = runs[peaks[i]].value;
      for (std::size_t r = peaks[i] + 1; r < peaks[j]; ++r) {
        valley = std::min(valley, runs[r].value);
      }
      if (valley < 0.5 * smaller) return true;
    }
  }
  return false;
}

namespace {

// Golden-section maximization of g on [lo, hi]; returns the best abscissa.
template <class F>
std::pair<double, double> golden_max(const F& g, double lo, double hi, int iters = 60) {
  const double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

MapEstimate map_estimate(const PosteriorSample& sample, bool polish, const LogDensity& target) {
  if (sample.size() == 0) throw std::invalid_argument("map_estimate: empty sample");
  Eigen::Index best = 0;
  sample.log_post.maxCoeff(&best);
  MapEstimate est{sample.draws.row(best).transpose(), sample.log_post[best]};
  if (!polish) return est;
  if (!target) throw std::invalid_argument("map_estimate: polish requires the target");

  Eigen::VectorXd x = est.point;
  double fx = est.log_post;
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < x.size(); ++j) {
      const double span = std::abs(x[j]) > 0 ? std::abs(x[j]) : 1e-8;
      const double lo = x[j] > 0 ? 0.5 * x[j] : x[j] - span;
      const double hi = x[j] > 0 ? 2.0 * x[j] : x[j] + span;
      auto slice = [&](double v) {
        Eigen::VectorXd y = x;
        y[j] = v;
        return target(y);
      };
      const auto [v, fv] = golden_max(slice, lo, hi);
      if (fv > fx) {
        x[j] = v;
        fx = fv;
      }
    }
  }
  if (fx > est.log_post) {
    est.point = x;
    est.log_post = fx;
  }
  return est;
}

ReplacementSeries replacement_series(const Trajectory& traj, const ModelParams& p,
                                     std::vector<double> grid) {
  ReplacementSeries out;
  if (grid.empty()) grid = traj.times();
  out.t = std::move(grid);
  out.r1.reserve(out.t.size());
  out.r2.reserve(out.t.size());
  for (double t : out.t) {
    const auto [r1, r2] = replacement_numbers(traj.at(t), p);
    out.r1.push_back(r1);
    out.r2.push_back(r2);
  }
  for (std::size_t i = 1; i < out.t.size(); ++i) {
    const double d0 = out.r1[i - 1] - out.r2[i - 1];
    const double d1 = out.r1[i] - out.r2[i];
    if (d0 == 0.0) {
      if (i == 1 || (out.r1[i - 2] - out.r2[i - 2]) * d1 < 0.0) {
        out.crossovers.push_back(out.t[i - 1]);
      }
    } else if (d0 * d1 < 0.0) {
      out.crossovers.push_back(out.t[i - 1] +
                               (out.t[i] - out.t[i - 1]) * d0 / (d0 - d1));
    }
  }
  return out;
}

FitReport fit_report(const PosteriorSample& sample, const ObservationWindow& window,
                     const ModelParams& fixed, const FitReportOptions& opts,
                     const LogDensity& target) {
  if (sample.size() == 0) throw std::invalid_argument("fit_report: empty sample");
  window.validate();

  FitReport rep;
  const MapEstimate est = map_estimate(sample, opts.polish_map, target);
  rep.map_theta = Theta::from_vector(est.point);
  rep.map_log_post = est.log_post;
  rep.iat = sample.iat;

  for (int j = 0; j < Theta::kDim; ++j) {
    std::vector<double> col(sample.draws.col(j).data(),
                            sample.draws.col(j).data() + sample.size());
    auto& q = rep.quantiles[static_cast<std::size_t>(j)];
    q.q025 = sample_quantile(col, 0.025);
    q.q25 = sample_quantile(col, 0.25);
    q.q50 = sample_quantile(col, 0.50);
    q.q75 = sample_quantile(col, 0.75);
    q.q975 = sample_quantile(col, 0.975);
    rep.bimodal[static_cast<std::size_t>(j)] = is_bimodal(fd_histogram(sample.draws.col(j)));
  }

  for (std::int64_t i = 0; i < sample.size(); ++i) {
    const Theta t = Theta::from_vector(sample.draws.row(i).transpose());
    const RegimeLabel lab = classify_regime(t.to_params(fixed), opts.regime_rel_tol);
    ++rep.regime_counts[static_cast<std::size_t>(lab)];
  }
  int mode = 0;
  for (int k = 1; k < kRegimeCount; ++k) {
    if (rep.regime_counts[static_cast<std::size_t>(k)] >
        rep.regime_counts[static_cast<std::size_t>(mode)]) {
      mode = k;
    }
  }
  rep.regime_mode = static_cast<RegimeLabel>(mode);

  // MAP dynamics on a daily grid across the observation span.
  const ModelParams map_params = rep.map_theta.to_params(fixed);
  const Trajectory traj = integrate(initial_state(rep.map_theta, fixed.n_pop), map_params,
                                    window.t_begin(), window.t_end(), opts.integrator_tol);
  for (double t = window.t_begin(); t <= window.t_end() + 1e-9; t += opts.grid_step_days) {
    rep.traj_times.push_back(std::min(t, window.t_end()));
  }
  for (double t : rep.traj_times) rep.traj_states.push_back(traj.at(t));
  rep.replacement = replacement_series(traj, map_params, rep.traj_times);
  rep.map_weekly_incidence = expected_weekly_incidence(traj, rep.map_theta, window, fixed);
  return rep;
}

}  // namespace tpsir

#ifndef TPSIR_INFERENCE_HPP
#define TPSIR_INFERENCE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "tpsir/model.hpp"
#include "tpsir/observation.hpp"
#include "tpsir/sampler.hpp"
#include "tpsir/types.hpp"

namespace tpsir {

// Type-7 (linear interpolation) sample quantile.
double sample_quantile(std::vector<double> values, double p);

struct Histogram {
  std::vector<double> edges;        // bin edges, size counts+1
  std::vector<std::int64_t> counts;
};

// Freedman-Diaconis binning; degenerate samples give a single bin.
Histogram fd_histogram(const Eigen::VectorXd& values);

// True when the histogram has two local maxima separated by a valley below
// half of the smaller peak.
bool is_bimodal(const Histogram& h);

struct MapEstimate {
  Eigen::VectorXd point;
  double log_post = 0.0;
};

// Argmax over retained draws; with polish, coordinate-wise golden-section
// refinement of the target that never decreases the log posterior.
MapEstimate map_estimate(const PosteriorSample& sample, bool polish = false,
                         const LogDensity& target = {});

struct QuantileRow {
  double q025 = 0, q25 = 0, q50 = 0, q75 = 0, q975 = 0;
};

struct ReplacementSeries {
  std::vector<double> t;
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<double> crossovers;  // times where r1 - r2 changes sign
};

// Replacement-number series along a trajectory, sampled on `grid` (or the
// trajectory's own grid when empty), with all crossovers located.
ReplacementSeries replacement_series(const Trajectory& traj, const ModelParams& p,
                                     std::vector<double> grid = {});

inline constexpr int kRegimeCount = 5;

struct FitReport {
  Theta map_theta;
  double map_log_post = 0.0;
  std::array<QuantileRow, Theta::kDim> quantiles;
  std::array<std::int64_t, kRegimeCount> regime_counts{};
  RegimeLabel regime_mode = RegimeLabel::General;
  std::array<bool, Theta::kDim> bimodal{};
  Eigen::VectorXd iat;
  std::vector<double> traj_times;        // daily grid over the window span
  std::vector<State> traj_states;        // MAP trajectory on that grid
  ReplacementSeries replacement;         // MAP replacement numbers
  std::vector<double> map_weekly_incidence;
};

struct FitReportOptions {
  double regime_rel_tol = kDefaultRegimeRelTol;
  double integrator_tol = kDefaultIntegratorTol;
  double grid_step_days = 1.0;
  bool polish_map = false;
};

// Assembles the posterior summary: MAP point and trajectory, quantile table,
// regime-label histogram, per-coordinate bimodality flags, replacement
// numbers with crossover times and the MAP expected weekly incidence.
FitReport fit_report(const PosteriorSample& sample, const ObservationWindow& window,
                     const ModelParams& fixed, const FitReportOptions& opts = {},
                     const LogDensity& target = {});

}  // namespace tpsir

#endif  // TPSIR_INFERENCE_HPP

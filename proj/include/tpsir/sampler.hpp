#ifndef TPSIR_SAMPLER_HPP
#define TPSIR_SAMPLER_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tpsir {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

enum class SamplerAlgorithm { TWalk, AdaptiveRwm };

// Move kernels of the two-point sampler, in weight order.
enum TWalkKernel : int { kWalk = 0, kTraverse = 1, kHop = 2, kBlow = 3 };

struct SamplerConfig {
  std::int64_t iterations = 200'000;
  std::int64_t burn_in = 50'000;
  std::int64_t thinning = 10;
  std::uint64_t seed = 0;
  SamplerAlgorithm algorithm = SamplerAlgorithm::TWalk;
  // Published default mix: walk/traverse carry almost all moves.
  std::array<double, 4> move_weights{0.4918, 0.4918, 0.0082, 0.0082};
  // Componentwise open lower bound of the support; empty disables the check.
  std::vector<double> lower_bounds;

  void validate() const;
};

struct KernelStats {
  std::int64_t proposed = 0;
  std::int64_t accepted = 0;
  double rate() const { return proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct PosteriorSample {
  Eigen::MatrixXd draws;     // one retained draw per row
  Eigen::VectorXd log_post;  // matching log-target values
  std::array<KernelStats, 4> kernel_stats{};
  double acceptance_rate = 0.0;
  Eigen::VectorXd iat;  // integrated autocorrelation time per coordinate
  std::vector<std::string> warnings;
  std::int64_t iterations = 0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 0;
  std::uint64_t seed = 0;

  std::int64_t size() const { return draws.rows(); }
  int dim() const { return static_cast<int>(draws.cols()); }
};

// Two-point self-adjusting sampler (walk/traverse/hop/blow kernels applied to
// random coordinate subsets of one point conditioned on the other, with
// Metropolis-Hastings correction), reimplemented from its published
// description; or the adaptive random-walk fallback when configured.
//
// init1 and init2 must differ in at least one coordinate and both must have
// finite target value (InitInfeasible otherwise).  Identical inputs and seed
// give bit-identical output.
PosteriorSample sample_posterior(const LogDensity& target, const Eigen::VectorXd& init1,
                                 const Eigen::VectorXd& init2, const SamplerConfig& cfg);

// Geyer initial-positive-sequence estimate of the integrated autocorrelation
// time of a scalar chain (>= 1; equals ~1 for white noise).
double integrated_autocorr_time(const Eigen::VectorXd& chain);

}  // namespace tpsir

#endif  // TPSIR_SAMPLER_HPP

#include "tpsir/sampler.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tpsir/errors.hpp"

namespace tpsir {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Expected number of coordinates updated per move.
constexpr double kTargetMovedCoords = 4.0;
constexpr double kWalkParam = 1.5;      // a_w
constexpr double kTraverseParam = 6.0;  // a_t

struct Rng {
  std::mt19937_64 engine;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  std::normal_distribution<double> gauss{0.0, 1.0};

  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform() { return unit(engine); }
  double normal() { return gauss(engine); }
};

bool in_support(const Eigen::VectorXd& x, const std::vector<double>& lb) {
  if (lb.empty()) return true;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] <= lb[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

// Scale factor of the traverse move; density proportional to beta^(at-1)
// below 1 and beta^-(at+1) above.
double draw_traverse_beta(Rng& rng) {
  const double at = kTraverseParam;
  if (rng.uniform() < (at - 1.0) / (2.0 * at)) {
    return std::exp(std::log(rng.uniform()) / (at + 1.0));
  }
  return std::exp(std::log(rng.uniform()) / (1.0 - at));
}

struct Proposal {
  Eigen::VectorXd y;
  double log_hastings = 0.0;  // log of the proposal-ratio correction
  bool feasible = true;
};

Proposal propose(TWalkKernel kernel, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                 const std::vector<int>& phi, Rng& rng) {
  Proposal out;
  out.y = p;
  const int nphi = static_cast<int>(phi.size());
  switch (kernel) {
    case kWalk: {
      const double aw = kWalkParam;
      for (int j : phi) {
        const double u = rng.uniform();
        const double z = aw / (1.0 + aw) * (aw * u * u + 2.0 * u - 1.0);
        out.y[j] = p[j] + (p[j] - q[j]) * z;
      }
      break;
    }
    case kTraverse: {
      const double beta = draw_traverse_beta(rng);
      for (int j : phi) out.y[j] = q[j] + beta * (q[j] - p[j]);
      out.log_hastings = (nphi - 2) * std::log(beta);
      break;
    }
    case kHop: {
      double sigma = 0.0;
      for (int j : phi) sigma = std::max(sigma, std::abs(p[j] - q[j]));
      sigma /= 3.0;
      if (sigma <= 0.0) {
        out.feasible = false;
        break;
      }
      double fwd = 0.0;
      for (int j : phi) {
        const double step = sigma * rng.normal();
        out.y[j] = p[j] + step;
        fwd += -std::log(sigma) - 0.5 * step * step / (sigma * sigma);
      }
      double sigma_rev = 0.0;
      for (int j : phi) sigma_rev = std::max(sigma_rev, std::abs(out.y[j] - q[j]));
      sigma_rev /= 3.0;
      if (sigma_rev <= 0.0) {
        out.feasible = false;
        break;
      }
      double rev = 0.0;
      for (int j : phi) {
        const double diff = p[j] - out.y[j];
        rev += -std::log(sigma_rev) - 0.5 * diff * diff / (sigma_rev * sigma_rev);
      }
      out.log_hastings = rev - fwd;
      break;
    }
    case kBlow: {
      double sigma = 0.0;
      for (int j : phi) sigma = std::max(sigma, std::abs(q[j] - p[j]));
      if (sigma <= 0.0) {
        out.feasible = false;
        break;
      }
      double fwd = 0.0;
      for (int j : phi) {
        const double step = sigma * rng.normal();
        out.y[j] = q[j] + step;
        fwd += -std::log(sigma) - 0.5 * step * step / (sigma * sigma);
      }
      double sigma_rev = 0.0;
      for (int j : phi) sigma_rev = std::max(sigma_rev, std::abs(q[j] - out.y[j]));
      if (sigma_rev <= 0.0) {
        out.feasible = false;
        break;
      }
      double rev = 0.0;
      for (int j : phi) {
        const double diff = p[j] - q[j];
        rev += -std::log(sigma_rev) - 0.5 * diff * diff / (sigma_rev * sigma_rev);
      }
      out.log_hastings = rev - fwd;
      break;
    }
  }
  return out;
}

struct Recorder {
  Eigen::MatrixXd draws;
  Eigen::VectorXd log_post;
  std::int64_t next = 0;

  Recorder(std::int64_t capacity, int dim) : draws(capacity, dim), log_post(capacity) {}

  void maybe_record(std::int64_t iter, const SamplerConfig& cfg, const Eigen::VectorXd& x,
                    double lp) {
    if (iter < cfg.burn_in) return;
    if ((iter - cfg.burn_in) % cfg.thinning != 0) return;
    if (next >= draws.rows()) return;
    draws.row(next) = x.transpose();
    log_post[next] = lp;
    ++next;
  }
};

PosteriorSample run_twalk(const LogDensity& target, Eigen::VectorXd x, Eigen::VectorXd xp,
                          const SamplerConfig& cfg) {
  const int dim = static_cast<int>(x.size());
  Rng rng(cfg.seed);

  double lf_x = target(x);
  double lf_xp = target(xp);
  if (!std::isfinite(lf_x) || !std::isfinite(lf_xp)) {
    throw InitInfeasible("sample_posterior: an initial point has zero target density");
  }
  if ((x.array() == xp.array()).all()) {
    throw InitInfeasible("sample_posterior: initial points must differ somewhere");
  }

  std::array<double, 4> cum{};
  double acc_w = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc_w += cfg.move_weights[static_cast<std::size_t>(k)];
    cum[static_cast<std::size_t>(k)] = acc_w;
  }

  const double pphi = std::min<double>(dim, kTargetMovedCoords) / dim;
  const std::int64_t capacity = (cfg.iterations - cfg.burn_in + cfg.thinning - 1) / cfg.thinning;
  Recorder rec(capacity, dim);
  PosteriorSample out;
  std::vector<int> phi;
  phi.reserve(static_cast<std::size_t>(dim));

  std::int64_t accepted_total = 0;
  for (std::int64_t iter = 0; iter < cfg.iterations; ++iter) {
    const double uk = rng.uniform();
    int kernel = 3;
    for (int k = 0; k < 4; ++k) {
      if (uk <= cum[static_cast<std::size_t>(k)]) {
        kernel = k;
        break;
      }
    }
    const bool move_first = rng.uniform() < 0.5;
    Eigen::VectorXd& p = move_first ? x : xp;
    const Eigen::VectorXd& q = move_first ? xp : x;
    double& lf_p = move_first ? lf_x : lf_xp;

    phi.clear();
    for (int j = 0; j < dim; ++j) {
      if (rng.uniform() < pphi) phi.push_back(j);
    }

    auto& stats = out.kernel_stats[static_cast<std::size_t>(kernel)];
    ++stats.proposed;

    bool accept = false;
    if (phi.empty()) {
      accept = true;  // empty coordinate set: proposal equals the point
    } else {
      Proposal prop = propose(static_cast<TWalkKernel>(kernel), p, q, phi, rng);
      const bool distinct = prop.feasible && !(prop.y.array() == q.array()).all();
      if (distinct && prop.y.allFinite() && in_support(prop.y, cfg.lower_bounds)) {
        const double lf_y = target(prop.y);
        if (lf_y > kNegInf) {
          const double log_alpha = lf_y - lf_p + prop.log_hastings;
          if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
            p = prop.y;
            lf_p = lf_y;
            accept = true;
          }
        }
      }
    }
    if (accept) {
      ++stats.accepted;
      ++accepted_total;
    }
    rec.maybe_record(iter, cfg, x, lf_x);
  }

  out.draws = rec.draws.topRows(rec.next);
  out.log_post = rec.log_post.head(rec.next);
  out.acceptance_rate = static_cast<double>(accepted_total) / cfg.iterations;
  return out;
}

PosteriorSample run_adaptive_rwm(const LogDensity& target, Eigen::VectorXd x,
                                 const SamplerConfig& cfg) {
  const int dim = static_cast<int>(x.size());
  Rng rng(cfg.seed);

  double lf_x = target(x);
  if (!std::isfinite(lf_x)) {
    throw InitInfeasible("sample_posterior: the initial point has zero target density");
  }

  // Per-coordinate scales from running moments, global scale tuned toward a
  // 0.234 acceptance rate; both are frozen once burn-in ends.
  Eigen::VectorXd scale(dim);
  for (int j = 0; j < dim; ++j) scale[j] = 0.1 * std::abs(x[j]) + 1e-8;
  double global = 1.0;
  Eigen::VectorXd mean = x;
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(dim);

  const std::int64_t capacity = (cfg.iterations - cfg.burn_in + cfg.thinning - 1) / cfg.thinning;
  Recorder rec(capacity, dim);
  PosteriorSample out;
  std::int64_t accepted_total = 0;

  for (std::int64_t iter = 0; iter < cfg.iterations; ++iter) {
    Eigen::VectorXd y(dim);
    for (int j = 0; j < dim; ++j) y[j] = x[j] + global * scale[j] * rng.normal();

    ++out.kernel_stats[0].proposed;
    bool accept = false;
    if (in_support(y, cfg.lower_bounds)) {
      const double lf_y = target(y);
      if (lf_y > kNegInf) {
        const double log_alpha = lf_y - lf_x;
        if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
          x = y;
          lf_x = lf_y;
          accept = true;
        }
      }
    }
    if (accept) {
      ++out.kernel_stats[0].accepted;
      ++accepted_total;
    }

    if (iter < cfg.burn_in) {
      const double t = static_cast<double>(iter + 1);
      const Eigen::VectorXd delta = x - mean;
      mean += delta / t;
      m2 += delta.cwiseProduct(x - mean);
      if (iter >= 100) {
        for (int j = 0; j < dim; ++j) {
          scale[j] = std::max(std::sqrt(m2[j] / t), 1e-10);
        }
      }
      global *= std::exp(((accept ? 1.0 : 0.0) - 0.234) / std::sqrt(t));
      global = std::clamp(global, 1e-6, 1e6);
    }
    rec.maybe_record(iter, cfg, x, lf_x);
  }

  out.draws = rec.draws.topRows(rec.next);
  out.log_post = rec.log_post.head(rec.next);
  out.acceptance_rate = static_cast<double>(accepted_total) / cfg.iterations;
  return out;
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(iterations > burn_in) || burn_in < 0) {
    throw std::invalid_argument("SamplerConfig: need iterations > burn_in >= 0");
  }
  if (thinning < 1) throw std::invalid_argument("SamplerConfig: thinning must be >= 1");
  double sum = 0.0;
  for (double w : move_weights) {
    if (w < 0.0) throw std::invalid_argument("SamplerConfig: negative move weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("SamplerConfig: move weights must sum to 1");
  }
}

PosteriorSample sample_posterior(const LogDensity& target, const Eigen::VectorXd& init1,
                                 const Eigen::VectorXd& init2, const SamplerConfig& cfg) {
  cfg.validate();
  if (init1.size() != init2.size() || init1.size() == 0) {
    throw std::invalid_argument("sample_posterior: dimension mismatch");
  }
  if (!cfg.lower_bounds.empty() &&
      cfg.lower_bounds.size() != static_cast<std::size_t>(init1.size())) {
    throw std::invalid_argument("sample_posterior: lower_bounds dimension mismatch");
  }
  if (!in_support(init1, cfg.lower_bounds) || !in_support(init2, cfg.lower_bounds)) {
    throw InitInfeasible("sample_posterior: an initial point lies outside the support");
  }

  PosteriorSample out = cfg.algorithm == SamplerAlgorithm::TWalk
                            ? run_twalk(target, init1, init2, cfg)
                            : run_adaptive_rwm(target, init1, cfg);
  out.iterations = cfg.iterations;
  out.burn_in = cfg.burn_in;
  out.thinning = cfg.thinning;
  out.seed = cfg.seed;

  out.iat.resize(out.dim());
  for (int j = 0; j < out.dim(); ++j) {
    out.iat[j] = integrated_autocorr_time(out.draws.col(j));
  }
  if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.6) {
    out.warnings.push_back("acceptance rate " + std::to_string(out.acceptance_rate) +
                           " outside [0.05, 0.6]; check mixing");
  }
  return out;
}

double integrated_autocorr_time(const Eigen::VectorXd& chain) {
  const auto n = chain.size();
  if (n < 4) return 1.0;
  const double mean = chain.mean();
  const Eigen::VectorXd centered = chain.array() - mean;
  const double gamma0 = centered.squaredNorm() / n;
  if (gamma0 <= 0.0) return 1.0;

  auto gamma = [&](Eigen::Index lag) {
    return centered.head(n - lag).dot(centered.tail(n - lag)) / n;
  };

  // Sum adjacent-pair autocovariances while they stay positive (Geyer).
  double tau = -1.0;
  const Eigen::Index max_lag = n / 3;
  for (Eigen::Index m = 0; 2 * m + 1 <= max_lag; ++m) {
    const double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair / gamma0;
  }
  return std::max(tau, 1.0);
}

}  // namespace tpsir

#include "tpsir/observation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tpsir/errors.hpp"
#include "tpsir/model.hpp"

namespace tpsir {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975362};
constexpr double kGlWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

}  // namespace

GammaPrior GammaPrior::from_mean_cv(double mean, double cv) {
  if (!(mean > 0.0) || !(cv > 0.0)) {
    throw std::invalid_argument("GammaPrior: mean and cv must be positive");
  }
  GammaPrior g;
  g.shape = 1.0 / (cv * cv);
  g.rate = g.shape / mean;
  return g;
}

double GammaPrior::log_pdf(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(x) - rate * x + shape * std::log(rate) - std::lgamma(shape);
}

PriorSpec PriorSpec::defaults(const ModelParams& fixed) {
  PriorSpec s;
  const double mean_beta1 = 1.5 * (fixed.nu1 + fixed.mu);
  const double mean_beta2 = 1.5 * (fixed.nu2 + fixed.mu);
  s.components[0] = GammaPrior::from_mean_cv(mean_beta1, 0.5);  // beta1
  s.components[1] = GammaPrior::from_mean_cv(mean_beta2, 0.5);  // beta2
  s.components[2] = GammaPrior::from_mean_cv(mean_beta1, 0.5);  // a
  s.components[3] = GammaPrior::from_mean_cv(mean_beta1, 0.5);  // b
  s.components[4] = GammaPrior::from_mean_cv(mean_beta2, 0.5);  // c
  s.components[5] = GammaPrior::from_mean_cv(mean_beta2, 0.5);  // d
  s.components[6] = GammaPrior::from_mean_cv(0.1, 1.0);         // x_is0
  s.components[7] = GammaPrior::from_mean_cv(0.1, 1.0);         // x_si0
  s.components[8] = GammaPrior::from_mean_cv(0.05, 0.5);        // k_scale
  return s;
}

double PriorSpec::log_pdf(const Theta& theta) const {
  const Theta::Vector v = theta.to_vector();
  double sum = 0.0;
  for (int i = 0; i < Theta::kDim; ++i) {
    const double lp = components[static_cast<std::size_t>(i)].log_pdf(v[i]);
    if (lp == kNegInf) return kNegInf;
    sum += lp;
  }
  return sum;
}

void ObservationWindow::validate() const {
  if (counts.size() < 4) throw SchemaError("ObservationWindow: need at least 4 weeks");
  if (week_bounds.size() != counts.size() + 1) {
    throw SchemaError("ObservationWindow: need one more boundary than counts");
  }
  for (std::size_t i = 1; i < week_bounds.size(); ++i) {
    if (!(week_bounds[i] > week_bounds[i - 1])) {
      throw SchemaError("ObservationWindow: boundaries must strictly increase");
    }
  }
  for (std::int64_t z : counts) {
    if (z < 0) throw SchemaError("ObservationWindow: negative count");
  }
}

State initial_state(const Theta& theta, double n_pop) {
  if (theta.x_is0 + theta.x_si0 >= n_pop) {
    throw InfeasibleInitial("initial_state: seeded infected exceed the population");
  }
  State x = State::Zero();
  x[kSI] = theta.x_si0;
  x[kIS] = theta.x_is0;
  x[kSS] = n_pop - theta.x_si0 - theta.x_is0;
  return x;
}

double incidence_flow(const State& x, const ModelParams& p) {
  const double l1 = lambda1(x, p.n_pop);
  const double l2 = lambda2(x, p.n_pop);
  return p.beta1 * l1 * x[kSS] + p.beta2 * l2 * x[kSS] + p.a * l1 * x[kIS] +
         p.b * l1 * x[kRS] + p.c * l2 * x[kSI] + p.d * l2 * x[kSR];
}

namespace {

double gl8_flow(const Trajectory& traj, const ModelParams& p, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double integral = 0.0;
  for (int q = 0; q < 4; ++q) {
    integral += kGlWeight[q] * (incidence_flow(traj.at(mid - half * kGlNode[q]), p) +
                                incidence_flow(traj.at(mid + half * kGlNode[q]), p));
  }
  return half * integral;
}

// Integral of the incidence flow over [lo, hi], split at the trajectory's
// step knots: within one step the dense output is polynomial, so the 8-node
// rule integrates it exactly.
double integrate_flow(const Trajectory& traj, const ModelParams& p, double lo, double hi) {
  const auto& knots = traj.times();
  double total = 0.0;
  double a = lo;
  auto it = std::upper_bound(knots.begin(), knots.end(), lo);
  while (a < hi) {
    double b = hi;
    if (it != knots.end() && *it < hi) {
      b = *it;
      ++it;
    }
    if (b > a) total += gl8_flow(traj, p, a, b);
    a = b;
  }
  return total;
}

}  // namespace

std::vector<double> expected_weekly_incidence(const Trajectory& traj, const Theta& theta,
                                              const ObservationWindow& window,
                                              const ModelParams& fixed) {
  window.validate();
  const ModelParams p = theta.to_params(fixed);
  std::vector<double> out(window.weeks());
  for (std::size_t w = 0; w < window.weeks(); ++w) {
    out[w] = theta.k_scale *
             integrate_flow(traj, p, window.week_bounds[w], window.week_bounds[w + 1]);
    if (out[w] < 0.0) out[w] = 0.0;
  }
  return out;
}

std::vector<double> expected_weekly_incidence(const Theta& theta,
                                              const ObservationWindow& window,
                                              const ModelParams& fixed, double tol) {
  window.validate();
  const State x0 = initial_state(theta, fixed.n_pop);
  const Trajectory traj =
      integrate(x0, theta.to_params(fixed), window.t_begin(), window.t_end(), tol);
  return expected_weekly_incidence(traj, theta, window, fixed);
}

double poisson_log_likelihood(const std::vector<double>& means,
                              const std::vector<std::int64_t>& counts) {
  if (means.size() != counts.size()) {
    throw std::invalid_argument("poisson_log_likelihood: size mismatch");
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double m = means[i];
    const double z = static_cast<double>(counts[i]);
    if (m <= 0.0) {
      if (counts[i] == 0) continue;  // Poisson(0) puts all mass at 0
      return kNegInf;
    }
    ll += z * std::log(m) - m - std::lgamma(z + 1.0);
  }
  return ll;
}

double log_likelihood(const Theta& theta, const ObservationWindow& window,
                      const ModelParams& fixed, double tol) {
  return poisson_log_likelihood(expected_weekly_incidence(theta, window, fixed, tol),
                                window.counts);
}

double log_prior(const Theta& theta, const PriorSpec& spec) { return spec.log_pdf(theta); }

PosteriorEvaluator::PosteriorEvaluator(ObservationWindow window, PriorSpec spec,
                                       ModelParams fixed, double tol)
    : window_(std::move(window)), spec_(std::move(spec)), fixed_(fixed), tol_(tol) {
  window_.validate();
  fixed_.validate();
}

double PosteriorEvaluator::operator()(const Theta& theta) const {
  const double lp = log_prior(theta, spec_);
  if (lp == kNegInf) return kNegInf;  // no ODE solve off support
  if (theta.x_is0 + theta.x_si0 >= fixed_.n_pop) return kNegInf;
  try {
    return lp + log_likelihood(theta, window_, fixed_, tol_);
  } catch (const Error&) {
    ++failures_;  // degenerate dynamics: treat as zero posterior mass
    return kNegInf;
  }
}

double log_posterior(const Theta& theta, const ObservationWindow& window,
                     const PriorSpec& spec, const ModelParams& fixed, double tol) {
  return PosteriorEvaluator(window, spec, fixed, tol)(theta);
}

}  // namespace tpsir

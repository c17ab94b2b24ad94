#include "tpsir/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpsir/errors.hpp"
#include "tpsir/model.hpp"

namespace tpsir {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimator).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<State> states,
                       std::vector<State> derivs, double clamp_band)
    : times_(std::move(times)),
      states_(std::move(states)),
      derivs_(std::move(derivs)),
      clamp_band_(clamp_band) {}

State Trajectory::clamp(const State& x) const {
  State y = x;
  for (int i = 0; i < kCompartments; ++i) {
    if (y[i] < 0.0 && y[i] > -clamp_band_) y[i] = 0.0;
  }
  return y;
}

State Trajectory::at(double t) const {
  if (t < times_.front() - 1e-9 || t > times_.back() + 1e-9) {
    throw std::out_of_range("Trajectory::at: t outside the integrated span");
  }
  t = std::clamp(t, times_.front(), times_.back());
  // Index of the step interval [times_[k], times_[k+1]] containing t.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (k + 1 >= times_.size()) k = times_.size() - 2;

  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  // Cubic Hermite in difference form: exact at s=0 and for constant data.
  const double w01 = s * s * (3.0 - 2.0 * s);
  const double wd = h * s * (1.0 - s);
  State y = states_[k] + w01 * (states_[k + 1] - states_[k]) +
            wd * ((1.0 - s) * derivs_[k] - s * derivs_[k + 1]);
  return clamp(y);
}

std::vector<State> Trajectory::sample(const std::vector<double>& grid) const {
  std::vector<State> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(at(t));
  return out;
}

Trajectory integrate(const State& initial, const ModelParams& params, double t0,
                     double t1, double tol) {
  params.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integrate: degenerate time span");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
  if (!initial.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");

  const double n = params.n_pop;
  const double atol = tol * n;
  // The per-step controller runs well inside the requested tolerance so that
  // accumulated drift (and any negative undershoot) stays within the
  // (-tol*N, 0) clamp band instead of tripping the failure threshold.
  const double safety = 20.0;
  const double atol_step = atol / safety;
  const double rtol_step = tol / safety;
  const double span = t1 - t0;
  const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * span;
  const std::size_t max_steps = 4'000'000;

  std::vector<double> times{t0};
  std::vector<State> states{initial};
  std::vector<State> derivs;

  State y = initial;
  State f = rhs(y, params);
  if (!f.allFinite()) throw NonFiniteState("integrate: rhs non-finite at the initial state");
  derivs.push_back(f);

  double t = t0;
  // Crude initial step from the derivative scale; the controller adapts fast.
  double fscale = 0.0;
  for (int i = 0; i < kCompartments; ++i) {
    fscale = std::max(fscale, std::abs(f[i]) / (atol_step + rtol_step * std::abs(y[i])));
  }
  double h = std::min(span, fscale > 0.0 ? 0.01 / fscale : span / 100.0);

  std::size_t steps = 0;
  bool last_nonfinite = false;
  while (t < t1) {
    if (++steps > max_steps) throw StepFailure("integrate: step budget exhausted");
    h = std::min(h, t1 - t);

    const State k1 = f;
    const State k2 = rhs<double>(y + h * (a21 * k1), params);
    const State k3 = rhs<double>(y + h * (a31 * k1 + a32 * k2), params);
    const State k4 = rhs<double>(y + h * (a41 * k1 + a42 * k2 + a43 * k3), params);
    const State k5 = rhs<double>(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), params);
    const State k6 =
        rhs<double>(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), params);
    const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(y_new, params);  // FSAL
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!y_new.allFinite() || !k7.allFinite() || !err.allFinite()) {
      if (h <= h_min) throw NonFiniteState("integrate: state overflowed or became NaN");
      last_nonfinite = true;
      h *= 0.25;
      continue;
    }

    double err_norm = 0.0;
    for (int i = 0; i < kCompartments; ++i) {
      const double scale = atol_step + rtol_step * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm += (err[i] / scale) * (err[i] / scale);
    }
    err_norm = std::sqrt(err_norm / kCompartments);

    if (err_norm <= 1.0) {
      for (int i = 0; i < kCompartments; ++i) {
        if (y_new[i] < -atol) {
          throw StepFailure("integrate: compartment undershoot below -tol*N");
        }
      }
      t += h;
      y = y_new;
      f = k7;
      times.push_back(t);
      states.push_back(y);
      derivs.push_back(f);
      last_nonfinite = false;
    } else if (h <= h_min) {
      throw StepFailure("integrate: cannot meet tolerance at the minimum step size");
    }

    const double factor =
        err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_min) {
      if (last_nonfinite) throw NonFiniteState("integrate: state overflowed or became NaN");
      h = h_min;
    }
  }

  return Trajectory(std::move(times), std::move(states), std::move(derivs), atol);
}

}  // namespace tpsir

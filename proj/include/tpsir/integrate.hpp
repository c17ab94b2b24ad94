#ifndef TPSIR_INTEGRATE_HPP
#define TPSIR_INTEGRATE_HPP

#include <vector>

#include "tpsir/types.hpp"

namespace tpsir {

inline constexpr double kDefaultIntegratorTol = 1e-8;

// Solution of the compartment ODE on the accepted-step grid, with cubic
// Hermite dense evaluation anywhere inside the span.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<State> states,
             std::vector<State> derivs, double clamp_band);

  const std::vector<double>& times() const { return times_; }

  // Grid state with the negative-clamp policy applied.
  State state(std::size_t i) const { return clamp(states_[i]); }

  // Unclamped grid state (exact integrator output).
  const State& raw_state(std::size_t i) const { return states_[i]; }

  std::size_t size() const { return times_.size(); }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  // Dense evaluation at t (clamped); t must lie inside [t_begin, t_end].
  State at(double t) const;

  // Convenience: dense evaluation on an arbitrary grid.
  std::vector<State> sample(const std::vector<double>& grid) const;

 private:
  State clamp(const State& x) const;

  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<State> derivs_;
  double clamp_band_;  // negatives in (-clamp_band, 0) snap to 0
};

// Adaptive Dormand-Prince 5(4) solve of the two-pathogen dynamics over
// [t0, t1].  The local error per step is controlled against the mixed scale
// tol*N + tol*|x|; a component dropping below -tol*N raises StepFailure,
// overflow or NaN raises NonFiniteState.
Trajectory integrate(const State& initial, const ModelParams& params, double t0,
                     double t1, double tol = kDefaultIntegratorTol);

}  // namespace tpsir

#endif  // TPSIR_INTEGRATE_HPP

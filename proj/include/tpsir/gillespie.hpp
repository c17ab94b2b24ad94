#ifndef TPSIR_GILLESPIE_HPP
#define TPSIR_GILLESPIE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "tpsir/types.hpp"

namespace tpsir {

enum class EventKind { Birth, Death, Infection, Recovery };

// One reaction channel: apply adds +1 to target and/or -1 to source.
struct EventSpec {
  std::string_view name;
  EventKind kind;
  int source;  // -1 for birth
  int target;  // -1 for death
};

inline constexpr int kEventCount = 22;

// The full channel table: one birth, nine deaths, six infection routes and
// six recoveries.  Propensities follow the mean-field rates with lambda
// evaluated from the current integer state over the fixed population N.
const std::array<EventSpec, kEventCount>& event_table();

double propensity(int event_id, const CountState& x, const ModelParams& p);

// Sampled jump process, stored compactly as (time, channel) pairs; states are
// reconstructed by replay from the initial state.
class EventTrajectory {
 public:
  EventTrajectory(CountState initial, double t0, double t_end);

  void record(double t, int event_id);

  const CountState& initial_state() const { return initial_; }
  const CountState& final_state() const { return final_; }
  double t_begin() const { return t0_; }
  double t_end() const { return t_end_; }
  std::size_t event_count() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::uint8_t>& events() const { return events_; }

  // Cumulative number of firings per channel.
  const std::array<std::int64_t, kEventCount>& counters() const { return counters_; }
  std::int64_t total_infections() const;

  // State replay: visit(t, event_id, state_after_event) for every event.
  void replay(const std::function<void(double, int, const CountState&)>& visit) const;

  // State at each grid time (left-continuous: all events with time <= t applied).
  std::vector<CountState> states_on_grid(const std::vector<double>& grid) const;

 private:
  CountState initial_;
  CountState final_;
  double t0_;
  double t_end_;
  std::vector<double> times_;
  std::vector<std::uint8_t> events_;
  std::array<std::int64_t, kEventCount> counters_{};
};

// Exact direct-method simulation of the event process up to t_end.
// Deterministic for a given seed.  Extinction before t_end is not an error;
// the trajectory simply records no further events.
EventTrajectory gillespie_run(const CountState& initial, const ModelParams& params,
                              double t_end, std::uint64_t seed);

// Infection events (all six channels) per week; week_bounds has one more
// entry than the returned series.  An event at time t lands in week i when
// week_bounds[i] <= t < week_bounds[i+1].
std::vector<std::int64_t> weekly_incidence_counts(const EventTrajectory& traj,
                                                  const std::vector<double>& week_bounds);

// Seed for run `run_index` of an ensemble keyed by `base_seed` (splitmix64).
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index);

struct EnsembleSummary {
  std::vector<double> grid;
  // Mean / variance of a chosen state functional across runs, conditional on
  // the run reaching `survival_threshold` cumulative infections, and
  // unconditional.
  std::vector<double> mean_conditional;
  std::vector<double> var_conditional;
  std::vector<double> mean_unconditional;
  std::vector<double> var_unconditional;
  std::size_t n_runs = 0;
  std::size_t n_surviving = 0;
};

// Ensemble of independent runs summarized on a time grid; `functional` maps
// a state to the scalar being averaged (e.g. infected-with-1 total).
EnsembleSummary gillespie_ensemble(const CountState& initial, const ModelParams& params,
                                   double t_end, std::size_t n_runs, std::uint64_t base_seed,
                                   const std::vector<double>& grid,
                                   const std::function<double(const CountState&)>& functional,
                                   std::int64_t survival_threshold);

}  // namespace tpsir

#endif  // TPSIR_GILLESPIE_HPP

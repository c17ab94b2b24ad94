#include "tpsir/gillespie.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tpsir {

const std::array<EventSpec, kEventCount>& event_table() {
  static const std::array<EventSpec, kEventCount> table = {{
      {"birth", EventKind::Birth, -1, kSS},
      {"death_ss", EventKind::Death, kSS, -1},
      {"death_si", EventKind::Death, kSI, -1},
      {"death_sr", EventKind::Death, kSR, -1},
      {"death_is", EventKind::Death, kIS, -1},
      {"death_ii", EventKind::Death, kII, -1},
      {"death_ir", EventKind::Death, kIR, -1},
      {"death_rs", EventKind::Death, kRS, -1},
      {"death_ri", EventKind::Death, kRI, -1},
      {"death_rr", EventKind::Death, kRR, -1},
      {"infect1_ss", EventKind::Infection, kSS, kSI},
      {"infect2_ss", EventKind::Infection, kSS, kIS},
      {"infect1_is", EventKind::Infection, kIS, kII},
      {"infect1_rs", EventKind::Infection, kRS, kRI},
      {"infect2_si", EventKind::Infection, kSI, kII},
      {"infect2_sr", EventKind::Infection, kSR, kIR},
      {"recover1_si", EventKind::Recovery, kSI, kSR},
      {"recover1_ii", EventKind::Recovery, kII, kIR},
      {"recover1_ri", EventKind::Recovery, kRI, kRR},
      {"recover2_is", EventKind::Recovery, kIS, kRS},
      {"recover2_ii", EventKind::Recovery, kII, kRI},
      {"recover2_ir", EventKind::Recovery, kIR, kRR},
  }};
  return table;
}

double propensity(int event_id, const CountState& x, const ModelParams& p) {
  const double n = p.n_pop;
  const double l1 = (static_cast<double>(x[kSI]) + x[kII] + x[kRI]) / n;
  const double l2 = (static_cast<double>(x[kIS]) + x[kII] + x[kIR]) / n;
  switch (event_id) {
    case 0: return p.mu * n;
    case 1: return p.mu * x[kSS];
    case 2: return p.mu * x[kSI];
    case 3: return p.mu * x[kSR];
    case 4: return p.mu * x[kIS];
    case 5: return p.mu * x[kII];
    case 6: return p.mu * x[kIR];
    case 7: return p.mu * x[kRS];
    case 8: return p.mu * x[kRI];
    case 9: return p.mu * x[kRR];
    case 10: return p.beta1 * l1 * x[kSS];
    case 11: return p.beta2 * l2 * x[kSS];
    case 12: return p.a * l1 * x[kIS];
    case 13: return p.b * l1 * x[kRS];
    case 14: return p.c * l2 * x[kSI];
    case 15: return p.d * l2 * x[kSR];
    case 16: return p.nu1 * x[kSI];
    case 17: return p.nu1 * x[kII];
    case 18: return p.nu1 * x[kRI];
    case 19: return p.nu2 * x[kIS];
    case 20: return p.nu2 * x[kII];
    case 21: return p.nu2 * x[kIR];
    default: throw std::out_of_range("propensity: bad event id");
  }
}

namespace {

void apply_event(CountState& x, int event_id) {
  const EventSpec& e = event_table()[static_cast<std::size_t>(event_id)];
  if (e.source >= 0) --x[e.source];
  if (e.target >= 0) ++x[e.target];
}

}  // namespace

EventTrajectory::EventTrajectory(CountState initial, double t0, double t_end)
    : initial_(initial), final_(initial), t0_(t0), t_end_(t_end) {}

void EventTrajectory::record(double t, int event_id) {
  times_.push_back(t);
  events_.push_back(static_cast<std::uint8_t>(event_id));
  ++counters_[static_cast<std::size_t>(event_id)];
  apply_event(final_, event_id);
}

std::int64_t EventTrajectory::total_infections() const {
  std::int64_t total = 0;
  for (int id = 0; id < kEventCount; ++id) {
    if (event_table()[static_cast<std::size_t>(id)].kind == EventKind::Infection) {
      total += counters_[static_cast<std::size_t>(id)];
    }
  }
  return total;
}

void EventTrajectory::replay(
    const std::function<void(double, int, const CountState&)>& visit) const {
  CountState x = initial_;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    apply_event(x, events_[i]);
    visit(times_[i], events_[i], x);
  }
}

std::vector<CountState> EventTrajectory::states_on_grid(const std::vector<double>& grid) const {
  std::vector<CountState> out;
  out.reserve(grid.size());
  CountState x = initial_;
  std::size_t k = 0;
  for (double t : grid) {
    while (k < times_.size() && times_[k] <= t) {
      apply_event(x, events_[k]);
      ++k;
    }
    out.push_back(x);
  }
  return out;
}

EventTrajectory gillespie_run(const CountState& initial, const ModelParams& params,
                              double t_end, std::uint64_t seed) {
  params.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("gillespie_run: t_end must be positive");
  if ((initial.array() < 0).any()) {
    throw std::invalid_argument("gillespie_run: negative initial count");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  EventTrajectory traj(initial, 0.0, t_end);
  CountState x = initial;
  std::array<double, kEventCount> prop;

  double t = 0.0;
  while (true) {
    double total = 0.0;
    for (int id = 0; id < kEventCount; ++id) {
      prop[static_cast<std::size_t>(id)] = propensity(id, x, params);
      total += prop[static_cast<std::size_t>(id)];
    }
    if (total <= 0.0) break;  // absorbing: nothing can fire again

    t += -std::log1p(-unit(rng)) / total;
    if (t > t_end) break;

    double u = unit(rng) * total;
    int chosen = kEventCount - 1;
    for (int id = 0; id < kEventCount; ++id) {
      u -= prop[static_cast<std::size_t>(id)];
      if (u <= 0.0) {
        chosen = id;
        break;
      }
    }
    apply_event(x, chosen);
    traj.record(t, chosen);
  }
  return traj;
}

std::vector<std::int64_t> weekly_incidence_counts(const EventTrajectory& traj,
                                                  const std::vector<double>& week_bounds) {
  if (week_bounds.size() < 2) {
    throw std::invalid_argument("weekly_incidence_counts: need at least one week");
  }
  for (std::size_t i = 1; i < week_bounds.size(); ++i) {
    if (!(week_bounds[i] > week_bounds[i - 1])) {
      throw std::invalid_argument("weekly_incidence_counts: boundaries must increase");
    }
  }
  std::vector<std::int64_t> counts(week_bounds.size() - 1, 0);
  const auto& table = event_table();
  const auto& times = traj.times();
  const auto& events = traj.events();
  std::size_t week = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < week_bounds.front()) continue;
    if (t >= week_bounds.back()) break;
    while (t >= week_bounds[week + 1]) ++week;
    if (table[events[i]].kind == EventKind::Infection) ++counts[week];
  }
  return counts;
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  // splitmix64 of the pair; decorrelates consecutive run indices.
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (run_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EnsembleSummary gillespie_ensemble(const CountState& initial, const ModelParams& params,
                                   double t_end, std::size_t n_runs, std::uint64_t base_seed,
                                   const std::vector<double>& grid,
                                   const std::function<double(const CountState&)>& functional,
                                   std::int64_t survival_threshold) {
  EnsembleSummary s;
  s.grid = grid;
  s.n_runs = n_runs;
  const std::size_t m = grid.size();
  std::vector<double> sum_c(m, 0.0), sumsq_c(m, 0.0), sum_u(m, 0.0), sumsq_u(m, 0.0);

  for (std::size_t run = 0; run < n_runs; ++run) {
    const EventTrajectory traj = gillespie_run(initial, params, t_end, run_seed(base_seed, run));
    const bool survived = traj.total_infections() >= survival_threshold;
    if (survived) ++s.n_surviving;
    const auto states = traj.states_on_grid(grid);
    for (std::size_t i = 0; i < m; ++i) {
      const double v = functional(states[i]);
      sum_u[i] += v;
      sumsq_u[i] += v * v;
      if (survived) {
        sum_c[i] += v;
        sumsq_c[i] += v * v;
      }
    }
  }

  auto finalize = [](const std::vector<double>& sum, const std::vector<double>& sumsq,
                     std::size_t n, std::vector<double>& mean, std::vector<double>& var) {
    mean.resize(sum.size(), 0.0);
    var.resize(sum.size(), 0.0);
    if (n == 0) return;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      mean[i] = sum[i] / static_cast<double>(n);
      if (n > 1) {
        var[i] = (sumsq[i] - sum[i] * mean[i]) / static_cast<double>(n - 1);
        var[i] = std::max(var[i], 0.0);
      }
    }
  };
  finalize(sum_c, sumsq_c, s.n_surviving, s.mean_conditional, s.var_conditional);
  finalize(sum_u, sumsq_u, s.n_runs, s.mean_unconditional, s.var_unconditional);
  return s;
}

}  // namespace tpsir

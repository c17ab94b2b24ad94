// Command-line driver: simulate, synthesize, season, fit, report.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>

#include "tpsir/config.hpp"
#include "tpsir/data.hpp"
#include "tpsir/errors.hpp"
#include "tpsir/gillespie.hpp"
#include "tpsir/inference.hpp"
#include "tpsir/io.hpp"
#include "tpsir/model.hpp"
#include "tpsir/observation.hpp"
#include "tpsir/sampler.hpp"

namespace fs = std::filesystem;
using namespace tpsir;

namespace {

// Exit codes, one per error class (see README).
enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kParse = 3,
  kSchema = 4,
  kSeason = 5,
  kIntegrator = 6,
  kInfeasible = 7,
};

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int chains = 0;  // 0 = take from config
};

std::string default_out_dir(std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "run-%04d%02d%02d%02d%02d%02d-%llu", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<unsigned long long>(seed));
  return buf;
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig::defaults()
                                           : RunConfig::load(opts.config_path);
  if (opts.seed) cfg.sampler.seed = *opts.seed;
  if (opts.chains > 0) cfg.chains = opts.chains;
  return cfg;
}

fs::path prepare_out_dir(const CommonOpts& opts, const RunConfig& cfg) {
  const fs::path dir =
      opts.out_dir.empty() ? fs::path(default_out_dir(cfg.sampler.seed)) : fs::path(opts.out_dir);
  fs::create_directories(dir);
  cfg.save((dir / "config.json").string());
  return dir;
}

Theta draw_theta_from_priors(const PriorSpec& priors, std::mt19937_64& rng) {
  Theta::Vector v;
  for (int i = 0; i < Theta::kDim; ++i) {
    const auto& g = priors.components[static_cast<std::size_t>(i)];
    std::gamma_distribution<double> dist(g.shape, 1.0 / g.rate);
    v[i] = dist(rng);
  }
  return Theta::from_vector(v);
}

// Prior-drawn starting pair with finite posterior density; the second point
// is the first jittered coordinate-wise by factors in [0.5, 2].
std::pair<Theta::Vector, Theta::Vector> draw_inits(const PosteriorEvaluator& target,
                                                   const PriorSpec& priors,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(0.5, 2.0);
  for (int attempt = 0; attempt < 500; ++attempt) {
    const Theta t1 = draw_theta_from_priors(priors, rng);
    if (!std::isfinite(target(t1))) continue;
    for (int inner = 0; inner < 100; ++inner) {
      Theta::Vector v2 = t1.to_vector();
      for (int i = 0; i < Theta::kDim; ++i) v2[i] *= factor(rng);
      if (std::isfinite(target(Theta::from_vector(v2)))) return {t1.to_vector(), v2};
    }
  }
  throw InitInfeasible("could not find prior draws with finite posterior density");
}

SeasonWindow resolve_window(const RunConfig& cfg, const std::string& window_path,
                            const std::string& data_path, int season_year) {
  if (!window_path.empty()) return read_season_json(window_path);
  if (data_path.empty()) {
    throw std::invalid_argument("need either --window or --data with --season");
  }
  const RawSeries series = load_series(data_path);
  const double baseline = historical_mean(series, cfg.exclude_years);
  return extract_season(series, baseline, season_year, cfg.bands);
}

int cmd_simulate(const CommonOpts& opts, bool stochastic) {
  const RunConfig cfg = load_config(opts);
  const fs::path dir = prepare_out_dir(opts, cfg);
  const ModelParams params = cfg.theta.to_params(cfg.fixed);
  const State x0 = initial_state(cfg.theta, cfg.fixed.n_pop);

  std::vector<double> grid;
  for (double t = 0.0; t <= cfg.simulate_days + 1e-9; t += 1.0) grid.push_back(t);

  TrajectoryTable table;
  table.times = grid;
  if (stochastic) {
    CountState n0;
    for (int i = 0; i < kCompartments; ++i) n0[i] = std::llround(x0[i]);
    const EventTrajectory traj =
        gillespie_run(n0, params, cfg.simulate_days, cfg.sampler.seed);
    for (const CountState& s : traj.states_on_grid(grid)) {
      table.states.push_back(s.cast<double>());
    }
  } else {
    const Trajectory traj = integrate(x0, params, 0.0, cfg.simulate_days, cfg.integrator_tol);
    table.states = traj.sample(grid);
  }
  write_trajectory_csv((dir / "trajectory.csv").string(), table);

  ReplacementSeries series;
  series.t = grid;
  for (const State& s : table.states) {
    const auto [r1, r2] = replacement_numbers(s, params);
    series.r1.push_back(r1);
    series.r2.push_back(r2);
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d0 = series.r1[i - 1] - series.r2[i - 1];
    const double d1 = series.r1[i] - series.r2[i];
    if (d0 * d1 < 0.0) {
      series.crossovers.push_back(grid[i - 1] + (grid[i] - grid[i - 1]) * d0 / (d0 - d1));
    }
  }
  write_replacement_csv((dir / "replacement.csv").string(), series);
  std::cout << "simulate: mode=" << (stochastic ? "stochastic" : "ode")
            << " days=" << cfg.simulate_days << " crossovers=" << series.crossovers.size()
            << " out=" << dir.string() << "\n";
  return kOk;
}

int cmd_synthesize(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const fs::path dir = prepare_out_dir(opts, cfg);
  const SeasonWindow season = synthesize_dataset(cfg.theta, cfg.fixed, cfg.synth_weeks,
                                                 cfg.sampler.seed, cfg.integrator_tol);
  write_season_json((dir / "window.json").string(), season);
  std::int64_t total = 0;
  for (auto z : season.counts) total += z;
  std::cout << "synthesize: weeks=" << season.weeks() << " total_counts=" << total
            << " seed=" << cfg.sampler.seed << " out=" << dir.string() << "\n";
  return kOk;
}

int cmd_season(const CommonOpts& opts, const std::string& data_path, int season_year) {
  const RunConfig cfg = load_config(opts);
  const fs::path dir = prepare_out_dir(opts, cfg);
  const RawSeries series = load_series(data_path);
  const double baseline = historical_mean(series, cfg.exclude_years);
  const SeasonWindow season = extract_season(series, baseline, season_year, cfg.bands);
  write_season_json((dir / "window.json").string(), season);
  std::cout << "season: start=" << season.start.year << "-W" << season.start.week
            << " end=" << season.end.year << "-W" << season.end.week
            << " weeks=" << season.weeks() << " baseline=" << baseline
            << " floored_weeks=" << season.floored_weeks << " out=" << dir.string() << "\n";
  return kOk;
}

int cmd_fit(const CommonOpts& opts, const std::string& window_path, const std::string& data_path,
            int season_year) {
  const RunConfig cfg = load_config(opts);
  const fs::path dir = prepare_out_dir(opts, cfg);
  const SeasonWindow season = resolve_window(cfg, window_path, data_path, season_year);
  const ObservationWindow window = season.to_observation();
  const PosteriorEvaluator target(window, cfg.priors, cfg.fixed, cfg.integrator_tol);
  const LogDensity density = [&target](const Eigen::VectorXd& v) {
    return target(Theta::from_vector(v));
  };

  DrawsTable table;
  PosteriorSample merged;
  double acceptance_sum = 0.0;
  for (int chain = 0; chain < cfg.chains; ++chain) {
    SamplerConfig scfg = cfg.sampler;
    scfg.seed = cfg.chains == 1 ? cfg.sampler.seed : run_seed(cfg.sampler.seed, chain);
    scfg.lower_bounds.assign(Theta::kDim, 0.0);
    const auto [init1, init2] = draw_inits(target, cfg.priors, run_seed(scfg.seed, 0x1717));
    const PosteriorSample sample = sample_posterior(density, init1, init2, scfg);
    for (const auto& w : sample.warnings) {
      std::cerr << "warning: chain " << chain << ": " << w << "\n";
    }
    acceptance_sum += sample.acceptance_rate;
    const auto old_rows = table.draws.rows();
    table.draws.conservativeResize(old_rows + sample.draws.rows(), Theta::kDim);
    table.draws.bottomRows(sample.draws.rows()) = sample.draws;
    table.log_post.conservativeResize(old_rows + sample.log_post.size());
    table.log_post.tail(sample.log_post.size()) = sample.log_post;
    table.chain.insert(table.chain.end(), static_cast<std::size_t>(sample.draws.rows()), chain);
  }
  merged.draws = table.draws;
  merged.log_post = table.log_post;
  merged.acceptance_rate = acceptance_sum / cfg.chains;
  merged.iat.resize(Theta::kDim);
  for (int j = 0; j < Theta::kDim; ++j) {
    merged.iat[j] = integrated_autocorr_time(merged.draws.col(j));
  }

  FitReportOptions fopts;
  fopts.regime_rel_tol = cfg.regime_rel_tol;
  fopts.integrator_tol = cfg.integrator_tol;
  fopts.polish_map = cfg.polish_map;
  const FitReport report = fit_report(merged, window, cfg.fixed, fopts, density);

  write_draws_csv((dir / "draws.csv").string(), table);
  write_fit_report_json((dir / "report.json").string(), report);
  if (target.integrator_failures() > 0) {
    std::cerr << "note: " << target.integrator_failures()
              << " posterior evaluations hit integrator failures (zero mass)\n";
  }
  std::cout << "fit: map_log_post=" << format_double(report.map_log_post)
            << " acceptance=" << merged.acceptance_rate
            << " regime_mode=" << to_string(report.regime_mode)
            << " crossovers=" << report.replacement.crossovers.size()
            << " draws=" << table.size() << " out=" << dir.string() << "\n";
  return kOk;
}

int cmd_report(const CommonOpts& opts, const std::string& draws_path,
               const std::string& window_path, const std::string& data_path, int season_year) {
  const RunConfig cfg = load_config(opts);
  const fs::path dir = prepare_out_dir(opts, cfg);
  const SeasonWindow season = resolve_window(cfg, window_path, data_path, season_year);
  const ObservationWindow window = season.to_observation();
  const DrawsTable table = read_draws_csv(draws_path);
  if (table.size() == 0) throw SchemaError("draws file has no rows");

  const PosteriorEvaluator target(window, cfg.priors, cfg.fixed, cfg.integrator_tol);
  const LogDensity density = [&target](const Eigen::VectorXd& v) {
    return target(Theta::from_vector(v));
  };
  PosteriorSample sample;
  sample.draws = table.draws;
  sample.log_post = table.log_post;
  sample.iat.resize(Theta::kDim);
  for (int j = 0; j < Theta::kDim; ++j) {
    sample.iat[j] = integrated_autocorr_time(sample.draws.col(j));
  }

  FitReportOptions fopts;
  fopts.regime_rel_tol = cfg.regime_rel_tol;
  fopts.integrator_tol = cfg.integrator_tol;
  fopts.polish_map = cfg.polish_map;
  const FitReport report = fit_report(sample, window, cfg.fixed, fopts, density);

  write_fit_report_json((dir / "report.json").string(), report);
  write_histograms_csv((dir / "histograms.csv").string(), sample.draws);
  std::cout << "report: map_log_post=" << format_double(report.map_log_post)
            << " regime_mode=" << to_string(report.regime_mode)
            << " draws=" << table.size() << " out=" << dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-pathogen SIR epidemic toolkit: deterministic and stochastic simulation, "
               "season extraction and Bayesian fitting of weekly ARI counts"};
  app.require_subcommand(1);

  CommonOpts opts;
  bool stochastic = false;
  std::string window_path, data_path, draws_path;
  int season_year = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "run configuration JSON");
    sub->add_option("--seed", opts.seed, "seed override");
    sub->add_option("--out", opts.out_dir, "output directory (default run-<timestamp>-<seed>)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate or sample one trajectory");
  add_common(simulate);
  simulate->add_flag("--stochastic", stochastic, "event-level simulation instead of the ODE");

  CLI::App* synthesize = app.add_subcommand("synthesize", "generate a synthetic season");
  add_common(synthesize);

  CLI::App* season = app.add_subcommand("season", "extract a high season from weekly counts");
  add_common(season);
  season->add_option("--data", data_path, "weekly ARI CSV")->required();
  season->add_option("--season", season_year, "season start year")->required();

  CLI::App* fit = app.add_subcommand("fit", "posterior sampling on one season");
  add_common(fit);
  fit->add_option("--window", window_path, "season window JSON");
  fit->add_option("--data", data_path, "weekly ARI CSV (with --season)");
  fit->add_option("--season", season_year, "season start year");
  fit->add_option("--chains", opts.chains, "independent chains to merge");

  CLI::App* report = app.add_subcommand("report", "rebuild a report from stored draws");
  add_common(report);
  report->add_option("--draws", draws_path, "draws CSV from a fit run")->required();
  report->add_option("--window", window_path, "season window JSON");
  report->add_option("--data", data_path, "weekly ARI CSV (with --season)");
  report->add_option("--season", season_year, "season start year");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opts, stochastic);
    if (synthesize->parsed()) return cmd_synthesize(opts);
    if (season->parsed()) return cmd_season(opts, data_path, season_year);
    if (fit->parsed()) return cmd_fit(opts, window_path, data_path, season_year);
    if (report->parsed()) return cmd_report(opts, draws_path, window_path, data_path, season_year);
    std::cerr << "error: no subcommand\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const InsufficientHistory& e) {
    std::cerr << "season error: " << e.what() << "\n";
    return kSeason;
  } catch (const NoOnsetFound& e) {
    std::cerr << "season error: " << e.what() << "\n";
    return kSeason;
  } catch (const NoOffsetFound& e) {
    std::cerr << "season error: " << e.what() << "\n";
    return kSeason;
  } catch (const StepFailure& e) {
    std::cerr << "integrator error: " << e.what() << "\n";
    return kIntegrator;
  } catch (const NonFiniteState& e) {
    std::cerr << "integrator error: " << e.what() << "\n";
    return kIntegrator;
  } catch (const InfeasibleInitial& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InitInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

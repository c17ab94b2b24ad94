#ifndef TPSIR_CONFIG_HPP
#define TPSIR_CONFIG_HPP

#include <nlohmann/json_fwd.hpp>
#include <set>
#include <string>

#include "tpsir/data.hpp"
#include "tpsir/observation.hpp"
#include "tpsir/sampler.hpp"
#include "tpsir/types.hpp"

namespace tpsir {

// Everything a run needs besides the input files and flag overrides; fully
// serializable so that config + inputs + seed reproduce a run.
struct RunConfig {
  ModelParams fixed;  // only nu1/nu2/mu/n_pop are read from here
  PriorSpec priors;
  SamplerConfig sampler;
  double integrator_tol = kDefaultIntegratorTol;
  double regime_rel_tol = 0.05;
  SeasonBands bands;
  std::set<int> exclude_years;
  Theta theta;  // used by simulate/synthesize
  int synth_weeks = 30;
  double simulate_days = 210.0;
  int chains = 1;
  bool polish_map = true;

  static RunConfig defaults();
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  nlohmann::json to_json() const;
  void save(const std::string& path) const;
};

}  // namespace tpsir

#endif  // TPSIR_CONFIG_HPP

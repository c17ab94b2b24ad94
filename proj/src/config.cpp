#include "tpsir/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "tpsir/errors.hpp"

namespace tpsir {

using nlohmann::json;

namespace {

GammaPrior prior_from_json(const json& j, const ModelParams& fixed, int component) {
  if (j.contains("shape") && j.contains("rate")) {
    GammaPrior g;
    g.shape = j.at("shape").get<double>();
    g.rate = j.at("rate").get<double>();
    if (!(g.shape > 0.0) || !(g.rate > 0.0)) {
      throw SchemaError("priors: shape and rate must be positive");
    }
    return g;
  }
  const double cv = j.value("cv", component >= 6 && component <= 7 ? 1.0 : 0.5);
  if (j.contains("r0_target")) {
    // Contact-rate prior pinned through the implied reproduction number.
    const double nu = component == 0 || component == 2 || component == 3 ? fixed.nu1 : fixed.nu2;
    return GammaPrior::from_mean_cv(j.at("r0_target").get<double>() * (nu + fixed.mu), cv);
  }
  if (j.contains("mean")) return GammaPrior::from_mean_cv(j.at("mean").get<double>(), cv);
  throw SchemaError("priors: expected {shape,rate}, {mean[,cv]} or {r0_target[,cv]}");
}

Theta theta_from_json(const json& j) {
  Theta t;
  t.beta1 = j.value("beta1", 0.0);
  t.beta2 = j.value("beta2", 0.0);
  t.a = j.value("a", 0.0);
  t.b = j.value("b", 0.0);
  t.c = j.value("c", 0.0);
  t.d = j.value("d", 0.0);
  t.x_is0 = j.value("x_is0", 0.0);
  t.x_si0 = j.value("x_si0", 0.0);
  t.k_scale = j.value("k_scale", 0.0);
  return t;
}

json theta_to_json(const Theta& t) {
  json j;
  const Theta::Vector v = t.to_vector();
  for (int i = 0; i < Theta::kDim; ++i) j[kThetaNames[i]] = v[i];
  return j;
}

void band_from_json(const json& j, int& month, int& day) {
  // "MM-DD"
  const auto s = j.get<std::string>();
  if (s.size() != 5 || s[2] != '-') throw SchemaError("season band must look like 'MM-DD'");
  month = std::stoi(s.substr(0, 2));
  day = std::stoi(s.substr(3, 2));
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw SchemaError("season band '" + s + "' out of range");
  }
}

std::string band_to_string(int month, int day) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d-%02d", month, day);
  return buf;
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.fixed = ModelParams{};
  cfg.priors = PriorSpec::defaults(cfg.fixed);
  return cfg;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg = defaults();
  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.fixed.nu1 = m.value("nu1", cfg.fixed.nu1);
    cfg.fixed.nu2 = m.value("nu2", cfg.fixed.nu2);
    cfg.fixed.mu = m.value("mu", cfg.fixed.mu);
    cfg.fixed.n_pop = m.value("n_pop", cfg.fixed.n_pop);
    cfg.fixed.validate();
  }
  cfg.priors = PriorSpec::defaults(cfg.fixed);  // re-anchor on possibly new rates
  if (j.contains("priors")) {
    for (int i = 0; i < Theta::kDim; ++i) {
      if (j.at("priors").contains(kThetaNames[i])) {
        cfg.priors.components[static_cast<std::size_t>(i)] =
            prior_from_json(j.at("priors").at(kThetaNames[i]), cfg.fixed, i);
      }
    }
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    cfg.sampler.iterations = s.value("iterations", cfg.sampler.iterations);
    cfg.sampler.burn_in = s.value("burn_in", cfg.sampler.burn_in);
    cfg.sampler.thinning = s.value("thinning", cfg.sampler.thinning);
    cfg.sampler.seed = s.value("seed", cfg.sampler.seed);
    if (s.contains("algorithm")) {
      const auto name = s.at("algorithm").get<std::string>();
      if (name == "twalk") {
        cfg.sampler.algorithm = SamplerAlgorithm::TWalk;
      } else if (name == "rwm") {
        cfg.sampler.algorithm = SamplerAlgorithm::AdaptiveRwm;
      } else {
        throw SchemaError("sampler.algorithm must be 'twalk' or 'rwm'");
      }
    }
    if (s.contains("move_weights")) {
      const auto& w = s.at("move_weights");
      cfg.sampler.move_weights = {w.value("walk", 0.4918), w.value("traverse", 0.4918),
                                  w.value("hop", 0.0082), w.value("blow", 0.0082)};
    }
    cfg.sampler.validate();
  }
  if (j.contains("integrator")) {
    cfg.integrator_tol = j.at("integrator").value("tol", cfg.integrator_tol);
    if (!(cfg.integrator_tol > 0.0)) throw SchemaError("integrator.tol must be positive");
  }
  if (j.contains("regime")) {
    cfg.regime_rel_tol = j.at("regime").value("rel_tol", cfg.regime_rel_tol);
  }
  if (j.contains("season")) {
    const auto& s = j.at("season");
    if (s.contains("onset_from")) band_from_json(s.at("onset_from"), cfg.bands.onset_from_month, cfg.bands.onset_from_day);
    if (s.contains("onset_to")) band_from_json(s.at("onset_to"), cfg.bands.onset_to_month, cfg.bands.onset_to_day);
    if (s.contains("offset_from")) band_from_json(s.at("offset_from"), cfg.bands.offset_from_month, cfg.bands.offset_from_day);
    if (s.contains("offset_to")) band_from_json(s.at("offset_to"), cfg.bands.offset_to_month, cfg.bands.offset_to_day);
    if (s.contains("exclude_years")) {
      for (const auto& y : s.at("exclude_years")) cfg.exclude_years.insert(y.get<int>());
    }
  }
  if (j.contains("theta")) cfg.theta = theta_from_json(j.at("theta"));
  if (j.contains("synthesize")) cfg.synth_weeks = j.at("synthesize").value("weeks", cfg.synth_weeks);
  if (j.contains("simulate")) cfg.simulate_days = j.at("simulate").value("days", cfg.simulate_days);
  if (j.contains("fit")) {
    cfg.chains = j.at("fit").value("chains", cfg.chains);
    cfg.polish_map = j.at("fit").value("polish_map", cfg.polish_map);
    if (cfg.chains < 1) throw SchemaError("fit.chains must be >= 1");
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw SchemaError("config '" + path + "': " + e.what());
  }
}

json RunConfig::to_json() const {
  json j;
  j["model"] = {{"nu1", fixed.nu1}, {"nu2", fixed.nu2}, {"mu", fixed.mu}, {"n_pop", fixed.n_pop}};
  json priors_j;
  for (int i = 0; i < Theta::kDim; ++i) {
    const auto& g = priors.components[static_cast<std::size_t>(i)];
    priors_j[kThetaNames[i]] = {{"shape", g.shape}, {"rate", g.rate}};
  }
  j["priors"] = priors_j;
  j["sampler"] = {
      {"iterations", sampler.iterations},
      {"burn_in", sampler.burn_in},
      {"thinning", sampler.thinning},
      {"seed", sampler.seed},
      {"algorithm", sampler.algorithm == SamplerAlgorithm::TWalk ? "twalk" : "rwm"},
      {"move_weights",
       {{"walk", sampler.move_weights[0]},
        {"traverse", sampler.move_weights[1]},
        {"hop", sampler.move_weights[2]},
        {"blow", sampler.move_weights[3]}}},
  };
  j["integrator"] = {{"tol", integrator_tol}};
  j["regime"] = {{"rel_tol", regime_rel_tol}};
  j["season"] = {
      {"onset_from", band_to_string(bands.onset_from_month, bands.onset_from_day)},
      {"onset_to", band_to_string(bands.onset_to_month, bands.onset_to_day)},
      {"offset_from", band_to_string(bands.offset_from_month, bands.offset_from_day)},
      {"offset_to", band_to_string(bands.offset_to_month, bands.offset_to_day)},
      {"exclude_years", exclude_years},
  };
  j["theta"] = theta_to_json(theta);
  j["synthesize"] = {{"weeks", synth_weeks}};
  j["simulate"] = {{"days", simulate_days}};
  j["fit"] = {{"chains", chains}, {"polish_map", polish_map}};
  return j;
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write config '" + path + "'");
  out << to_json().dump(2) << "\n";
}

}  // namespace tpsir

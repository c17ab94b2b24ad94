#include "tpsir/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tpsir/errors.hpp"

namespace tpsir {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double to_double(const std::string& s, long line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse number '" + s + "'", line_no);
  }
}

json state_to_json(const State& x) {
  json arr = json::array();
  for (int i = 0; i < kCompartments; ++i) arr.push_back(x[i]);
  return arr;
}

State state_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() != kCompartments) {
    throw SchemaError("state array must have 9 entries");
  }
  State x;
  for (int i = 0; i < kCompartments; ++i) x[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return x;
}

}  // namespace

void write_draws_csv(const std::string& path, const DrawsTable& table) {
  auto out = open_out(path);
  for (int i = 0; i < Theta::kDim; ++i) out << kThetaNames[i] << ",";
  out << "log_post,chain\n";
  for (Eigen::Index r = 0; r < table.draws.rows(); ++r) {
    for (int c = 0; c < Theta::kDim; ++c) out << format_double(table.draws(r, c)) << ",";
    out << format_double(table.log_post[r]) << ","
        << (r < static_cast<Eigen::Index>(table.chain.size()) ? table.chain[static_cast<std::size_t>(r)] : 0)
        << "\n";
  }
}

DrawsTable read_draws_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open draws file '" + path + "'");
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty draws file", 1);
  ++line_no;
  const auto header = split(line, ',');
  if (header.size() != Theta::kDim + 2) {
    throw SchemaError("draws header must have 11 columns (theta, log_post, chain)");
  }
  for (int i = 0; i < Theta::kDim; ++i) {
    if (header[static_cast<std::size_t>(i)] != kThetaNames[i]) {
      throw SchemaError(std::string("draws column ") + std::to_string(i + 1) + " must be " +
                        kThetaNames[i]);
    }
  }
  if (header[9] != "log_post" || header[10] != "chain") {
    throw SchemaError("draws trailing columns must be log_post,chain");
  }

  std::vector<std::array<double, Theta::kDim + 1>> rows;
  std::vector<int> chains;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != Theta::kDim + 2) {
      throw ParseError("expected 11 fields, got " + std::to_string(fields.size()), line_no);
    }
    std::array<double, Theta::kDim + 1> row{};
    for (int i = 0; i <= Theta::kDim; ++i) {
      row[static_cast<std::size_t>(i)] = to_double(fields[static_cast<std::size_t>(i)], line_no);
    }
    rows.push_back(row);
    chains.push_back(static_cast<int>(to_double(fields[10], line_no)));
  }
  DrawsTable table;
  table.draws.resize(static_cast<Eigen::Index>(rows.size()), Theta::kDim);
  table.log_post.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < Theta::kDim; ++c) {
      table.draws(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    table.log_post[static_cast<Eigen::Index>(r)] = rows[r][Theta::kDim];
  }
  table.chain = std::move(chains);
  return table;
}

void write_trajectory_csv(const std::string& path, const TrajectoryTable& table) {
  auto out = open_out(path);
  out << "t";
  for (const char* name : kCompartmentNames) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    out << format_double(table.times[i]);
    for (int c = 0; c < kCompartments; ++c) out << "," << format_double(table.states[i][c]);
    out << "\n";
  }
}

TrajectoryTable read_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open trajectory file '" + path + "'");
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++line_no;
  TrajectoryTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != kCompartments + 1) {
      throw ParseError("expected 10 fields, got " + std::to_string(fields.size()), line_no);
    }
    table.times.push_back(to_double(fields[0], line_no));
    State x;
    for (int c = 0; c < kCompartments; ++c) {
      x[c] = to_double(fields[static_cast<std::size_t>(c) + 1], line_no);
    }
    table.states.push_back(x);
  }
  return table;
}

void write_replacement_csv(const std::string& path, const ReplacementSeries& series) {
  auto out = open_out(path);
  out << "# crossover_times:";
  for (double t : series.crossovers) out << " " << format_double(t);
  out << "\n";
  out << "t,r1,r2\n";
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    out << format_double(series.t[i]) << "," << format_double(series.r1[i]) << ","
        << format_double(series.r2[i]) << "\n";
  }
}

ReplacementSeries read_replacement_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open replacement file '" + path + "'");
  std::string line;
  long line_no = 0;
  ReplacementSeries series;
  if (!std::getline(in, line)) throw ParseError("empty replacement file", 1);
  ++line_no;
  const std::string prefix = "# crossover_times:";
  if (line.rfind(prefix, 0) != 0) throw SchemaError("replacement file must start with " + prefix);
  std::istringstream cross(line.substr(prefix.size()));
  double t = 0;
  while (cross >> t) series.crossovers.push_back(t);
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"t", "r1", "r2"}) {
    throw SchemaError("replacement header must be t,r1,r2");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
    }
    series.t.push_back(to_double(fields[0], line_no));
    series.r1.push_back(to_double(fields[1], line_no));
    series.r2.push_back(to_double(fields[2], line_no));
  }
  return series;
}

json season_to_json(const SeasonWindow& season) {
  json j;
  j["start"] = {{"iso_year", season.start.year}, {"iso_week", season.start.week}};
  j["end"] = {{"iso_year", season.end.year}, {"iso_week", season.end.week}};
  j["historical_mean"] = season.historical_mean;
  j["counts"] = season.counts;
  j["week_bounds_days"] = season.week_bounds_days;
  j["floored_weeks"] = season.floored_weeks;
  auto sentinel = [](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) {
      if (std::isnan(x)) {
        arr.push_back(nullptr);
      } else {
        arr.push_back(x);
      }
    }
    return arr;
  };
  j["flu_detect"] = sentinel(season.flu_detect);
  j["rsv_detect"] = sentinel(season.rsv_detect);
  return j;
}

SeasonWindow season_from_json(const json& j) {
  SeasonWindow s;
  try {
    s.start = {j.at("start").at("iso_year").get<int>(), j.at("start").at("iso_week").get<int>()};
    s.end = {j.at("end").at("iso_year").get<int>(), j.at("end").at("iso_week").get<int>()};
    s.historical_mean = j.at("historical_mean").get<double>();
    s.counts = j.at("counts").get<std::vector<std::int64_t>>();
    s.week_bounds_days = j.at("week_bounds_days").get<std::vector<double>>();
    s.floored_weeks = j.at("floored_weeks").get<int>();
    auto sentinel = [](const json& arr) {
      std::vector<double> v;
      for (const auto& x : arr) {
        v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
      }
      return v;
    };
    if (j.contains("flu_detect")) s.flu_detect = sentinel(j.at("flu_detect"));
    if (j.contains("rsv_detect")) s.rsv_detect = sentinel(j.at("rsv_detect"));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("season JSON: ") + e.what());
  }
  if (s.week_bounds_days.size() != s.counts.size() + 1) {
    throw SchemaError("season JSON: week_bounds_days must have counts+1 entries");
  }
  for (std::int64_t z : s.counts) {
    if (z < 0) throw SchemaError("season JSON: negative count");
  }
  return s;
}

void write_season_json(const std::string& path, const SeasonWindow& season) {
  auto out = open_out(path);
  out << season_to_json(season).dump(2) << "\n";
}

SeasonWindow read_season_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open season file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("season JSON: ") + e.what());
  }
  return season_from_json(j);
}

json fit_report_to_json(const FitReport& report) {
  json j;
  json map_j;
  const Theta::Vector v = report.map_theta.to_vector();
  for (int i = 0; i < Theta::kDim; ++i) map_j[kThetaNames[i]] = v[i];
  j["map"] = {{"theta", map_j}, {"log_post", report.map_log_post}};

  json quant;
  json bimodal;
  json iat;
  for (int i = 0; i < Theta::kDim; ++i) {
    const auto& q = report.quantiles[static_cast<std::size_t>(i)];
    quant[kThetaNames[i]] = {{"q025", q.q025}, {"q25", q.q25}, {"q50", q.q50},
                             {"q75", q.q75},   {"q975", q.q975}};
    bimodal[kThetaNames[i]] = report.bimodal[static_cast<std::size_t>(i)];
    if (report.iat.size() == Theta::kDim) iat[kThetaNames[i]] = report.iat[i];
  }
  j["quantiles"] = quant;
  j["bimodal"] = bimodal;
  if (!iat.is_null()) j["iat"] = iat;

  json regimes;
  for (int k = 0; k < kRegimeCount; ++k) {
    regimes[to_string(static_cast<RegimeLabel>(k))] = report.regime_counts[static_cast<std::size_t>(k)];
  }
  j["regime_histogram"] = regimes;
  j["regime_mode"] = to_string(report.regime_mode);

  j["map_weekly_incidence"] = report.map_weekly_incidence;
  j["replacement"] = {{"t", report.replacement.t},
                      {"r1", report.replacement.r1},
                      {"r2", report.replacement.r2},
                      {"crossovers", report.replacement.crossovers}};
  json traj = json::array();
  for (const State& x : report.traj_states) traj.push_back(state_to_json(x));
  j["map_trajectory"] = {{"t", report.traj_times}, {"states", traj}};
  return j;
}

FitReport fit_report_from_json(const json& j) {
  FitReport rep;
  try {
    Theta::Vector v;
    for (int i = 0; i < Theta::kDim; ++i) {
      v[i] = j.at("map").at("theta").at(kThetaNames[i]).get<double>();
    }
    rep.map_theta = Theta::from_vector(v);
    rep.map_log_post = j.at("map").at("log_post").get<double>();
    rep.iat.resize(Theta::kDim);
    rep.iat.setZero();
    for (int i = 0; i < Theta::kDim; ++i) {
      const auto& q = j.at("quantiles").at(kThetaNames[i]);
      auto& row = rep.quantiles[static_cast<std::size_t>(i)];
      row.q025 = q.at("q025").get<double>();
      row.q25 = q.at("q25").get<double>();
      row.q50 = q.at("q50").get<double>();
      row.q75 = q.at("q75").get<double>();
      row.q975 = q.at("q975").get<double>();
      rep.bimodal[static_cast<std::size_t>(i)] = j.at("bimodal").at(kThetaNames[i]).get<bool>();
      if (j.contains("iat")) rep.iat[i] = j.at("iat").at(kThetaNames[i]).get<double>();
    }
    for (int k = 0; k < kRegimeCount; ++k) {
      rep.regime_counts[static_cast<std::size_t>(k)] =
          j.at("regime_histogram").at(to_string(static_cast<RegimeLabel>(k))).get<std::int64_t>();
    }
    rep.regime_mode = regime_from_string(j.at("regime_mode").get<std::string>());
    rep.map_weekly_incidence = j.at("map_weekly_incidence").get<std::vector<double>>();
    rep.replacement.t = j.at("replacement").at("t").get<std::vector<double>>();
    rep.replacement.r1 = j.at("replacement").at("r1").get<std::vector<double>>();
    rep.replacement.r2 = j.at("replacement").at("r2").get<std::vector<double>>();
    rep.replacement.crossovers = j.at("replacement").at("crossovers").get<std::vector<double>>();
    rep.traj_times = j.at("map_trajectory").at("t").get<std::vector<double>>();
    for (const auto& s : j.at("map_trajectory").at("states")) {
      rep.traj_states.push_back(state_from_json(s));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report JSON: ") + e.what());
  }
  return rep;
}

void write_fit_report_json(const std::string& path, const FitReport& report) {
  auto out = open_out(path);
  out << fit_report_to_json(report).dump(2) << "\n";
}

FitReport read_fit_report_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open report file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return fit_report_from_json(j);
}

void write_histograms_csv(const std::string& path, const Eigen::MatrixXd& draws) {
  auto out = open_out(path);
  out << "parameter,bin_lo,bin_hi,count\n";
  for (int j = 0; j < static_cast<int>(draws.cols()) && j < Theta::kDim; ++j) {
    const Histogram h = fd_histogram(draws.col(j));
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << kThetaNames[j] << "," << format_double(h.edges[b]) << ","
          << format_double(h.edges[b + 1]) << "," << h.counts[b] << "\n";
    }
  }
}

}  // namespace tpsir

#include "tpsir/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "tpsir/errors.hpp"

namespace tpsir {

long days_from_civil(int year, int month, int day) {
  year -= month <= 2;
  const long era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(day) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

int weekday(long days) {
  // 1970-01-01 was a Thursday; Monday = 0.
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

long iso_week_monday(int year, int week) {
  const long jan4 = days_from_civil(year, 1, 4);
  const long week1_monday = jan4 - weekday(jan4);
  return week1_monday + 7L * (week - 1);
}

int iso_weeks_in_year(int year) {
  const long dec28 = days_from_civil(year, 12, 28);
  return static_cast<int>((dec28 - iso_week_monday(year, 1)) / 7) + 1;
}

IsoWeek IsoWeek::next() const {
  if (week < iso_weeks_in_year(year)) return {year, week + 1};
  return {year + 1, 1};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto a = f.find_first_not_of(" \t");
    const auto b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
  }
  return fields;
}

long parse_int_field(const std::string& s, const char* column, long line_no) {
  if (s.empty()) throw ParseError(std::string("empty value in column ") + column, line_no);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("cannot parse integer in column ") + column + ": '" + s + "'",
                     line_no);
  }
  if (pos != s.size()) {
    throw ParseError(std::string("trailing junk in column ") + column + ": '" + s + "'", line_no);
  }
  return v;
}

double parse_double_field(const std::string& s, const char* column, long line_no) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("cannot parse number in column ") + column + ": '" + s + "'",
                     line_no);
  }
  if (pos != s.size()) {
    throw ParseError(std::string("trailing junk in column ") + column + ": '" + s + "'", line_no);
  }
  return v;
}

}  // namespace

RawSeries parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  const auto header = split_csv_line(line);
  const std::vector<std::string> short_schema = {"iso_year", "iso_week", "ari_count"};
  const std::vector<std::string> full_schema = {"iso_year", "iso_week", "ari_count",
                                                "flu_detect", "rsv_detect"};
  bool with_sentinel = false;
  if (header == full_schema) {
    with_sentinel = true;
  } else if (header != short_schema) {
    throw SchemaError(
        "header must be iso_year,iso_week,ari_count[,flu_detect,rsv_detect]; got '" + line + "'");
  }

  RawSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::size_t expected = with_sentinel ? 5 : 3;
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    RawRecord rec;
    rec.week.year = static_cast<int>(parse_int_field(fields[0], "iso_year", line_no));
    rec.week.week = static_cast<int>(parse_int_field(fields[1], "iso_week", line_no));
    if (rec.week.week < 1 || rec.week.week > iso_weeks_in_year(rec.week.year)) {
      throw SchemaError("column iso_week: week " + std::to_string(rec.week.week) +
                        " outside 1.." + std::to_string(iso_weeks_in_year(rec.week.year)) +
                        " for year " + std::to_string(rec.week.year));
    }
    rec.ari_count = parse_int_field(fields[2], "ari_count", line_no);
    if (rec.ari_count < 0) {
      throw SchemaError("column ari_count: negative count at " + std::to_string(rec.week.year) +
                        "-W" + std::to_string(rec.week.week));
    }
    if (with_sentinel) {
      if (!fields[3].empty()) rec.flu_detect = parse_double_field(fields[3], "flu_detect", line_no);
      if (!fields[4].empty()) rec.rsv_detect = parse_double_field(fields[4], "rsv_detect", line_no);
    }
    series.records.push_back(rec);
  }

  std::sort(series.records.begin(), series.records.end(),
            [](const RawRecord& a, const RawRecord& b) { return a.week < b.week; });
  for (std::size_t i = 1; i < series.records.size(); ++i) {
    if (series.records[i].week == series.records[i - 1].week) {
      throw SchemaError("duplicate week " + std::to_string(series.records[i].week.year) + "-W" +
                        std::to_string(series.records[i].week.week));
    }
    if (series.records[i].week != series.records[i - 1].week.next()) series.has_gaps = true;
  }
  return series;
}

RawSeries load_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series_csv(buf.str());
}

std::string serialize_series_csv(const RawSeries& series) {
  bool with_sentinel = false;
  for (const auto& r : series.records) {
    if (r.flu_detect || r.rsv_detect) with_sentinel = true;
  }
  std::ostringstream out;
  out << (with_sentinel ? "iso_year,iso_week,ari_count,flu_detect,rsv_detect"
                        : "iso_year,iso_week,ari_count")
      << "\n";
  char buf[64];
  for (const auto& r : series.records) {
    out << r.week.year << "," << r.week.week << "," << r.ari_count;
    if (with_sentinel) {
      out << ",";
      if (r.flu_detect) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.flu_detect);
        out << buf;
      }
      out << ",";
      if (r.rsv_detect) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.rsv_detect);
        out << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

double historical_mean(const RawSeries& series, const std::set<int>& exclude_years) {
  double sum = 0.0;
  std::size_t n = 0;
  std::set<int> years;
  for (const auto& r : series.records) {
    if (exclude_years.count(r.week.year)) continue;
    sum += static_cast<double>(r.ari_count);
    ++n;
    years.insert(r.week.year);
  }
  if (years.size() < 2) {
    throw InsufficientHistory("historical_mean: need data from at least two years, have " +
                              std::to_string(years.size()));
  }
  return sum / static_cast<double>(n);
}

ObservationWindow SeasonWindow::to_observation() const {
  ObservationWindow w;
  w.week_bounds = week_bounds_days;
  w.counts = counts;
  return w;
}

SeasonWindow extract_season(const RawSeries& series, double baseline, int season_start_year,
                            const SeasonBands& bands) {
  const long onset_lo = days_from_civil(season_start_year, bands.onset_from_month, bands.onset_from_day);
  const long onset_hi = days_from_civil(season_start_year, bands.onset_to_month, bands.onset_to_day);
  const long offset_lo =
      days_from_civil(season_start_year + 1, bands.offset_from_month, bands.offset_from_day);
  const long offset_hi =
      days_from_civil(season_start_year + 1, bands.offset_to_month, bands.offset_to_day);

  const auto& recs = series.records;
  std::size_t start_idx = recs.size();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const long monday = recs[i].week.monday();
    if (monday >= onset_lo && monday <= onset_hi &&
        static_cast<double>(recs[i].ari_count) >= baseline) {
      start_idx = i;
      break;
    }
  }
  if (start_idx == recs.size()) {
    throw NoOnsetFound("extract_season: no week in the onset band reaches the baseline " +
                       std::to_string(baseline));
  }

  std::size_t end_idx = recs.size();
  for (std::size_t i = start_idx + 1; i < recs.size(); ++i) {
    const long monday = recs[i].week.monday();
    if (monday > offset_hi) break;
    if (monday >= offset_lo && static_cast<double>(recs[i].ari_count) < baseline) {
      end_idx = i;
      break;
    }
  }
  if (end_idx == recs.size()) {
    throw NoOffsetFound("extract_season: no week in the offset band drops below the baseline");
  }

  SeasonWindow season;
  season.start = recs[start_idx].week;
  season.end = recs[end_idx].week;
  season.historical_mean = baseline;
  for (std::size_t i = start_idx; i <= end_idx; ++i) {
    if (i > start_idx && recs[i].week != recs[i - 1].week.next()) {
      throw SchemaError("extract_season: gap inside the season at " +
                        std::to_string(recs[i].week.year) + "-W" +
                        std::to_string(recs[i].week.week));
    }
    const auto detrended = std::llround(static_cast<double>(recs[i].ari_count) - baseline);
    if (detrended < 0) ++season.floored_weeks;
    season.counts.push_back(std::max<std::int64_t>(detrended, 0));
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    season.flu_detect.push_back(recs[i].flu_detect.value_or(nan));
    season.rsv_detect.push_back(recs[i].rsv_detect.value_or(nan));
  }
  season.week_bounds_days.resize(season.counts.size() + 1);
  for (std::size_t i = 0; i < season.week_bounds_days.size(); ++i) {
    season.week_bounds_days[i] = 7.0 * static_cast<double>(i);
  }
  return season;
}

SeasonWindow synthesize_dataset(const Theta& theta_true, const ModelParams& fixed, int weeks,
                                std::uint64_t seed, double tol) {
  if (weeks < 4) throw std::invalid_argument("synthesize_dataset: need at least 4 weeks");
  ObservationWindow grid;
  grid.week_bounds.resize(static_cast<std::size_t>(weeks) + 1);
  for (int i = 0; i <= weeks; ++i) {
    grid.week_bounds[static_cast<std::size_t>(i)] = 7.0 * i;
  }
  grid.counts.assign(static_cast<std::size_t>(weeks), 0);
  const std::vector<double> means = expected_weekly_incidence(theta_true, grid, fixed, tol);

  std::mt19937_64 rng(seed);
  SeasonWindow season;
  // Nominal calendar anchor for synthetic seasons (an October week).
  season.start = {2002, 44};
  IsoWeek w = season.start;
  for (int i = 0; i < weeks; ++i) {
    std::poisson_distribution<std::int64_t> pois(means[static_cast<std::size_t>(i)]);
    season.counts.push_back(means[static_cast<std::size_t>(i)] > 0.0 ? pois(rng) : 0);
    if (i + 1 < weeks) w = w.next();
  }
  season.end = w;
  season.week_bounds_days = grid.week_bounds;
  season.historical_mean = 0.0;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  season.flu_detect.assign(static_cast<std::size_t>(weeks), nan);
  season.rsv_detect.assign(static_cast<std::size_t>(weeks), nan);
  return season;
}

}  // namespace tpsir

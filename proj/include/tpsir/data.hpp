#ifndef TPSIR_DATA_HPP
#define TPSIR_DATA_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpsir/observation.hpp"
#include "tpsir/types.hpp"

namespace tpsir {

// --- ISO-8601 week calendar -------------------------------------------------

// Days since 1970-01-01 of a proleptic-Gregorian civil date.
long days_from_civil(int year, int month, int day);

// Day of week with Monday = 0.
int weekday(long days);

// Days-since-epoch of the Monday starting ISO week `week` of `year`.
long iso_week_monday(int year, int week);

// 52 or 53.
int iso_weeks_in_year(int year);

struct IsoWeek {
  int year = 0;
  int week = 0;

  auto operator<=>(const IsoWeek&) const = default;
  IsoWeek next() const;
  long monday() const { return iso_week_monday(year, week); }
};

// --- Raw surveillance series -------------------------------------------------

struct RawRecord {
  IsoWeek week;
  std::int64_t ari_count = 0;
  std::optional<double> flu_detect;  // sentinel columns, display only
  std::optional<double> rsv_detect;
};

struct RawSeries {
  std::vector<RawRecord> records;  // sorted by week
  bool has_gaps = false;
};

// CSV schema (header required): iso_year,iso_week,ari_count[,flu_detect,rsv_detect].
// ParseError carries the offending line; SchemaError names the column.
RawSeries load_series(const std::string& path);
RawSeries parse_series_csv(const std::string& text);
std::string serialize_series_csv(const RawSeries& series);

// Scalar baseline: arithmetic mean of all weekly counts outside excluded
// years.  Throws InsufficientHistory with fewer than two calendar years left.
double historical_mean(const RawSeries& series, const std::set<int>& exclude_years = {});

// Onset/offset calendar bands as month-day pairs (inclusive).
struct SeasonBands {
  int onset_from_month = 10, onset_from_day = 1;
  int onset_to_month = 11, onset_to_day = 30;
  int offset_from_month = 4, offset_from_day = 1;
  int offset_to_month = 5, offset_to_day = 31;
};

// One extracted high season: start and end weeks, baseline, detrended counts
// z_i = max(0, round(raw - baseline)) and day-grid boundaries from day 0.
struct SeasonWindow {
  IsoWeek start;
  IsoWeek end;
  double historical_mean = 0.0;
  std::vector<std::int64_t> counts;
  std::vector<double> week_bounds_days;
  int floored_weeks = 0;
  std::vector<double> flu_detect;  // NaN where absent
  std::vector<double> rsv_detect;

  std::size_t weeks() const { return counts.size(); }
  ObservationWindow to_observation() const;
};

// High season of `season_start_year`: starts at the first week whose Monday
// falls in the onset band with count >= baseline, ends at the first week in
// the offset band of the following year with count < baseline.
SeasonWindow extract_season(const RawSeries& series, double baseline, int season_start_year,
                            const SeasonBands& bands = {});

// Synthetic season: independent Poisson draws around the expected weekly
// incidence at theta_true.  Reproducible by seed.
SeasonWindow synthesize_dataset(const Theta& theta_true, const ModelParams& fixed, int weeks,
                                std::uint64_t seed, double tol = kDefaultIntegratorTol);

}  // namespace tpsir

#endif  // TPSIR_DATA_HPP

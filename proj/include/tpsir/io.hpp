#ifndef TPSIR_IO_HPP
#define TPSIR_IO_HPP

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "tpsir/data.hpp"
#include "tpsir/inference.hpp"
#include "tpsir/types.hpp"

namespace tpsir {

// Retained draws, flat: one row per draw, theta columns plus log_post, plus
// the chain that produced it.
struct DrawsTable {
  Eigen::MatrixXd draws;  // n x Theta::kDim
  Eigen::VectorXd log_post;
  std::vector<int> chain;

  std::int64_t size() const { return draws.rows(); }
};

void write_draws_csv(const std::string& path, const DrawsTable& table);
DrawsTable read_draws_csv(const std::string& path);

struct TrajectoryTable {
  std::vector<double> times;
  std::vector<State> states;
};

void write_trajectory_csv(const std::string& path, const TrajectoryTable& table);
TrajectoryTable read_trajectory_csv(const std::string& path);

// t,r1,r2 rows; crossover times recorded in a comment header line.
void write_replacement_csv(const std::string& path, const ReplacementSeries& series);
ReplacementSeries read_replacement_csv(const std::string& path);

nlohmann::json season_to_json(const SeasonWindow& season);
SeasonWindow season_from_json(const nlohmann::json& j);
void write_season_json(const std::string& path, const SeasonWindow& season);
SeasonWindow read_season_json(const std::string& path);

nlohmann::json fit_report_to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);
void write_fit_report_json(const std::string& path, const FitReport& report);
FitReport read_fit_report_json(const std::string& path);

// Per-parameter histogram bins for external plotting:
// parameter,bin_lo,bin_hi,count rows.
void write_histograms_csv(const std::string& path, const Eigen::MatrixXd& draws);

std::string format_double(double v);  // shortest round-trip-exact decimal

}  // namespace tpsir

#endif  // TPSIR_IO_HPP

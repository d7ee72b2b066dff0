#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "pegp/env/environment.hpp"
#include "pegp/gp/kernel.hpp"

namespace pegp::env {

/// Mean temperature per (interval, sensor) for one day.
struct DayMatrix {
  std::string day;  // yyyy-mm-dd
  int interval_minutes = 10;
  std::vector<int> sensors;       // column order
  Eigen::MatrixXd temperature;    // intervals x sensors
  std::vector<int> dropped;       // sensors removed for > 50% missing cells
  std::size_t records = 0;        // parsed records that landed on this day
  std::size_t malformed = 0;      // unparseable lines in the whole input
};

/// Parses the raw lab-data text format
/// `yyyy-mm-dd hh:mm:ss.ffffff epoch moteid temperature humidity light voltage`
/// for each requested day in one pass. When `sensors` is non-empty the columns
/// follow that order; otherwise all sensors seen on the day, ascending. Gaps are
/// filled by carrying the last observation forward, then by the sensor's day mean.
std::vector<DayMatrix> ingest_intel_days(std::istream& in, std::span<const std::string> days, int interval_minutes,
                                         std::span<const int> sensors = {});

DayMatrix ingest_intel(std::istream& in, const std::string& day, int interval_minutes,
                       std::span<const int> sensors = {});

/// CSV cache: header `interval,sensor_<id>,...`, one row per interval.
void write_day_csv(const DayMatrix& day, const std::filesystem::path& path);
DayMatrix read_day_csv(const std::filesystem::path& path, const std::string& day, int interval_minutes);

/// A per-day prior model: sensor correlation, temporal forgetting and noise level.
struct SensorDayModel {
  std::string day;
  std::vector<int> sensors;
  Eigen::MatrixXd correlation;
  double forgetting = 0.0;
  double noise_std = 0.05;
};

/// Columns shifted to zero mean and unit sample variance. Throws for constant columns.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& data);

/// Empirical correlation between columns (unit diagonal).
Eigen::MatrixXd empirical_correlation(const Eigen::MatrixXd& data);

/// log N(vec(Y); 0, A_eps (x) C + R^2 I) where A_eps(t, t') = (1 - eps)^{|t - t'|/2},
/// with rows of `y` indexing time and columns indexing sensors.
double kronecker_log_likelihood(const Eigen::MatrixXd& y, const Eigen::MatrixXd& correlation, double forgetting,
                                double noise_std);

/// Residual standard deviation of the persistence (one-step-ahead) predictor, floored at `floor`.
double persistence_noise_std(const Eigen::MatrixXd& standardized, double floor = 0.05);

std::vector<double> default_forgetting_grid();

/// Columns of `day` restricted to `sensors`.
Eigen::MatrixXd select_sensors(const DayMatrix& day, std::span<const int> sensors);

/// Correlation plus the grid value of eps maximising that day's likelihood.
SensorDayModel fit_sensor_day(const DayMatrix& day, std::span<const int> sensors,
                              std::span<const double> forgetting_grid = {});

/// Sensors present in every day and non-constant on every day. Constant
/// sensors are reported through `warnings`.
std::vector<int> common_sensors(std::span<const DayMatrix> days, std::vector<std::string>* warnings = nullptr);

/// One zero-mean prior per day with kernel Cov(i, i') (1 - eps)^{|t - t'|/2}.
std::vector<gp::GPPrior> build_intel_priors(std::span<const SensorDayModel> models);

/// The target day as an environment: arms are sensors, t indexes intervals.
/// Observations are the day-standardized temperatures without added noise;
/// regret is reported in degrees.
Environment make_intel_environment(const DayMatrix& target, std::span<const int> sensors);

}  // namespace pegp::env

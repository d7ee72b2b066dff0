#include "pegp/env/intel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "pegp/errors.hpp"
#include "pegp/gp/factor.hpp"

namespace pegp::env {

namespace {

struct Record {
  std::string_view date;
  int minute_of_day;
  int sensor;
  double temperature;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool valid_date(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
  return true;
}

std::optional<int> minute_of_day(std::string_view time) {
  if (time.size() < 8 || time[2] != ':' || time[5] != ':') return std::nullopt;
  const auto h = parse_number<int>(time.substr(0, 2));
  const auto m = parse_number<int>(time.substr(3, 2));
  const auto s = parse_number<double>(time.substr(6));
  if (!h || !m || !s || *h < 0 || *h > 23 || *m < 0 || *m > 59 || *s < 0.0 || *s >= 61.0) return std::nullopt;
  return *h * 60 + *m;
}

std::optional<Record> parse_record(std::string_view line) {
  const auto f = split_ws(line);
  if (f.size() < 5) return std::nullopt;
  if (!valid_date(f[0])) return std::nullopt;
  const auto minute = minute_of_day(f[1]);
  const auto epoch = parse_number<long long>(f[2]);
  const auto sensor = parse_number<int>(f[3]);
  const auto temp = parse_number<double>(f[4]);
  if (!minute || !epoch || !sensor || !temp || !std::isfinite(*temp)) return std::nullopt;
  return Record{f[0], *minute, *sensor, *temp};
}

struct DayAccumulator {
  std::map<int, std::map<int, std::pair<double, int>>> cells;  // sensor -> interval -> (sum, count)
  std::size_t records = 0;
};

DayMatrix finish_day(const std::string& day, const DayAccumulator& acc, int interval_minutes,
                     std::span<const int> sensors, std::size_t malformed) {
  if (acc.records == 0) throw IngestionError("no parseable records for day " + day);
  const int intervals = (1440 + interval_minutes - 1) / interval_minutes;

  std::vector<int> columns(sensors.begin(), sensors.end());
  if (columns.empty())
    for (const auto& [sensor, unused] : acc.cells) columns.push_back(sensor);

  DayMatrix out;
  out.day = day;
  out.interval_minutes = interval_minutes;
  out.records = acc.records;
  out.malformed = malformed;
  std::vector<Eigen::VectorXd> kept;
  for (int sensor : columns) {
    const auto it = acc.cells.find(sensor);
    Eigen::VectorXd col = Eigen::VectorXd::Constant(intervals, std::nan(""));
    int observed = 0;
    double total = 0.0;
    if (it != acc.cells.end()) {
      for (const auto& [interval, sum_count] : it->second) {
        col(interval) = sum_count.first / sum_count.second;
        total += col(interval);
        ++observed;
      }
    }
    if (2 * (intervals - observed) > intervals) {
      out.dropped.push_back(sensor);
      continue;
    }
    const double day_mean = total / observed;
    double last = std::nan("");
    for (int i = 0; i < intervals; ++i) {
      if (std::isnan(col(i)))
        col(i) = std::isnan(last) ? day_mean : last;
      else
        last = col(i);
    }
    out.sensors.push_back(sensor);
    kept.push_back(std::move(col));
  }
  out.temperature.resize(intervals, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.temperature.col(static_cast<Eigen::Index>(j)) = kept[j];
  return out;
}

}  // namespace

std::vector<DayMatrix> ingest_intel_days(std::istream& in, std::span<const std::string> days, int interval_minutes,
                                         std::span<const int> sensors) {
  if (interval_minutes < 1 || interval_minutes > 1440) throw ParameterError("interval must lie in [1, 1440] minutes");
  if (days.empty()) throw ParameterError("no days requested");
  std::map<std::string, DayAccumulator, std::less<>> acc;
  for (const auto& d : days) acc[d];
  std::set<int> wanted(sensors.begin(), sensors.end());

  std::size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto rec = parse_record(line);
    if (!rec) {
      ++malformed;
      continue;
    }
    const auto it = acc.find(rec->date);
    if (it == acc.end()) continue;
    if (!wanted.empty() && !wanted.count(rec->sensor)) continue;
    auto& cell = it->second.cells[rec->sensor][rec->minute_of_day / interval_minutes];
    cell.first += rec->temperature;
    cell.second += 1;
    it->second.records += 1;
  }

  std::vector<DayMatrix> out;
  for (const auto& d : days) out.push_back(finish_day(d, acc[d], interval_minutes, sensors, malformed));
  return out;
}

DayMatrix ingest_intel(std::istream& in, const std::string& day, int interval_minutes, std::span<const int> sensors) {
  const std::string days[] = {day};
  return std::move(ingest_intel_days(in, days, interval_minutes, sensors).front());
}

void write_day_csv(const DayMatrix& day, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << "interval";
  for (int s : day.sensors) out << ",sensor_" << s;
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < day.temperature.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < day.temperature.cols(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, day.temperature(i, j));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed", path.string());
}

DayMatrix read_day_csv(const std::filesystem::path& path, const std::string& day, int interval_minutes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading", path.string());
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("empty day CSV: " + path.string());
  DayMatrix out;
  out.day = day;
  out.interval_minutes = interval_minutes;
  std::stringstream header(line);
  std::string cell;
  std::getline(header, cell, ',');
  if (cell != "interval") throw IngestionError("day CSV must start with an 'interval' column: " + path.string());
  while (std::getline(header, cell, ',')) {
    const auto id = cell.rfind("sensor_", 0) == 0 ? parse_number<int>(std::string_view(cell).substr(7)) : std::nullopt;
    if (!id) throw IngestionError("bad sensor column '" + cell + "' in " + path.string());
    out.sensors.push_back(*id);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::getline(row, cell, ',');
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      const auto v = parse_number<double>(cell);
      if (!v) throw IngestionError("bad value '" + cell + "' in " + path.string());
      values.push_back(*v);
    }
    if (values.size() != out.sensors.size()) throw IngestionError("ragged row in " + path.string());
    rows.push_back(std::move(values));
  }
  out.temperature.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.sensors.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < out.sensors.size(); ++j)
      out.temperature(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  out.records = rows.size() * out.sensors.size();
  return out;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw ParameterError("need at least two rows to standardize");
  Eigen::MatrixXd out = data.rowwise() - data.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(out.rows() - 1));
    if (!(sd > 0.0)) throw ParameterError("column " + std::to_string(j) + " is constant");
    out.col(j) /= sd;
  }
  return out;
}

Eigen::MatrixXd empirical_correlation(const Eigen::MatrixXd& data) {
  const Eigen::MatrixXd z = standardize_columns(data);
  Eigen::MatrixXd c = (z.transpose() * z) / static_cast<double>(z.rows() - 1);
  c = 0.5 * (c + c.transpose());
  c.diagonal().setOnes();
  return c;
}

double kronecker_log_likelihood(const Eigen::MatrixXd& y, const Eigen::MatrixXd& correlation, double forgetting,
                                double noise_std) {
  const Eigen::Index nt = y.rows();
  const Eigen::Index ns = y.cols();
  if (correlation.rows() != ns || correlation.cols() != ns) throw ParameterError("correlation size mismatch");
  Eigen::MatrixXd temporal(nt, nt);
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < nt; ++j)
      temporal(i, j) = i == j ? 1.0 : std::pow(1.0 - forgetting, std::abs(static_cast<double>(i - j)) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(temporal);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(correlation);
  const Eigen::VectorXd lt = et.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd ls = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd rotated = et.eigenvectors().transpose() * y * es.eigenvectors();
  const Eigen::MatrixXd spectrum = (lt * ls.transpose()).array() + noise_std * noise_std;
  const double quad = (rotated.array().square() / spectrum.array()).sum();
  const double logdet = spectrum.array().log().sum();
  const double n = static_cast<double>(nt * ns);
  return -0.5 * quad - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

double persistence_noise_std(const Eigen::MatrixXd& standardized, double floor) {
  if (standardized.rows() < 3) return floor;
  const Eigen::MatrixXd diff =
      standardized.bottomRows(standardized.rows() - 1) - standardized.topRows(standardized.rows() - 1);
  const double mean = diff.mean();
  const double var = (diff.array() - mean).square().sum() / static_cast<double>(diff.size() - 1);
  return std::max(floor, std::sqrt(var));
}

std::vector<double> default_forgetting_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 50; ++i) out.push_back(i / 100.0);
  return out;
}

Eigen::MatrixXd select_sensors(const DayMatrix& day, std::span<const int> sensors) {
  Eigen::MatrixXd out(day.temperature.rows(), static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    const auto it = std::find(day.sensors.begin(), day.sensors.end(), sensors[j]);
    if (it == day.sensors.end())
      throw IngestionError("sensor " + std::to_string(sensors[j]) + " missing from day " + day.day);
    out.col(static_cast<Eigen::Index>(j)) = day.temperature.col(it - day.sensors.begin());
  }
  return out;
}

SensorDayModel fit_sensor_day(const DayMatrix& day, std::span<const int> sensors,
                              std::span<const double> forgetting_grid) {
  const std::vector<double> fallback = default_forgetting_grid();
  if (forgetting_grid.empty()) forgetting_grid = fallback;
  const Eigen::MatrixXd raw = select_sensors(day, sensors);
  SensorDayModel model;
  model.day = day.day;
  model.sensors.assign(sensors.begin(), sensors.end());
  model.correlation = empirical_correlation(raw);
  gp::factorize_with_jitter<double>(model.correlation, day.day);  // throws for non-PSD tables

  const Eigen::MatrixXd z = standardize_columns(raw);
  model.noise_std = persistence_noise_std(z);
  double best = -INFINITY;
  for (double eps : forgetting_grid) {
    const double ll = kronecker_log_likelihood(z, model.correlation, eps, model.noise_std);
    if (ll > best) {
      best = ll;
      model.forgetting = eps;
    }
  }
  return model;
}

std::vector<int> common_sensors(std::span<const DayMatrix> days, std::vector<std::string>* warnings) {
  if (days.empty()) return {};
  std::vector<int> out;
  for (int s : days.front().sensors) {
    bool keep = true;
    for (const auto& d : days) {
      const auto it = std::find(d.sensors.begin(), d.sensors.end(), s);
      if (it == d.sensors.end()) {
        keep = false;
        break;
      }
      const auto col = d.temperature.col(it - d.sensors.begin());
      if (d.temperature.rows() < 2 || (col.array() == col(0)).all()) {
        if (warnings) warnings->push_back("sensor " + std::to_string(s) + " is constant on " + d.day + "; dropped");
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(s);
  }
  return out;
}

std::vector<gp::GPPrior> build_intel_priors(std::span<const SensorDayModel> models) {
  std::vector<gp::GPPrior> out;
  for (const auto& m : models) {
    gp::GPPrior p;
    p.id = m.day;
    p.mean = gp::zero_mean<double>();
    p.kernel = std::make_shared<gp::CovarianceTableKernel<double>>(m.correlation, m.forgetting);
    out.push_back(std::move(p));
  }
  return out;
}

Environment make_intel_environment(const DayMatrix& target, std::span<const int> sensors) {
  const Eigen::MatrixXd raw = select_sensors(target, sensors);
  const double mean = raw.mean();
  const double sd = std::sqrt((raw.array() - mean).square().sum() / static_cast<double>(raw.size() - 1));
  if (!(sd > 0.0)) throw IngestionError("target day " + target.day + " has constant temperatures");
  const Eigen::MatrixXd standardized = (raw.array() - mean) / sd;
  std::vector<Eigen::VectorXd> arms;
  for (int s : sensors) {
    Eigen::VectorXd x(1);
    x(0) = s;
    arms.push_back(std::move(x));
  }
  // values: arms x timesteps
  return Environment(arms, standardized.transpose(), static_cast<int>(raw.rows()), 0.0, {}, sd);
}

}  // namespace pegp::env

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace pegp::harness {

/// One timestep of one run. Quantities a policy does not produce are NaN / empty.
struct TraceRecord {
  int t = 0;
  int arm = -1;
  double x = std::numeric_limits<double>::quiet_NaN();  // first coordinate of x_t
  std::string prior;                                    // chosen prior id
  double y = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double regret = 0.0;
  double cum_regret = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double xi = std::numeric_limits<double>::quiet_NaN();
  std::string eliminated;  // prior ids dropped at this step, ';'-separated
  std::string reinstated;
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<std::string> prior_ids;
  std::vector<TraceRecord> records;
  bool ok = true;
  std::string error;
  std::vector<std::string> warnings;
};

inline constexpr const char* kTraceHeader = "t,arm,x,prior,y,eta,regret,cum_regret,beta,sigma,xi,eliminated,reinstated";

std::string trace_stem(const std::string& algorithm, std::uint64_t seed);

/// `<dir>/<algorithm>_seed<seed>.csv` plus a `.meta.json` sidecar.
void write_trace(const RunTrace& trace, const std::filesystem::path& dir, const std::string& config_hash);
RunTrace read_trace(const std::filesystem::path& csv_path);
std::vector<RunTrace> read_traces(const std::filesystem::path& dir);

/// Problems found when re-checking a trace: cumulative regret equals the
/// prefix sum of regrets, regrets are non-negative, and for pe-gp-ucb every
/// elimination matches |sum eta| > sqrt(xi |S|) + sum beta sigma recomputed from
/// the stored columns (and no un-annotated step satisfies it).
std::vector<std::string> check_trace(const RunTrace& trace, double tolerance = 1e-9);

}  // namespace pegp::harness

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pegp/harness/trace.hpp"

namespace pegp::harness {

struct AlgorithmSummary {
  std::string algorithm;
  int num_seeds = 0;
  Eigen::VectorXd mean_cum_regret;  // index t - 1
  Eigen::VectorXd stderr_cum_regret;
  std::vector<std::pair<std::string, double>> selection_fraction;  // empty for prior-free algorithms
};

struct AggregateReport {
  std::vector<AlgorithmSummary> algorithms;

  const AlgorithmSummary* find(const std::string& algorithm) const;
};

/// Mean and standard error (sample std / sqrt(n)) of cumulative regret per
/// algorithm, plus pooled prior-selection fractions. Failed traces are skipped;
/// traces of one algorithm with differing lengths raise AggregationError.
AggregateReport aggregate(const std::vector<RunTrace>& traces);

enum class EmitFormat { csv, svg };

/// csv: `regret.csv` (algorithm,t,mean_cum_regret,stderr) and `histogram.csv`
/// (algorithm,prior_id,fraction). svg: `regret.svg` and `histogram.svg`.
std::vector<std::filesystem::path> emit(const AggregateReport& report, EmitFormat format,
                                        const std::filesystem::path& dir);

AggregateReport read_report_csv(const std::filesystem::path& dir);

}  // namespace pegp::harness

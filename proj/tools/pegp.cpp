// Command-line front end: run | aggregate | emit | ingest-intel.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pegp/env/intel.hpp"
#include "pegp/errors.hpp"
#include "pegp/harness/config.hpp"
#include "pegp/harness/report.hpp"
#include "pegp/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace pegp;

namespace {

enum Exit { kOk = 0, kConfig = 1, kCells = 2, kIo = 3 };

fs::path default_out(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(harness::kOutputDirEnv); env && *env) return env;
  return "pegp-out";
}

struct RunArgs {
  std::string config, out, experiment;
  std::vector<std::string> algorithms;
  std::optional<std::uint64_t> seed;
  std::optional<int> num_seeds, horizon, jobs;
};

int do_run(const RunArgs& a) {
  harness::ExperimentConfig config;
  if (!a.config.empty()) config = harness::load_config(a.config);
  if (!a.experiment.empty()) config.experiment = a.experiment;
  if (!a.algorithms.empty()) config.algorithms = a.algorithms;
  if (a.seed) config.first_seed = *a.seed;
  if (a.num_seeds) config.num_seeds = *a.num_seeds;
  if (a.horizon) config.horizon = *a.horizon;
  if (a.jobs) config.jobs = *a.jobs;
  const fs::path out = default_out(a.out, config.output_dir);
  config.output_dir = out.string();
  harness::validate(config);

  const auto problem = harness::prepare_problem(config);
  for (const auto& w : problem.warnings) std::cerr << "warning: " << w << '\n';
  const auto traces = harness::run_experiment(config, problem);
  harness::persist(config, traces, out);

  int failed = 0;
  for (const auto& t : traces) {
    if (t.ok) continue;
    ++failed;
    std::cerr << "cell " << t.algorithm << " seed " << t.seed << " failed: " << t.error << '\n';
  }
  std::cout << "wrote " << traces.size() << " traces to " << (out / "traces").string() << '\n';
  return failed ? kCells : kOk;
}

fs::path traces_dir(const fs::path& run_dir) {
  return fs::is_directory(run_dir / "traces") ? run_dir / "traces" : run_dir;
}

int do_aggregate(const std::string& run_dir, const std::string& out_flag) {
  const auto report = harness::aggregate(harness::read_traces(traces_dir(run_dir)));
  const fs::path out = out_flag.empty() ? fs::path(run_dir) : fs::path(out_flag);
  for (const auto& f : harness::emit(report, harness::EmitFormat::csv, out)) std::cout << f.string() << '\n';
  return kOk;
}

int do_emit(const std::string& input, const std::string& format, const std::string& out_flag) {
  const fs::path in(input);
  // Either a run directory (traces) or a directory holding aggregated CSVs.
  const bool has_report = fs::exists(in / "regret.csv") && fs::exists(in / "histogram.csv");
  const auto report =
      has_report ? harness::read_report_csv(in) : harness::aggregate(harness::read_traces(traces_dir(in)));
  const auto fmt = format == "svg" ? harness::EmitFormat::svg : harness::EmitFormat::csv;
  const fs::path out = out_flag.empty() ? in : fs::path(out_flag);
  for (const auto& f : harness::emit(report, fmt, out)) std::cout << f.string() << '\n';
  return kOk;
}

int do_ingest(const std::string& data, std::vector<std::string> days, int interval, const std::string& out_flag) {
  if (days.empty()) {
    days = harness::default_history_days();
    days.push_back(harness::IntelConfig{}.target_day);
  }
  std::ifstream in(data);
  if (!in) throw IoError("cannot open for reading", data);
  const auto matrices = env::ingest_intel_days(in, days, interval);
  const fs::path out = default_out(out_flag, "");
  fs::create_directories(out);
  for (const auto& m : matrices) {
    const auto path = out / (m.day + ".csv");
    env::write_day_csv(m, path);
    std::cout << path.string() << ": " << m.temperature.rows() << " intervals x " << m.sensors.size()
              << " sensors, " << m.dropped.size() << " dropped, " << m.malformed << " malformed lines\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying GP bandits under an unknown prior"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run every (algorithm, seed) cell and persist traces");
  run_cmd->add_option("-c,--config", run.config, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", run.out, "output directory (default: config, then $PEGP_OUTPUT_DIR)");
  run_cmd->add_option("-e,--experiment", run.experiment, "toy | intel | custom");
  run_cmd->add_option("-a,--algorithms", run.algorithms, "comma-separated algorithm ids")->delimiter(',');
  run_cmd->add_option("-s,--seed", run.seed, "first seed");
  run_cmd->add_option("-n,--num-seeds", run.num_seeds, "number of seeds");
  run_cmd->add_option("-T,--horizon", run.horizon, "number of timesteps");
  run_cmd->add_option("-j,--jobs", run.jobs, "worker threads");

  std::string agg_in, agg_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "mean/stderr regret curves and selection histograms as CSV");
  agg_cmd->add_option("run_dir", agg_in, "run directory or trace directory")->required();
  agg_cmd->add_option("-o,--out", agg_out, "output directory (default: run_dir)");

  std::string emit_in, emit_out, emit_format = "svg";
  auto* emit_cmd = app.add_subcommand("emit", "write figures (svg) or CSV tables");
  emit_cmd->add_option("input", emit_in, "run directory or directory holding regret.csv/histogram.csv")->required();
  emit_cmd->add_option("-f,--format", emit_format, "csv | svg")->check(CLI::IsMember({"csv", "svg"}));
  emit_cmd->add_option("-o,--out", emit_out, "output directory (default: input)");

  std::string ingest_data, ingest_out;
  std::vector<std::string> ingest_days;
  int ingest_interval = 10;
  auto* ingest_cmd = app.add_subcommand("ingest-intel", "bucket the raw lab data into per-day interval matrices");
  ingest_cmd->add_option("data", ingest_data, "raw data.txt")->required();
  ingest_cmd->add_option("-d,--days", ingest_days, "YYYY-MM-DD list (default: 03-01..03-14)")->delimiter(',');
  ingest_cmd->add_option("-i,--interval", ingest_interval, "bucket width in minutes")->check(CLI::Range(1, 1440));
  ingest_cmd->add_option("-o,--out", ingest_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return do_run(run);
    if (*agg_cmd) return do_aggregate(agg_in, agg_out);
    if (*emit_cmd) return do_emit(emit_in, emit_format, emit_out);
    if (*ingest_cmd) return do_ingest(ingest_data, ingest_days, ingest_interval, ingest_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const IngestionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCells;
  }
  return kOk;
}

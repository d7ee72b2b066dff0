#include "pegp/harness/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pegp/errors.hpp"
#include "pegp/harness/config.hpp"

namespace pegp::harness {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, const std::string& path) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IngestionError("bad number '" + s + "' in " + path);
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool contains_id(const std::string& list, const std::string& id) {
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (item == id) return true;
  return false;
}

}  // namespace

std::string trace_stem(const std::string& algorithm, std::uint64_t seed) {
  return algorithm + "_seed" + std::to_string(seed);
}

void write_trace(const RunTrace& trace, const std::filesystem::path& dir, const std::string& config_hash) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory", dir.string());
  const auto stem = trace_stem(trace.algorithm, trace.seed);
  const auto csv_path = dir / (stem + ".csv");
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", csv_path.string());
    out << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
      out << r.t << ',' << r.arm << ',' << format_double(r.x) << ',' << r.prior << ',' << format_double(r.y) << ','
          << format_double(r.eta) << ',' << format_double(r.regret) << ',' << format_double(r.cum_regret) << ','
          << format_double(r.beta) << ',' << format_double(r.sigma) << ',' << format_double(r.xi) << ','
          << r.eliminated << ',' << r.reinstated << '\n';
    }
    if (!out) throw IoError("write failed", csv_path.string());
  }
  const auto meta_path = dir / (stem + ".meta.json");
  nlohmann::json meta = {{"algorithm", trace.algorithm},
                         {"seed", trace.seed},
                         {"priors", trace.prior_ids},
                         {"status", trace.ok ? "ok" : "failed"},
                         {"error", trace.error},
                         {"warnings", trace.warnings},
                         {"steps", trace.records.size()},
                         {"config_hash", config_hash},
                         {"library_version", std::string(kLibraryVersion)}};
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", meta_path.string());
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("write failed", meta_path.string());
}

RunTrace read_trace(const std::filesystem::path& csv_path) {
  const std::string path = csv_path.string();
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  RunTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw IngestionError("unexpected trace header in " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) throw IngestionError("trace row has " + std::to_string(f.size()) + " fields in " + path);
    TraceRecord r;
    r.t = std::stoi(f[0]);
    r.arm = std::stoi(f[1]);
    r.x = parse_double(f[2], path);
    r.prior = f[3];
    r.y = parse_double(f[4], path);
    r.eta = parse_double(f[5], path);
    r.regret = parse_double(f[6], path);
    r.cum_regret = parse_double(f[7], path);
    r.beta = parse_double(f[8], path);
    r.sigma = parse_double(f[9], path);
    r.xi = parse_double(f[10], path);
    r.eliminated = f[11];
    r.reinstated = f[12];
    trace.records.push_back(std::move(r));
  }

  auto meta_path = csv_path;
  meta_path.replace_extension(".meta.json");
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw IoError("missing trace metadata", meta_path.string());
  try {
    nlohmann::json meta;
    meta_in >> meta;
    trace.algorithm = meta.at("algorithm").get<std::string>();
    trace.seed = meta.at("seed").get<std::uint64_t>();
    trace.prior_ids = meta.value("priors", std::vector<std::string>{});
    trace.ok = meta.value("status", std::string("ok")) == "ok";
    trace.error = meta.value("error", std::string());
    trace.warnings = meta.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("bad trace metadata " + meta_path.string() + ": " + e.what());
  }
  return trace;
}

std::vector<RunTrace> read_traces(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory", dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> out;
  for (const auto& f : files) out.push_back(read_trace(f));
  return out;
}

std::vector<std::string> check_trace(const RunTrace& trace, double tolerance) {
  std::vector<std::string> problems;
  double running = 0.0;
  struct Sums {
    std::size_t count = 0;
    double eta = 0.0;
    double beta_sigma = 0.0;
  };
  std::map<std::string, Sums> sums;
  const bool elimination = trace.algorithm == "pe-gp-ucb";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const std::string at = "t=" + std::to_string(r.t) + ": ";
    if (r.t != static_cast<int>(i) + 1) problems.push_back(at + "timesteps are not 1..T");
    if (r.regret < 0.0) problems.push_back(at + "negative regret");
    running += r.regret;
    if (std::abs(running - r.cum_regret) > tolerance) problems.push_back(at + "cumulative regret is not a prefix sum");
    if (!elimination) continue;
    // Only the prior chosen at step t can be eliminated at step t.
    if (r.eliminated != (contains_id(r.eliminated, r.prior) ? r.prior : std::string()))
      problems.push_back(at + "elimination of a prior not chosen at this step");
    if (r.prior.empty()) continue;
    auto& s = sums[r.prior];
    s.count += 1;
    s.eta += r.eta;
    s.beta_sigma += r.beta * r.sigma;
    const double lhs = std::abs(s.eta);
    const double rhs = std::sqrt(r.xi * static_cast<double>(s.count)) + s.beta_sigma;
    const bool fired = contains_id(r.eliminated, r.prior);
    if (fired && !(lhs > rhs - tolerance)) problems.push_back(at + "elimination of '" + r.prior + "' not justified");
    if (!fired && lhs > rhs + tolerance) problems.push_back(at + "missing elimination of '" + r.prior + "'");
  }
  return problems;
}

}  // namespace pegp::harness

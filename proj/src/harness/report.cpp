#include "pegp/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pegp/errors.hpp"

namespace pegp::harness {

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

double parse(const std::string& s, const std::string& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IngestionError("bad number '" + s + "' in " + path);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

void write_regret_svg(const AggregateReport& report, const std::filesystem::path& path) {
  constexpr double W = 640, H = 420, left = 70, right = 170, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  std::size_t tmax = 1;
  double ymax = 0.0;
  for (const auto& a : report.algorithms) {
    tmax = std::max<std::size_t>(tmax, static_cast<std::size_t>(a.mean_cum_regret.size()));
    if (a.mean_cum_regret.size() > 0) ymax = std::max(ymax, (a.mean_cum_regret + a.stderr_cum_regret).maxCoeff());
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  auto sx = [&](double t) { return left + pw * (tmax > 1 ? (t - 1.0) / static_cast<double>(tmax - 1) : 0.5); };
  auto sy = [&](double v) { return top + ph * (1.0 - v / ymax); };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(sy(v) + 4, 1) << "\" text-anchor=\"end\">" << fixed(v, 1)
        << "</text>\n";
    const double t = 1.0 + (static_cast<double>(tmax) - 1.0) * k / 4.0;
    out << "<text x=\"" << fixed(sx(t), 1) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << static_cast<long>(std::lround(t)) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">timestep</text>\n";
  out << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">cumulative regret</text>\n";

  for (std::size_t i = 0; i < report.algorithms.size(); ++i) {
    const auto& a = report.algorithms[i];
    const auto n = a.mean_cum_regret.size();
    if (n == 0) continue;
    std::ostringstream band, line;
    for (Eigen::Index k = 0; k < n; ++k)
      band << (k ? " L" : "M") << fixed(sx(k + 1.0)) << ',' << fixed(sy(a.mean_cum_regret(k) + a.stderr_cum_regret(k)));
    for (Eigen::Index k = n - 1; k >= 0; --k)
      band << " L" << fixed(sx(k + 1.0)) << ',' << fixed(sy(std::max(0.0, a.mean_cum_regret(k) - a.stderr_cum_regret(k))));
    for (Eigen::Index k = 0; k < n; ++k)
      line << (k ? " L" : "M") << fixed(sx(k + 1.0)) << ',' << fixed(sy(a.mean_cum_regret(k)));
    out << "<path d=\"" << band.str() << " Z\" fill=\"" << colour(i) << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    out << "<path d=\"" << line.str() << "\" fill=\"none\" stroke=\"" << colour(i) << "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i) + 8;
    out << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 35 << "\" y2=\"" << ly
        << "\" stroke=\"" << colour(i) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\">" << escape_xml(a.algorithm) << "</text>\n";
  }
  out << "</svg>\n";
  finish(out, path);
}

void write_histogram_svg(const AggregateReport& report, const std::filesystem::path& path) {
  std::vector<const AlgorithmSummary*> shown;
  std::vector<std::string> priors;
  for (const auto& a : report.algorithms) {
    if (a.selection_fraction.empty()) continue;
    shown.push_back(&a);
    for (const auto& [id, f] : a.selection_fraction)
      if (std::find(priors.begin(), priors.end(), id) == priors.end()) priors.push_back(id);
  }
  constexpr double H = 420, left = 60, right = 170, top = 30, bottom = 60;
  const double group = std::max<double>(30.0, 12.0 * static_cast<double>(std::max<std::size_t>(1, shown.size())) + 8);
  const double W = left + right + group * static_cast<double>(std::max<std::size_t>(1, priors.size()));
  const double pw = W - left - right, ph = H - top - bottom;
  const double bar = (group - 8.0) / static_cast<double>(std::max<std::size_t>(1, shown.size()));

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(W, 0) << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << fixed(W, 0) << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(top + ph * (1 - v) + 4, 1) << "\" text-anchor=\"end\">"
        << fixed(v, 2) << "</text>\n";
  }
  for (std::size_t p = 0; p < priors.size(); ++p) {
    const double gx = left + group * static_cast<double>(p);
    out << "<text x=\"" << fixed(gx + group / 2, 1) << "\" y=\"" << top + ph + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << escape_xml(priors[p]) << "</text>\n";
    for (std::size_t i = 0; i < shown.size(); ++i) {
      double f = 0.0;
      for (const auto& [id, frac] : shown[i]->selection_fraction)
        if (id == priors[p]) f = frac;
      out << "<rect x=\"" << fixed(gx + 4 + bar * static_cast<double>(i)) << "\" y=\"" << fixed(top + ph * (1 - f))
          << "\" width=\"" << fixed(bar) << "\" height=\"" << fixed(ph * f) << "\" fill=\"" << colour(i) << "\"/>\n";
    }
  }
  out << "<text x=\"" << fixed(left + pw / 2, 1) << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">prior</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">fraction of selections</text>\n";
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const double ly = top + 16.0 * static_cast<double>(i) + 8;
    out << "<rect x=\"" << fixed(left + pw + 15, 1) << "\" y=\"" << ly - 6 << "\" width=\"12\" height=\"12\" fill=\""
        << colour(i) << "\"/>\n";
    out << "<text x=\"" << fixed(left + pw + 32, 1) << "\" y=\"" << ly + 4 << "\">" << escape_xml(shown[i]->algorithm)
        << "</text>\n";
  }
  out << "</svg>\n";
  finish(out, path);
}

}  // namespace

const AlgorithmSummary* AggregateReport::find(const std::string& algorithm) const {
  for (const auto& a : algorithms)
    if (a.algorithm == algorithm) return &a;
  return nullptr;
}

AggregateReport aggregate(const std::vector<RunTrace>& traces) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunTrace*>> groups;
  for (const auto& t : traces) {
    if (!t.ok) continue;
    if (!groups.count(t.algorithm)) order.push_back(t.algorithm);
    groups[t.algorithm].push_back(&t);
  }

  AggregateReport report;
  for (const auto& name : order) {
    const auto& runs = groups[name];
    const auto steps = runs.front()->records.size();
    for (const auto* r : runs)
      if (r->records.size() != steps)
        throw AggregationError("traces of '" + name + "' have different lengths (" + std::to_string(steps) + " vs " +
                               std::to_string(r->records.size()) + ")");
    const auto n = static_cast<Eigen::Index>(steps);
    const double seeds = static_cast<double>(runs.size());
    Eigen::MatrixXd curves(static_cast<Eigen::Index>(runs.size()), n);
    for (std::size_t s = 0; s < runs.size(); ++s)
      for (Eigen::Index k = 0; k < n; ++k)
        curves(static_cast<Eigen::Index>(s), k) = runs[s]->records[static_cast<std::size_t>(k)].cum_regret;

    AlgorithmSummary summary;
    summary.algorithm = name;
    summary.num_seeds = static_cast<int>(runs.size());
    summary.mean_cum_regret = curves.colwise().mean().transpose();
    summary.stderr_cum_regret = Eigen::VectorXd::Zero(n);
    if (runs.size() > 1) {
      const Eigen::MatrixXd centred = curves.rowwise() - summary.mean_cum_regret.transpose();
      summary.stderr_cum_regret =
          (centred.colwise().squaredNorm().transpose() / (seeds - 1.0)).array().sqrt() / std::sqrt(seeds);
    }

    std::vector<std::string> ids = runs.front()->prior_ids;
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const auto* r : runs)
      for (const auto& rec : r->records) {
        if (rec.prior.empty()) continue;
        if (std::find(ids.begin(), ids.end(), rec.prior) == ids.end()) ids.push_back(rec.prior);
        counts[rec.prior] += 1;
        total += 1;
      }
    if (total > 0)
      for (const auto& id : ids)
        summary.selection_fraction.emplace_back(id, static_cast<double>(counts[id]) / static_cast<double>(total));
    report.algorithms.push_back(std::move(summary));
  }
  return report;
}

std::vector<std::filesystem::path> emit(const AggregateReport& report, EmitFormat format,
                                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory", dir.string());
  if (format == EmitFormat::svg) {
    write_regret_svg(report, dir / "regret.svg");
    write_histogram_svg(report, dir / "histogram.svg");
    return {dir / "regret.svg", dir / "histogram.svg"};
  }
  const auto regret_path = dir / "regret.csv";
  auto regret = open_out(regret_path);
  regret << "algorithm,t,mean_cum_regret,stderr\n";
  for (const auto& a : report.algorithms)
    for (Eigen::Index k = 0; k < a.mean_cum_regret.size(); ++k)
      regret << a.algorithm << ',' << k + 1 << ',' << num(a.mean_cum_regret(k)) << ',' << num(a.stderr_cum_regret(k))
             << '\n';
  finish(regret, regret_path);

  const auto hist_path = dir / "histogram.csv";
  auto hist = open_out(hist_path);
  hist << "algorithm,prior_id,fraction\n";
  for (const auto& a : report.algorithms)
    for (const auto& [id, f] : a.selection_fraction) hist << a.algorithm << ',' << id << ',' << num(f) << '\n';
  finish(hist, hist_path);
  return {regret_path, hist_path};
}

AggregateReport read_report_csv(const std::filesystem::path& dir) {
  AggregateReport report;
  auto summary_for = [&](const std::string& name) -> AlgorithmSummary& {
    for (auto& a : report.algorithms)
      if (a.algorithm == name) return a;
    {
      AlgorithmSummary s;
      s.algorithm = name;
      report.algorithms.push_back(std::move(s));
    }
    return report.algorithms.back();
  };
  auto read_rows = [](const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) throw IngestionError("unexpected header in " + path.string());
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      rows.push_back(std::move(cells));
    }
    return rows;
  };

  const auto regret_path = dir / "regret.csv";
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  for (const auto& row : read_rows(regret_path, "algorithm,t,mean_cum_regret,stderr")) {
    if (row.size() != 4) throw IngestionError("bad row in " + regret_path.string());
    summary_for(row[0]);
    auto& c = curves[row[0]];
    if (std::stoul(row[1]) != c.size() + 1) throw IngestionError("non-consecutive t in " + regret_path.string());
    c.emplace_back(parse(row[2], regret_path.string()), parse(row[3], regret_path.string()));
  }
  for (auto& a : report.algorithms) {
    const auto& c = curves[a.algorithm];
    a.mean_cum_regret.resize(static_cast<Eigen::Index>(c.size()));
    a.stderr_cum_regret.resize(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) {
      a.mean_cum_regret(static_cast<Eigen::Index>(k)) = c[k].first;
      a.stderr_cum_regret(static_cast<Eigen::Index>(k)) = c[k].second;
    }
  }
  const auto hist_path = dir / "histogram.csv";
  for (const auto& row : read_rows(hist_path, "algorithm,prior_id,fraction")) {
    if (row.size() != 3) throw IngestionError("bad row in " + hist_path.string());
    summary_for(row[0]).selection_fraction.emplace_back(row[1], parse(row[2], hist_path.string()));
  }
  return report;
}

}  // namespace pegp::harness

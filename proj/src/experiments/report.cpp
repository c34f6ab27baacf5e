#include "lpc/experiments/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "lpc/errors.hpp"

namespace lpc::experiments {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0"; // folds -0 into 0
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::optional<double> ReportRow::gap() const {
  if (!theory) return std::nullopt;
  return std::abs(empirical - *theory);
}

namespace {

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\"") != std::string::npos)
    throw std::invalid_argument("report field '" + s + "' contains a separator");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_cell(const std::string& s, int row) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("report row " + std::to_string(row) + ": '" + s + "' is not a number");
  return v;
}

} // namespace

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    check_field(r.experiment);
    check_field(r.variant);
    check_field(r.seed);
    check_field(r.metric);
    out << r.experiment << ',' << r.variant << ',' << format_number(r.grid) << ',' << r.seed << ',' << r.metric
        << ',' << format_number(r.empirical) << ',';
    if (r.theory) out << format_number(*r.theory) << ',' << format_number(*r.gap());
    else out << ',';
    out << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) throw ConfigError("report: missing or unexpected header");
  std::vector<ReportRow> rows;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw ConfigError("report row " + std::to_string(row) + ": expected 8 fields");
    ReportRow r;
    r.experiment = f[0];
    r.variant = f[1];
    r.grid = parse_cell(f[2], row);
    r.seed = f[3];
    r.metric = f[4];
    r.empirical = parse_cell(f[5], row);
    if (!f[6].empty()) r.theory = parse_cell(f[6], row);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& contents) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << contents;
    if (!out) throw ConfigError("failed writing " + (dir / name).string());
  };
  std::ostringstream csv;
  write_report_csv(csv, report.rows);
  write("report.csv", csv.str());

  std::string echo = "# config_hash = " + report.config_hash + "\n# seeds = ";
  for (std::size_t i = 0; i < report.seeds.size(); ++i) echo += (i ? "," : "") + std::to_string(report.seeds[i]);
  echo += "\n# lpc " LPC_VERSION "\n" + report.config_echo;
  write("config.echo", echo);
  write("plot.svg", report.plot_svg);
  for (const auto& [name, contents] : report.extras) write(name, contents);
}

namespace {

// Seeds compare numerically; "mean" sorts after every seed.
std::tuple<int, unsigned long long, std::string> seed_key(const std::string& s) {
  unsigned long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return {0, v, ""};
  return {1, 0, s};
}

} // namespace

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::forward_as_tuple(a.experiment, a.grid, a.variant, a.metric) <
               std::forward_as_tuple(b.experiment, b.grid, b.variant, b.metric) ||
           (std::forward_as_tuple(a.experiment, a.grid, a.variant, a.metric) ==
                std::forward_as_tuple(b.experiment, b.grid, b.variant, b.metric) &&
            seed_key(a.seed) < seed_key(b.seed));
  });
}

void append_seed_means(std::vector<ReportRow>& rows) {
  struct Acc {
    ReportRow row;
    double emp = 0.0, theory = 0.0;
    int count = 0;
    bool has_theory = true;
  };
  std::map<std::tuple<std::string, std::string, double, std::string>, Acc> groups;
  for (const auto& r : rows) {
    if (r.seed == "mean") continue;
    auto& a = groups[{r.experiment, r.variant, r.grid, r.metric}];
    if (a.count == 0) a.row = r;
    a.emp += r.empirical;
    if (r.theory) a.theory += *r.theory;
    else a.has_theory = false;
    ++a.count;
  }
  for (auto& [key, a] : groups) {
    ReportRow m = a.row;
    m.seed = "mean";
    m.empirical = a.emp / a.count;
    m.theory = a.has_theory ? std::optional<double>(a.theory / a.count) : std::nullopt;
    rows.push_back(std::move(m));
  }
}

} // namespace lpc::experiments

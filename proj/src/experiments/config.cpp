#include "lpc/experiments/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lpc/errors.hpp"
#include "lpc/experiments/report.hpp"
#include "lpc/theory.hpp"

namespace lpc::experiments {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool to_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  if (!to_double(text, v) || !std::isfinite(v)) throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (!cfg.values_.emplace(key, value).second)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, path.string());
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

const std::string* KeyValueConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
  const auto* v = raw(key);
  return v ? *v : fallback;
}

std::string KeyValueConfig::required_text(const std::string& key) const {
  const auto* v = raw(key);
  if (!v) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return *v;
}

double KeyValueConfig::number(const std::string& key, double fallback) const {
  const auto* v = raw(key);
  return v ? parse_number(key, *v) : fallback;
}

long long KeyValueConfig::integer(const std::string& key, long long fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
    throw ConfigError("key '" + key + "': '" + *v + "' is not an integer");
  return out;
}

bool KeyValueConfig::flag(const std::string& key, bool fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<double> KeyValueConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  if (v->find(':') != std::string::npos) {
    const auto parts = split(*v, ':');
    if (parts.size() != 3) throw ConfigError("key '" + key + "': range must be start:stop:step");
    const double start = parse_number(key, parts[0]);
    const double stop = parse_number(key, parts[1]);
    const double step = parse_number(key, parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("key '" + key + "': empty or reversed range");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    // Snapping to 12 significant digits keeps 0.1 steps at their decimal values.
    for (long long i = 0; i <= count; ++i) {
      double x = start + static_cast<double>(i) * step;
      if (std::abs(x) < 1e-9 * step) x = 0.0;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", x);
      out.push_back(std::strtod(buf, nullptr));
    }
    return out;
  }
  for (const auto& item : split(*v, ',')) out.push_back(parse_number(key, item));
  return out;
}

void KeyValueConfig::reject_unused() const {
  for (const auto& [key, value] : values_)
    if (!used_.count(key)) throw ConfigError(source_ + ": unknown or unused key '" + key + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
  case ExperimentKind::histogram: return "histogram";
  case ExperimentKind::sweep_eps: return "sweep-eps";
  case ExperimentKind::sweep_rho: return "sweep-rho";
  case ExperimentKind::sweep_gamma: return "sweep-gamma";
  case ExperimentKind::estimate_noise: return "estimate-noise";
  case ExperimentKind::multiclass: return "multiclass";
  case ExperimentKind::real_data: return "real-data";
  case ExperimentKind::theory: return "theory";
  }
  return "unknown";
}

ExperimentKind kind_for_subcommand(const std::string& subcommand, const KeyValueConfig& cfg) {
  if (subcommand == "histogram") return ExperimentKind::histogram;
  if (subcommand == "estimate-noise") return ExperimentKind::estimate_noise;
  if (subcommand == "multiclass") return ExperimentKind::multiclass;
  if (subcommand == "real-data") return ExperimentKind::real_data;
  if (subcommand == "theory") return ExperimentKind::theory;
  if (subcommand == "sweep") {
    const std::string axis = cfg.text("sweep", "");
    if (axis == "eps") return ExperimentKind::sweep_eps;
    if (axis == "rho") return ExperimentKind::sweep_rho;
    if (axis == "gamma") return ExperimentKind::sweep_gamma;
    throw ConfigError("key 'sweep' must be eps, rho or gamma");
  }
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

VariantSpec parse_variant(const std::string& token) {
  VariantSpec v;
  v.name = token;
  if (token == "naive") v.kind = VariantSpec::Kind::naive;
  else if (token == "unbiased") v.kind = VariantSpec::Kind::unbiased;
  else if (token == "optimized") v.kind = VariantSpec::Kind::optimized;
  else if (token == "oracle") v.kind = VariantSpec::Kind::oracle;
  else if (token.rfind("custom:", 0) == 0) {
    const auto parts = split(token.substr(7), ':');
    if (parts.size() != 2) throw ConfigError("custom variant must be custom:RHO_PLUS:RHO_MINUS, got '" + token + "'");
    v.kind = VariantSpec::Kind::custom;
    try {
      v.rho = RhoParams(parse_number("variants", parts[0]), parse_number("variants", parts[1]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("variant '" + token + "': " + e.what());
    }
  } else {
    throw ConfigError("unknown variant '" + token + "'");
  }
  return v;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) {
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), s);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw ConfigError("seed '" + item + "' is not a non-negative integer");
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

void require_increasing(const std::string& key, const std::vector<double>& v) {
  if (v.empty()) throw ConfigError("key '" + key + "' must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError("key '" + key + "' must be strictly increasing");
}

// Reads typed values and records their canonical form for the echo.
class Resolver {
public:
  explicit Resolver(const KeyValueConfig& cfg) : cfg_(cfg) {}

  double number(const std::string& key, double fallback) {
    const double v = cfg_.number(key, fallback);
    echo_[key] = format_number(v);
    return v;
  }
  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
    return v;
  }
  double probability(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError("key '" + key + "' must lie in [0, 1)");
    return v;
  }
  long long integer(const std::string& key, long long fallback, long long min) {
    const long long v = cfg_.integer(key, fallback);
    if (v < min) throw ConfigError("key '" + key + "' must be at least " + std::to_string(min));
    echo_[key] = std::to_string(v);
    return v;
  }
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    auto v = cfg_.numbers(key, fallback);
    echo_[key] = join(v);
    return v;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    auto v = cfg_.text(key, fallback);
    echo_[key] = v;
    return v;
  }
  bool flag(const std::string& key, bool fallback) {
    const bool v = cfg_.flag(key, fallback);
    echo_[key] = v ? "true" : "false";
    return v;
  }
  RhoParams rho(const std::string& key, const std::string& fallback) {
    const auto parts = split(text(key, fallback), ':');
    if (parts.size() != 2) throw ConfigError("key '" + key + "' must be RHO_PLUS:RHO_MINUS");
    try {
      return RhoParams(parse_number(key, parts[0]), parse_number(key, parts[1]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  void record(const std::string& key, const std::string& value) { echo_[key] = value; }

  std::string echo() const {
    std::string out;
    for (const auto& [k, v] : echo_) out += k + " = " + v + "\n";
    return out;
  }

private:
  const KeyValueConfig& cfg_;
  std::map<std::string, std::string> echo_;
};

void read_gamma(Resolver& r, ExperimentConfig& c, const std::string& fallback) {
  const std::string g = r.text("gamma", fallback);
  if (g == "optimal") {
    c.gamma_optimal = true;
    return;
  }
  c.gamma = parse_number("gamma", g);
  if (!(c.gamma > 0.0)) throw ConfigError("key 'gamma' must be positive or 'optimal'");
  r.record("gamma", format_number(c.gamma));
}

void read_variants(Resolver& r, ExperimentConfig& c, const std::string& fallback) {
  const std::string text = r.text("variants", fallback);
  for (const auto& token : split(text, ',')) {
    if (token.empty()) continue;
    c.variants.push_back(parse_variant(token));
  }
  if (c.variants.empty()) throw ConfigError("key 'variants' must name at least one variant");
}

void read_loss(Resolver& r, ExperimentConfig& c) {
  const std::string loss = r.text("loss", "squared");
  if (loss == "squared") {
    c.loss = LossKind::squared;
  } else if (loss == "bce") {
    c.loss = LossKind::bce;
    c.bce.gamma = r.positive("bce_gamma", c.bce.gamma);
    c.bce.learning_rate = r.positive("bce_learning_rate", c.bce.learning_rate);
    c.bce.iterations = static_cast<int>(r.integer("bce_iterations", c.bce.iterations, 0));
  } else {
    throw ConfigError("key 'loss' must be 'squared' or 'bce'");
  }
}

void read_binary_gmm(Resolver& r, ExperimentConfig& c) {
  c.p = r.integer("p", c.p, 1);
  c.n = r.integer("n", c.n, 2);
  c.pi1 = r.number("pi1", c.pi1);
  if (!(c.pi1 > 0.0 && c.pi1 < 1.0)) throw ConfigError("key 'pi1' must lie in (0, 1)");
  c.snr = r.number("snr", c.snr);
  if (!(c.snr >= 0.0)) throw ConfigError("key 'snr' must be >= 0");
}

void check_flip_sum(double a, double b) {
  if (!(a + b < 1.0)) throw ConfigError("eps_plus + eps_minus must be < 1");
}

} // namespace

ExperimentConfig resolve_config(const KeyValueConfig& cfg, ExperimentKind kind) {
  const long long version = cfg.integer("schema_version", -1);
  if (version == -1) throw ConfigError(cfg.source() + ": missing required key 'schema_version'");
  if (version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");

  ExperimentConfig c;
  c.kind = kind;
  Resolver r(cfg);
  r.record("experiment", to_string(kind));
  r.record("schema_version", std::to_string(kSchemaVersion));
  c.seeds = parse_seeds(cfg.text("seeds", "1"));
  {
    std::string s;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? "," : "") + std::to_string(c.seeds[i]);
    r.record("seeds", s);
  }

  switch (kind) {
  case ExperimentKind::histogram:
  case ExperimentKind::sweep_eps:
  case ExperimentKind::sweep_rho:
  case ExperimentKind::sweep_gamma: {
    read_binary_gmm(r, c);
    c.n_test = r.integer("n_test", c.n_test, 1);
    if (kind != ExperimentKind::sweep_eps) c.eps_plus = r.probability("eps_plus", 0.0);
    c.eps_minus = r.probability("eps_minus", 0.0);
    check_flip_sum(c.eps_plus, c.eps_minus);
    c.rho_minus = r.number("rho_minus", 0.0);
    if (kind != ExperimentKind::sweep_gamma) read_gamma(r, c, "1");
    if (kind != ExperimentKind::sweep_rho) read_variants(r, c, "naive,unbiased,optimized,oracle");
    read_loss(r, c);
    if (kind == ExperimentKind::histogram) {
      c.bins = static_cast<int>(r.integer("bins", c.bins, 1));
    } else {
      c.grid = r.numbers("grid", {});
      require_increasing("grid", c.grid);
      if (kind == ExperimentKind::sweep_eps)
        for (double e : c.grid) {
          if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps_plus grid values must lie in [0, 1)");
          check_flip_sum(e, c.eps_minus);
        }
      if (kind == ExperimentKind::sweep_gamma)
        for (double g : c.grid)
          if (!(g > 0.0)) throw ConfigError("gamma grid values must be positive");
    }
    break;
  }
  case ExperimentKind::estimate_noise: {
    read_binary_gmm(r, c);
    c.snr_values = r.numbers("snr_values", {c.snr});
    for (double s : c.snr_values)
      if (!(s > 0.0)) throw ConfigError("snr values must be positive");
    c.eps_minus = r.probability("eps_minus", 0.0);
    c.grid = r.numbers("grid", {});
    require_increasing("grid", c.grid);
    for (double e : c.grid) {
      if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps_plus grid values must lie in [0, 1)");
      check_flip_sum(e, c.eps_minus);
    }
    c.probe1 = r.rho("probe1", "0:0.1");
    c.probe2 = r.rho("probe2", "0:0.4");
    if (c.probe1 == c.probe2) throw ConfigError("probe1 and probe2 must differ");
    c.gamma = r.positive("gamma", 0.1);
    c.threshold_factor = r.positive("threshold_factor", c.threshold_factor);
    break;
  }
  case ExperimentKind::multiclass: {
    c.k = static_cast<int>(r.integer("k", 3, 2));
    c.p = r.integer("p", 200, 1);
    c.n = r.integer("n", 2000, 2);
    c.n_test = r.integer("n_test", 2000, 1);
    c.gamma = r.positive("gamma", 1.0);
    const auto pi = r.numbers("pi", {});
    if (static_cast<int>(pi.size()) != c.k) throw ConfigError("key 'pi' must list k proportions");
    c.class_pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), c.k);
    const auto eps = r.numbers("eps", {});
    if (static_cast<int>(eps.size()) != c.k * c.k)
      throw ConfigError("key 'eps' must list k*k entries (row-major, rows = observed class)");
    c.eps_matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        eps.data(), c.k, c.k);
    const auto coefs = r.numbers("mean_coefs", {});
    if (static_cast<int>(coefs.size()) != c.k) throw ConfigError("key 'mean_coefs' must list k values");
    c.mean_coefs = Eigen::Map<const Eigen::VectorXd>(coefs.data(), c.k);
    c.candidates = static_cast<int>(r.integer("candidates", c.candidates, 1));
    c.box_low = r.number("box_low", c.box_low);
    c.box_high = r.number("box_high", c.box_high);
    if (!(c.box_low < c.box_high)) throw ConfigError("box_low must be below box_high");
    c.taus = r.numbers("taus", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    require_increasing("taus", c.taus);
    break;
  }
  case ExperimentKind::real_data: {
    c.data_path = r.text("data_path", "");
    c.eps_plus = r.probability("eps_plus", 0.0);
    c.eps_minus = r.probability("eps_minus", 0.0);
    check_flip_sum(c.eps_plus, c.eps_minus);
    read_gamma(r, c, "optimal");
    read_variants(r, c, "naive,unbiased,optimized,oracle");
    if (c.data_path.empty()) {
      read_binary_gmm(r, c);
      c.n_test = r.integer("n_test", c.n_test, 1);
    } else {
      const std::string label = r.text("label_column", "0");
      std::size_t index = 0;
      auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), index);
      if (ec == std::errc() && ptr == label.data() + label.size() && !label.empty())
        c.csv.label_column = index;
      else
        c.csv.label_column = label;
      c.csv.has_header = r.flag("has_header", false);
      c.test_fraction = r.number("test_fraction", c.test_fraction);
      if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
        throw ConfigError("key 'test_fraction' must lie in (0, 1)");
    }
    break;
  }
  case ExperimentKind::theory: {
    c.p = r.integer("p", c.p, 1);
    c.n = r.integer("n", c.n, 1);
    c.pi1 = r.number("pi1", c.pi1);
    if (!(c.pi1 > 0.0 && c.pi1 < 1.0)) throw ConfigError("key 'pi1' must lie in (0, 1)");
    c.snr = r.number("snr", c.snr);
    c.eps_plus = r.probability("eps_plus", 0.0);
    c.eps_minus = r.probability("eps_minus", 0.0);
    check_flip_sum(c.eps_plus, c.eps_minus);
    c.rho_minus = r.number("rho_minus", 0.0);
    read_gamma(r, c, "1");
    read_variants(r, c, "naive,unbiased,optimized,oracle");
    break;
  }
  }

  cfg.reject_unused();
  c.echo = r.echo();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.echo)));
  c.hash = buf;
  return c;
}

} // namespace lpc::experiments

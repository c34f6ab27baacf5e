#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpc/datasets.hpp"
#include "lpc/lpc_core.hpp"
#include "lpc/rho.hpp"

namespace lpc::experiments {

inline constexpr int kSchemaVersion = 1;

/// Flat `key = value` file. Blank lines and `#` comments are ignored; keys
/// may appear once. Every key must be consumed by the resolver, so typos
/// surface as errors instead of silently falling back to defaults.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string text(const std::string& key, const std::string& fallback) const;
  std::string required_text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma-separated numbers, or `start:stop:step` (stop inclusive).
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError naming the first key nobody asked for.
  void reject_unused() const;

  const std::string& source() const { return source_; }

private:
  const std::string* raw(const std::string& key) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

enum class ExperimentKind { histogram, sweep_eps, sweep_rho, sweep_gamma, estimate_noise, multiclass, real_data, theory };

std::string to_string(ExperimentKind kind);

struct VariantSpec {
  enum class Kind { naive, unbiased, optimized, oracle, custom };
  Kind kind = Kind::naive;
  /// Used by custom variants only.
  RhoParams rho;
  std::string name;
};

/// Parses `naive`, `unbiased`, `optimized`, `oracle` or `custom:RP:RM`.
VariantSpec parse_variant(const std::string& token);

/// Fully resolved experiment parameters. Fields that a kind does not use keep
/// their defaults and are left out of the echo.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::theory;

  Eigen::Index p = 100;
  Eigen::Index n = 1000;
  Eigen::Index n_test = 10000;
  double pi1 = 0.5;
  double snr = 2.0;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  double rho_minus = 0.0;
  double gamma = 1.0;
  bool gamma_optimal = false;
  std::vector<VariantSpec> variants;
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds{1};
  LossKind loss = LossKind::squared;
  BceOptions bce;
  int bins = 60;

  RhoParams probe1{0.0, 0.1};
  RhoParams probe2{0.0, 0.4};
  std::vector<double> snr_values;
  double threshold_factor = 0.05;

  int k = 3;
  Eigen::VectorXd class_pi;
  Eigen::MatrixXd eps_matrix;
  Eigen::VectorXd mean_coefs;
  int candidates = 5000;
  double box_low = -2.0;
  double box_high = 2.0;
  std::vector<double> taus;

  std::string data_path;
  CsvOptions csv;
  double test_fraction = 0.2;

  int threads = 1;

  /// Canonical `key = value` lines of every semantic field, sorted by key.
  std::string echo;
  /// FNV-1a of echo, as 16 hex digits.
  std::string hash;
};

/// Maps a CLI subcommand to a kind; `sweep` reads the `sweep` key
/// (eps, rho or gamma).
ExperimentKind kind_for_subcommand(const std::string& subcommand, const KeyValueConfig& cfg);

ExperimentConfig resolve_config(const KeyValueConfig& cfg, ExperimentKind kind);

/// Parses a comma-separated seed list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

std::uint64_t fnv1a(const std::string& text);

} // namespace lpc::experiments

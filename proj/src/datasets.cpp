#include "lpc/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lpc/errors.hpp"
#include "lpc/random.hpp"

namespace lpc {

namespace {

void check_covariance(const Eigen::MatrixXd& c, Eigen::Index p, const char* name) {
  if (c.rows() != p || c.cols() != p) {
    throw std::invalid_argument(std::string(name) + " must be " + std::to_string(p) + "x" +
                                std::to_string(p));
  }
  if (!c.allFinite()) throw std::invalid_argument(std::string(name) + " has non-finite entries");
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
}

// Symmetric square root; rejects matrices with a materially negative eigenvalue.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& c, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) {
    throw NumericError(std::string("eigendecomposition of ") + name + " failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-10 * scale) {
    std::ostringstream msg;
    msg << name << " is not positive semi-definite (smallest eigenvalue " << ev.minCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }
  const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

void check_labels(const Eigen::VectorXd& y, const char* name) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) {
      throw std::invalid_argument(std::string(name) + " entry " + std::to_string(i) +
                                  " is not in {-1, +1}");
    }
  }
}

} // namespace

GmmSpec GmmSpec::isotropic(Eigen::Index p, Eigen::Index n, double pi1, double snr,
                           double eps_plus, double eps_minus, std::uint64_t seed) {
  GmmSpec spec;
  spec.p = p;
  spec.n = n;
  spec.pi1 = pi1;
  spec.mu = Eigen::VectorXd::Zero(p);
  if (p > 0) spec.mu[0] = snr;
  spec.eps_plus = eps_plus;
  spec.eps_minus = eps_minus;
  spec.seed = seed;
  return spec;
}

Eigen::Index GmmSpec::class1_count() const {
  return static_cast<Eigen::Index>(std::llround(pi1 * static_cast<double>(n)));
}

void GmmSpec::validate() const {
  if (p < 1) throw std::invalid_argument("p must be at least 1");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw std::invalid_argument("pi1 must lie in (0, 1)");
  if (mu.size() != p) throw std::invalid_argument("mu must have length p");
  if (!(eps_plus >= 0.0 && eps_plus < 1.0 && eps_minus >= 0.0 && eps_minus < 1.0)) {
    throw std::invalid_argument("flip probabilities must lie in [0, 1)");
  }
  if (!(eps_plus + eps_minus < 1.0)) throw std::invalid_argument("eps_plus + eps_minus must be < 1");
  const Eigen::Index n1 = class1_count();
  if (n1 == 0 || n1 == n) {
    throw std::invalid_argument("class sizes round to an empty class (n1 = " + std::to_string(n1) + ")");
  }
  if (cov1.has_value() != cov2.has_value()) {
    throw std::invalid_argument("general covariance needs both C1 and C2");
  }
  if (cov1) {
    check_covariance(*cov1, p, "C1");
    check_covariance(*cov2, p, "C2");
  }
}

std::pair<Eigen::Index, Eigen::Index> LabeledDataset::class_counts() const {
  const Eigen::VectorXd& y = reference_labels();
  const auto n1 = static_cast<Eigen::Index>((y.array() < 0.0).count());
  return {n1, y.size() - n1};
}

void LabeledDataset::validate() const {
  if (y_noisy.size() != X.cols()) throw std::invalid_argument("label count does not match column count");
  if (y_clean && y_clean->size() != X.cols()) {
    throw std::invalid_argument("clean label count does not match column count");
  }
  check_labels(y_noisy, "y_noisy");
  if (y_clean) check_labels(*y_clean, "y_clean");
}

LabeledDataset generate_gmm(const GmmSpec& spec) {
  spec.validate();
  const Eigen::Index n1 = spec.class1_count();

  std::optional<Eigen::MatrixXd> root1, root2;
  if (spec.is_general()) {
    root1 = symmetric_sqrt(*spec.cov1, "C1");
    root2 = symmetric_sqrt(*spec.cov2, "C2");
  }

  LabeledDataset ds;
  ds.X.resize(spec.p, spec.n);
  Eigen::VectorXd y(spec.n);
  Eigen::VectorXd z(spec.p);
  for (Eigen::Index j = 0; j < spec.n; ++j) {
    Rng rng(substream_seed(spec.seed, stream::features, static_cast<std::uint64_t>(j)));
    for (Eigen::Index r = 0; r < spec.p; ++r) z[r] = rng.normal();
    const bool first = j < n1;
    y[j] = first ? -1.0 : 1.0;
    if (root1) z = (first ? *root1 : *root2) * z;
    ds.X.col(j) = y[j] * spec.mu + z;
  }
  ds.y_clean = y;
  ds.y_noisy = y;
  return ds;
}

LabeledDataset flip_labels(const LabeledDataset& ds, double eps_plus, double eps_minus,
                           std::uint64_t seed) {
  if (!ds.y_clean) throw std::invalid_argument("cannot flip without ground truth");
  if (!(eps_plus >= 0.0 && eps_minus >= 0.0 && eps_plus + eps_minus < 1.0)) {
    throw std::invalid_argument("flip probabilities must be >= 0 with eps_plus + eps_minus < 1");
  }
  LabeledDataset out = ds;
  const Eigen::VectorXd& y = *ds.y_clean;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Rng rng(substream_seed(seed, stream::flips, static_cast<std::uint64_t>(i)));
    const double u = rng.uniform();
    const double eps = y[i] > 0.0 ? eps_plus : eps_minus;
    out.y_noisy[i] = u < eps ? -y[i] : y[i];
  }
  return out;
}

LabeledDataset generate_noisy_gmm(const GmmSpec& spec) {
  return flip_labels(generate_gmm(spec), spec.eps_plus, spec.eps_minus, splitmix64(spec.seed));
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_double(const std::string& field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

} // namespace

LabeledDataset load_features_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());

  std::string line;
  std::size_t label_index = 0;
  std::size_t line_no = 0;
  if (options.has_header) {
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
    ++line_no;
    const auto header = split_fields(line);
    if (const auto* name = std::get_if<std::string>(&options.label_column)) {
      auto it = std::find(header.begin(), header.end(), *name);
      if (it == header.end()) throw ConfigError(path.string() + ": no column named '" + *name + "'");
      label_index = static_cast<std::size_t>(it - header.begin());
    } else {
      label_index = std::get<std::size_t>(options.label_column);
    }
  } else {
    if (std::holds_alternative<std::string>(options.label_column)) {
      throw ConfigError("a named label column requires a header row");
    }
    label_index = std::get<std::size_t>(options.label_column);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t width = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (row == 1) {
      width = fields.size();
      if (width < 2) throw ConfigError(path.string() + ": row 1 needs a label and at least one feature");
      if (label_index >= width) {
        throw ConfigError(path.string() + ": label column " + std::to_string(label_index) +
                          " out of range for " + std::to_string(width) + " fields");
      }
    } else if (fields.size() != width) {
      throw ConfigError(path.string() + ": row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    }
    std::vector<double> features;
    features.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw ConfigError(path.string() + ": row " + std::to_string(row) + " column " +
                          std::to_string(c) + " is not numeric ('" + fields[c] + "')");
      }
      if (c == label_index) {
        if (v == 0.0) v = -1.0;
        if (v != 1.0 && v != -1.0) {
          throw ConfigError(path.string() + ": row " + std::to_string(row) +
                            " has label '" + fields[c] + "', expected -1/+1 or 0/1");
        }
        labels.push_back(v);
      } else {
        features.push_back(v);
      }
    }
    rows.push_back(std::move(features));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": empty file");

  LabeledDataset ds;
  ds.X.resize(static_cast<Eigen::Index>(width - 1), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    ds.X.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(
        rows[j].data(), static_cast<Eigen::Index>(rows[j].size()));
  }
  ds.y_noisy = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  if (options.has_clean_labels) ds.y_clean = ds.y_noisy;
  return ds;
}

StandardizedData standardize_and_estimate(const LabeledDataset& ds) {
  ds.validate();
  if (ds.n() < 2) throw std::invalid_argument("standardization needs at least two samples");

  StandardizedData out;
  out.data = ds;
  Eigen::MatrixXd& X = out.data.X;
  const double n = static_cast<double>(ds.n());

  const Eigen::VectorXd mean = X.rowwise().mean();
  X.colwise() -= mean;
  const Eigen::VectorXd var = X.rowwise().squaredNorm() / n;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    if (var[r] > 0.0) X.row(r) /= std::sqrt(var[r]);
  }

  const Eigen::VectorXd& y = ds.reference_labels();
  out.snr_from_noisy_labels = !ds.y_clean.has_value();
  const auto [n1, n2] = ds.class_counts();
  out.pi1_estimate = static_cast<double>(n1) / n;
  if (n1 == 0 || n2 == 0) {
    out.single_class = true;
    return out;
  }

  Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(X.rows());
  Eigen::VectorXd mean2 = Eigen::VectorXd::Zero(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    (y[j] < 0.0 ? mean1 : mean2) += X.col(j);
  }
  mean1 /= static_cast<double>(n1);
  mean2 /= static_cast<double>(n2);
  X.colwise() -= 0.5 * (mean1 + mean2);
  out.snr_estimate = 0.5 * (mean2 - mean1).norm();
  return out;
}

} // namespace lpc

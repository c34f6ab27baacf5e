#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

namespace lpc {

/// Two-cluster Gaussian mixture: class 1 is centred at -mu, class 2 at +mu.
/// Without explicit covariances both clusters are isotropic.
struct GmmSpec {
  Eigen::Index p = 0;
  Eigen::Index n = 0;
  double pi1 = 0.5;
  Eigen::VectorXd mu;
  std::optional<Eigen::MatrixXd> cov1;
  std::optional<Eigen::MatrixXd> cov2;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  std::uint64_t seed = 0;

  /// Isotropic spec whose mean direction is snr * e_0.
  static GmmSpec isotropic(Eigen::Index p, Eigen::Index n, double pi1, double snr,
                           double eps_plus = 0.0, double eps_minus = 0.0,
                           std::uint64_t seed = 0);

  bool is_general() const { return cov1.has_value(); }
  /// n1 = round(pi1 * n)
  Eigen::Index class1_count() const;
  void validate() const;
};

/// Features are stored column-wise (p x n). Labels follow y = -1 for class 1
/// and y = +1 for class 2.
struct LabeledDataset {
  Eigen::MatrixXd X;
  std::optional<Eigen::VectorXd> y_clean;
  Eigen::VectorXd y_noisy;

  Eigen::Index n() const { return X.cols(); }
  Eigen::Index p() const { return X.rows(); }

  /// Ground-truth labels when known, otherwise the observed ones.
  const Eigen::VectorXd& reference_labels() const { return y_clean ? *y_clean : y_noisy; }

  /// (n1, n2) counted on the reference labels.
  std::pair<Eigen::Index, Eigen::Index> class_counts() const;
  void validate() const;
};

LabeledDataset generate_gmm(const GmmSpec& spec);

/// Flip +1 labels with probability eps_plus and -1 labels with probability
/// eps_minus. X and y_clean are left untouched.
LabeledDataset flip_labels(const LabeledDataset& ds, double eps_plus, double eps_minus,
                           std::uint64_t seed);

/// generate_gmm followed by flip_labels with the GmmSpec noise rates.
LabeledDataset generate_noisy_gmm(const GmmSpec& spec);

struct CsvOptions {
  /// Either a zero-based column index or a header name (requires has_header).
  std::variant<std::size_t, std::string> label_column = std::size_t{0};
  bool has_header = false;
  /// When set the labels are stored as ground truth (y_clean = y_noisy).
  bool has_clean_labels = true;
};

LabeledDataset load_features_csv(const std::filesystem::path& path, const CsvOptions& options);

struct StandardizedData {
  LabeledDataset data;
  double snr_estimate = 0.0;
  double pi1_estimate = 0.0;
  /// Only one class present; centering and snr are meaningless.
  bool single_class = false;
  /// The estimate came from noisy labels and is biased towards zero.
  bool snr_from_noisy_labels = false;
};

/// Scale every feature to zero mean and unit variance, then shift so the two
/// class means become -mu_hat and +mu_hat.
StandardizedData standardize_and_estimate(const LabeledDataset& ds);

} // namespace lpc

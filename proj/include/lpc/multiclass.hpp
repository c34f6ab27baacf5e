#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace lpc {

/// k-cluster Gaussian mixture with isotropic noise and a label flip matrix
/// eps(a, b) = P(observed a | true b), a != b. The diagonal is implied.
struct MultiGmmSpec {
  int k = 2;
  Eigen::Index p = 0;
  Eigen::Index n = 0;
  /// p x k, column a is the mean of class a + 1.
  Eigen::MatrixXd means;
  Eigen::VectorXd pi;
  Eigen::MatrixXd eps;
  std::uint64_t seed = 0;

  /// Class sizes round(pi_a n); the last class takes the remainder.
  std::vector<Eigen::Index> class_counts() const;
  void validate() const;
};

/// Class labels are 1..k.
struct MultiDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXi y_clean;
  Eigen::VectorXi y_noisy;
};

MultiDataset generate_multi_gmm(const MultiGmmSpec& spec);

struct AlphaBeta {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;

  /// alpha = 1, beta = 0: plain one-hot targets.
  static AlphaBeta naive(int k);
  int k() const { return static_cast<int>(alpha.size()); }
  void validate() const;
};

/// tau * best + (1 - tau) * worst
AlphaBeta interpolate(const AlphaBeta& worst, const AlphaBeta& best, double tau);

/// n x k; entry (i, j) is alpha_j when y_i = j and beta_j otherwise.
Eigen::MatrixXd build_label_matrix(const Eigen::VectorXi& y_noisy, int k, const AlphaBeta& ab);

/// Solves (X X^T / n + gamma I) W = X Y / n for all k columns at once.
Eigen::MatrixXd train_multi_lpc(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double gamma);

/// Argmax of W^T x with ties going to the smallest class index.
Eigen::VectorXi multi_predict(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X_test);
double multi_accuracy(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X_test, const Eigen::VectorXi& y_test);

/// One Monte Carlo replicate reduced to what every (alpha, beta) needs:
/// with A = Q X U / n (U the noisy one-hot matrix) and b = Q X 1 / n, the
/// weights are W = A diag(alpha - beta) + b beta^T. Test scores follow from
/// A^T X_test and b^T X_test.
class MultiReplicate {
public:
  MultiReplicate(const MultiDataset& train, int k, const Eigen::MatrixXd& X_test, Eigen::VectorXi y_test,
                 double gamma);

  double accuracy(const AlphaBeta& ab) const;

private:
  Eigen::MatrixXd a_scores_; // k x n_test
  Eigen::RowVectorXd b_scores_;
  Eigen::VectorXi y_test_;
};

struct SearchOptions {
  int candidates = 5000;
  double box_low = -2.0;
  double box_high = 2.0;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double gamma = 1.0;
  /// Held-out points per replicate; 0 means the training size.
  Eigen::Index n_test = 0;
  std::vector<double> taus{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  /// Extra candidates evaluated alongside the random ones.
  std::vector<AlphaBeta> injected;
  int threads = 1;
};

struct TauPoint {
  double tau = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> per_seed;
};

struct SearchResult {
  AlphaBeta best;
  AlphaBeta worst;
  double best_accuracy = 0.0;
  double worst_accuracy = 0.0;
  std::vector<double> naive_per_seed;
  double naive_accuracy = 0.0;
  std::vector<TauPoint> path;
};

/// Builds one replicate per seed from spec (training data reseeded, test set
/// drawn noise-free from its own substream).
std::vector<MultiReplicate> make_replicates(const MultiGmmSpec& spec, const SearchOptions& options);

SearchResult search_alpha_beta(const MultiGmmSpec& spec, const SearchOptions& options);

/// Columns tau, mean, std, seed_<s>... one row per tau.
void write_tau_csv(std::ostream& out, const SearchResult& result, const std::vector<std::uint64_t>& seeds);

} // namespace lpc

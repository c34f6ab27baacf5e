#include "lpc/multiclass.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lpc/lpc_core.hpp"
#include "lpc/parallel.hpp"
#include "lpc/random.hpp"

namespace lpc {

std::vector<Eigen::Index> MultiGmmSpec::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k));
  Eigen::Index used = 0;
  for (int a = 0; a + 1 < k; ++a) {
    counts[a] = static_cast<Eigen::Index>(std::llround(pi[a] * static_cast<double>(n)));
    used += counts[a];
  }
  counts[k - 1] = n - used;
  return counts;
}

void MultiGmmSpec::validate() const {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (p < 1) throw std::invalid_argument("p must be at least 1");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (means.rows() != p || means.cols() != k) throw std::invalid_argument("means must be p x k");
  if (!means.allFinite()) throw std::invalid_argument("means contain non-finite values");
  if (pi.size() != k) throw std::invalid_argument("pi must have k entries");
  if ((pi.array() <= 0.0).any()) throw std::invalid_argument("class proportions must be positive");
  if (std::abs(pi.sum() - 1.0) > 1e-12) throw std::invalid_argument("class proportions must sum to 1");
  if (eps.rows() != k || eps.cols() != k) throw std::invalid_argument("eps must be k x k");
  for (int b = 0; b < k; ++b) {
    double mass = 0.0;
    for (int a = 0; a < k; ++a) {
      if (a == b) continue;
      if (!(eps(a, b) >= 0.0)) throw std::invalid_argument("flip probabilities must be >= 0");
      mass += eps(a, b);
    }
    if (!(mass < 1.0))
      throw std::invalid_argument("flip mass of true class " + std::to_string(b + 1) + " must be < 1");
  }
  for (auto c : class_counts())
    if (c < 1) throw std::invalid_argument("class sizes round to an empty class");
}

MultiDataset generate_multi_gmm(const MultiGmmSpec& spec) {
  spec.validate();
  const auto counts = spec.class_counts();
  MultiDataset ds;
  ds.X.resize(spec.p, spec.n);
  ds.y_clean.resize(spec.n);
  ds.y_noisy.resize(spec.n);
  const std::uint64_t flip_seed = splitmix64(spec.seed);
  Eigen::Index j = 0;
  for (int b = 0; b < spec.k; ++b) {
    for (Eigen::Index c = 0; c < counts[b]; ++c, ++j) {
      Rng rng(substream_seed(spec.seed, stream::features, static_cast<std::uint64_t>(j)));
      for (Eigen::Index r = 0; r < spec.p; ++r) ds.X(r, j) = rng.normal();
      ds.X.col(j) += spec.means.col(b);
      ds.y_clean[j] = b + 1;

      Rng flip(substream_seed(flip_seed, stream::flips, static_cast<std::uint64_t>(j)));
      const double u = flip.uniform();
      int observed = b;
      double cumulative = 0.0;
      for (int a = 0; a < spec.k; ++a) {
        if (a == b) continue;
        cumulative += spec.eps(a, b);
        if (u < cumulative) {
          observed = a;
          break;
        }
      }
      ds.y_noisy[j] = observed + 1;
    }
  }
  return ds;
}

AlphaBeta AlphaBeta::naive(int k) { return {Eigen::VectorXd::Ones(k), Eigen::VectorXd::Zero(k)}; }

void AlphaBeta::validate() const {
  if (alpha.size() < 1 || alpha.size() != beta.size())
    throw std::invalid_argument("alpha and beta must have the same positive length");
  if (!alpha.allFinite() || !beta.allFinite()) throw std::invalid_argument("alpha/beta must be finite");
}

AlphaBeta interpolate(const AlphaBeta& worst, const AlphaBeta& best, double tau) {
  return {tau * best.alpha + (1.0 - tau) * worst.alpha, tau * best.beta + (1.0 - tau) * worst.beta};
}

Eigen::MatrixXd build_label_matrix(const Eigen::VectorXi& y_noisy, int k, const AlphaBeta& ab) {
  ab.validate();
  if (ab.k() != k) throw std::invalid_argument("alpha/beta length must equal k");
  Eigen::MatrixXd Y = ab.beta.transpose().replicate(y_noisy.size(), 1);
  for (Eigen::Index i = 0; i < y_noisy.size(); ++i) {
    const int label = y_noisy[i];
    if (label < 1 || label > k)
      throw std::invalid_argument("label " + std::to_string(label) + " at row " + std::to_string(i) +
                                  " is outside 1.." + std::to_string(k));
    Y(i, label - 1) = ab.alpha[label - 1];
  }
  return Y;
}

Eigen::MatrixXd train_multi_lpc(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double gamma) {
  const RidgeSystem<double> system(X, gamma);
  return system.solve(Y);
}

Eigen::VectorXi multi_predict(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X_test) {
  if (W.rows() != X_test.rows()) throw std::invalid_argument("W and X_test disagree on p");
  const Eigen::MatrixXd scores = W.transpose() * X_test;
  Eigen::VectorXi out(scores.cols());
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    Eigen::Index arg = 0;
    scores.col(j).maxCoeff(&arg); // first maximum wins
    out[j] = static_cast<int>(arg) + 1;
  }
  return out;
}

double multi_accuracy(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X_test, const Eigen::VectorXi& y_test) {
  if (y_test.size() != X_test.cols()) throw std::invalid_argument("label count does not match X_test");
  if (y_test.size() == 0) throw std::invalid_argument("empty test set");
  return static_cast<double>((multi_predict(W, X_test).array() == y_test.array()).count()) /
         static_cast<double>(y_test.size());
}

MultiReplicate::MultiReplicate(const MultiDataset& train, int k, const Eigen::MatrixXd& X_test,
                               Eigen::VectorXi y_test, double gamma)
    : y_test_(std::move(y_test)) {
  if (y_test_.size() != X_test.cols() || y_test_.size() == 0) throw std::invalid_argument("bad test set");
  Eigen::MatrixXd rhs(train.X.cols(), k + 1);
  rhs.leftCols(k) = build_label_matrix(train.y_noisy, k, AlphaBeta::naive(k));
  rhs.col(k).setOnes();
  const Eigen::MatrixXd sol = train_multi_lpc(train.X, rhs, gamma);
  a_scores_ = sol.leftCols(k).transpose() * X_test;
  b_scores_ = sol.col(k).transpose() * X_test;
}

double MultiReplicate::accuracy(const AlphaBeta& ab) const {
  const Eigen::Index k = a_scores_.rows();
  if (ab.alpha.size() != k) throw std::invalid_argument("alpha/beta length must equal k");
  const Eigen::VectorXd slope = ab.alpha - ab.beta;
  Eigen::Index hits = 0;
  for (Eigen::Index j = 0; j < a_scores_.cols(); ++j) {
    Eigen::Index arg = 0;
    double top = slope[0] * a_scores_(0, j) + ab.beta[0] * b_scores_[j];
    for (Eigen::Index c = 1; c < k; ++c) {
      const double s = slope[c] * a_scores_(c, j) + ab.beta[c] * b_scores_[j];
      if (s > top) {
        top = s;
        arg = c;
      }
    }
    if (arg + 1 == y_test_[j]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(a_scores_.cols());
}

std::vector<MultiReplicate> make_replicates(const MultiGmmSpec& spec, const SearchOptions& options) {
  if (options.seeds.empty()) throw std::invalid_argument("at least one evaluation seed is required");
  std::vector<MultiReplicate> reps;
  reps.reserve(options.seeds.size());
  for (auto seed : options.seeds) {
    MultiGmmSpec train_spec = spec;
    train_spec.seed = seed;
    MultiGmmSpec test_spec = spec;
    test_spec.seed = substream_seed(seed, stream::test, 0);
    if (options.n_test > 0) test_spec.n = options.n_test;
    const MultiDataset train = generate_multi_gmm(train_spec);
    const MultiDataset test = generate_multi_gmm(test_spec);
    reps.emplace_back(train, spec.k, test.X, test.y_clean, options.gamma);
  }
  return reps;
}

namespace {

std::vector<double> per_seed(const std::vector<MultiReplicate>& reps, const AlphaBeta& ab) {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(r.accuracy(ab));
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

SearchResult search_alpha_beta(const MultiGmmSpec& spec, const SearchOptions& options) {
  spec.validate();
  if (options.candidates < 1) throw std::invalid_argument("candidate count must be at least 1");
  if (!(options.box_low < options.box_high)) throw std::invalid_argument("empty sampling box");
  const auto reps = make_replicates(spec, options);

  std::vector<AlphaBeta> cands;
  cands.reserve(static_cast<std::size_t>(options.candidates) + options.injected.size());
  Rng rng(substream_seed(spec.seed, stream::candidates, 0));
  std::uniform_real_distribution<double> box(options.box_low, options.box_high);
  for (int c = 0; c < options.candidates; ++c) {
    AlphaBeta ab{Eigen::VectorXd(spec.k), Eigen::VectorXd(spec.k)};
    for (int a = 0; a < spec.k; ++a) ab.alpha[a] = box(rng.engine());
    for (int a = 0; a < spec.k; ++a) ab.beta[a] = box(rng.engine());
    cands.push_back(std::move(ab));
  }
  for (const auto& ab : options.injected) {
    ab.validate();
    if (ab.k() != spec.k) throw std::invalid_argument("injected candidate has the wrong length");
    cands.push_back(ab);
  }

  std::vector<double> scores(cands.size());
  parallel_for(cands.size(), options.threads, [&](std::size_t i) { scores[i] = mean(per_seed(reps, cands[i])); });

  std::size_t best = 0, worst = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
    if (scores[i] < scores[worst]) worst = i;
  }

  SearchResult out;
  out.best = cands[best];
  out.worst = cands[worst];
  out.best_accuracy = scores[best];
  out.worst_accuracy = scores[worst];
  out.naive_per_seed = per_seed(reps, AlphaBeta::naive(spec.k));
  out.naive_accuracy = mean(out.naive_per_seed);
  for (double tau : options.taus) {
    TauPoint pt;
    pt.tau = tau;
    pt.per_seed = per_seed(reps, interpolate(out.worst, out.best, tau));
    pt.mean = mean(pt.per_seed);
    pt.std = stddev(pt.per_seed);
    out.path.push_back(std::move(pt));
  }
  return out;
}

void write_tau_csv(std::ostream& out, const SearchResult& result, const std::vector<std::uint64_t>& seeds) {
  out << "tau,mean,std";
  for (auto s : seeds) out << ",seed_" << s;
  out << '\n';
  for (const auto& pt : result.path) {
    out << pt.tau << ',' << pt.mean << ',' << pt.std;
    for (double a : pt.per_seed) out << ',' << a;
    out << '\n';
  }
}

} // namespace lpc

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpc/datasets.hpp"
#include "lpc/errors.hpp"
#include "lpc/rho.hpp"

namespace lpc {

enum class LossKind { squared, bce };

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A trained linear scorer s(x) = w^T x together with how it was obtained.
template <typename Scalar>
struct Classifier {
  Vec<Scalar> w;
  Scalar gamma = 0;
  RhoParams rho;
  LossKind loss = LossKind::squared;
  Eigen::Index n_train = 0;

  Eigen::Index p() const { return w.size(); }
  Scalar orientation() const { return static_cast<Scalar>(rho.orientation()); }
};

/// Relative tolerance on the normal-equation residual of a ridge solve.
template <typename Scalar>
constexpr Scalar residual_tolerance() {
  return std::max<Scalar>(Scalar(1e-8), Scalar(1e3) * std::numeric_limits<Scalar>::epsilon());
}

/// Per-sample targets D_rho * y: lambda_plus for +1, -lambda_minus for -1.
template <typename Derived>
Vec<typename Derived::Scalar> lpc_targets(const Eigen::MatrixBase<Derived>& y_noisy, const RhoParams& rho) {
  using Scalar = typename Derived::Scalar;
  const auto lp = static_cast<Scalar>(rho.lambda_plus());
  const auto lm = static_cast<Scalar>(rho.lambda_minus());
  return y_noisy.unaryExpr([lp, lm](Scalar y) { return y > Scalar(0) ? lp : -lm; });
}

struct LooDiagnostics {
  /// Indices whose rank-one downdate was ill-conditioned and were retrained.
  std::vector<Eigen::Index> retrained;
};

/// The system (X X^T / n + gamma I) w = X t / n for a fixed feature matrix.
/// One Cholesky factorization serves every right-hand side and every
/// leave-one-out query.
template <typename Scalar>
class RidgeSystem {
public:
  template <typename Derived>
  RidgeSystem(const Eigen::MatrixBase<Derived>& X, Scalar gamma) : X_(X), gamma_(gamma) {
    if (!(gamma > Scalar(0))) throw std::invalid_argument("gamma must be > 0");
    if (X_.cols() < 1) throw std::invalid_argument("empty training set");
    if (!X_.allFinite()) throw std::invalid_argument("features contain non-finite values");
    const Scalar n = static_cast<Scalar>(X_.cols());
    gram_ = Mat<Scalar>::Identity(X_.rows(), X_.rows()) * gamma;
    gram_.template selfadjointView<Eigen::Lower>().rankUpdate(X_, Scalar(1) / n);
    gram_.template triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
    llt_.compute(gram_);
    if (llt_.info() != Eigen::Success) throw NumericError("ridge system is not positive definite");
  }

  const Mat<Scalar>& X() const { return X_; }
  Scalar gamma() const { return gamma_; }
  Eigen::Index n() const { return X_.cols(); }
  Eigen::Index p() const { return X_.rows(); }

  /// Right-hand side X t / n for a target vector or a block of targets.
  template <typename Derived>
  Mat<Scalar> rhs(const Eigen::MatrixBase<Derived>& targets) const {
    check_targets(targets.rows());
    return X_ * targets / static_cast<Scalar>(n());
  }

  /// Solves for every column of `targets` at once.
  template <typename Derived>
  Mat<Scalar> solve(const Eigen::MatrixBase<Derived>& targets) const {
    const Mat<Scalar> b = rhs(targets);
    Mat<Scalar> w = llt_.solve(b);
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      const Scalar r = (gram_ * w.col(k) - b.col(k)).norm();
      // Relative to the size of the system, so huge gamma does not trip on roundoff.
      const Scalar scale = std::max(Scalar(1), gram_.diagonal().maxCoeff()) * w.col(k).norm() +
                           std::numeric_limits<Scalar>::epsilon() * b.col(k).norm();
      if (!(r <= residual_tolerance<Scalar>() * scale)) {
        std::ostringstream msg;
        msg << "ridge solve residual " << r << " exceeds tolerance (|w| = " << w.col(k).norm() << ")";
        throw NumericError(msg.str());
      }
    }
    return w;
  }

  template <typename Derived>
  Scalar normal_equation_residual(const Eigen::MatrixBase<Derived>& w, const Vec<Scalar>& targets) const {
    return (gram_ * w - rhs(targets)).norm();
  }

  /// Diagonal of the hat matrix, x_i^T Q x_i / n.
  Vec<Scalar> leverages() const {
    const Mat<Scalar> v = llt_.matrixL().solve(X_);
    return v.colwise().squaredNorm().transpose() / static_cast<Scalar>(n());
  }

  /// x_i^T w^{-i}, where w^{-i} solves the same system with sample i removed
  /// and the 1/n normalization kept. Via Sherman-Morrison this is
  /// (x_i^T w - H_ii t_i) / (1 - H_ii).
  Vec<Scalar> loo_decisions(const Vec<Scalar>& targets, LooDiagnostics* diagnostics = nullptr) const {
    if (n() < 2) throw std::invalid_argument("leave-one-out needs at least two samples");
    const Vec<Scalar> w = solve(targets);
    const Vec<Scalar> scores = X_.transpose() * w;
    const Vec<Scalar> h = leverages();
    Vec<Scalar> out(n());
    for (Eigen::Index i = 0; i < n(); ++i) {
      const Scalar denom = Scalar(1) - h[i];
      if (std::abs(denom) < Scalar(1e-10)) {
        out[i] = retrain_without(i, targets);
        if (diagnostics) diagnostics->retrained.push_back(i);
      } else {
        out[i] = (scores[i] - h[i] * targets[i]) / denom;
      }
    }
    return out;
  }

  /// Direct solve with sample i removed; the reference the downdate must match.
  Scalar retrain_without(Eigen::Index i, const Vec<Scalar>& targets) const {
    const Scalar n_s = static_cast<Scalar>(n());
    Mat<Scalar> a = gram_ - X_.col(i) * X_.col(i).transpose() / n_s;
    Vec<Scalar> b = (X_ * targets - X_.col(i) * targets[i]) / n_s;
    const Vec<Scalar> w = a.ldlt().solve(b);
    return X_.col(i).dot(w);
  }

private:
  void check_targets(Eigen::Index rows) const {
    if (rows != n()) {
      throw std::invalid_argument("expected " + std::to_string(n()) + " targets, got " + std::to_string(rows));
    }
  }

  Mat<Scalar> X_;
  Scalar gamma_;
  Mat<Scalar> gram_;
  Eigen::LLT<Mat<Scalar>> llt_;
};

template <typename DerivedX>
RidgeSystem(const Eigen::MatrixBase<DerivedX>&, typename DerivedX::Scalar)
    -> RidgeSystem<typename DerivedX::Scalar>;

template <typename Scalar>
Classifier<Scalar> train_lpc(const RidgeSystem<Scalar>& system, const Vec<Scalar>& y_noisy,
                             const RhoParams& rho) {
  Classifier<Scalar> c;
  c.w = system.solve(lpc_targets(y_noisy, rho));
  c.gamma = system.gamma();
  c.rho = rho;
  c.loss = LossKind::squared;
  c.n_train = system.n();
  return c;
}

/// w solving (X X^T / n + gamma I) w = X D_rho y / n.
template <typename DerivedX, typename DerivedY>
Classifier<typename DerivedX::Scalar> train_lpc(const Eigen::MatrixBase<DerivedX>& X,
                                                const Eigen::MatrixBase<DerivedY>& y_noisy,
                                                const RhoParams& rho, typename DerivedX::Scalar gamma) {
  using Scalar = typename DerivedX::Scalar;
  return train_lpc(RidgeSystem<Scalar>(X, gamma), Vec<Scalar>(y_noisy), rho);
}

inline Classifier<double> train_lpc(const LabeledDataset& ds, const RhoParams& rho, double gamma) {
  ds.validate();
  return train_lpc(ds.X, ds.y_noisy, rho, gamma);
}

/// Raw scores w^T x_j, one per column. For the BCE variant these are logits.
template <typename Scalar, typename Derived>
Vec<Scalar> decision(const Classifier<Scalar>& c, const Eigen::MatrixBase<Derived>& X_test) {
  if (X_test.rows() != c.p()) {
    throw std::invalid_argument("test features have p = " + std::to_string(X_test.rows()) +
                                ", classifier expects p = " + std::to_string(c.p()));
  }
  return X_test.transpose() * c.w;
}

struct Evaluation {
  double accuracy = 0.0;
  double risk = 0.0;
};

/// Accuracy thresholds orientation * w^T x at zero (a zero score predicts +1);
/// risk is the mean of (w^T x - y)^2 on the raw scores.
template <typename Scalar, typename DerivedX, typename DerivedY>
Evaluation evaluate(const Classifier<Scalar>& c, const Eigen::MatrixBase<DerivedX>& X_test,
                    const Eigen::MatrixBase<DerivedY>& y_test) {
  if (y_test.size() == 0) throw std::invalid_argument("empty test set");
  if (y_test.size() != X_test.cols()) throw std::invalid_argument("test label count does not match columns");
  const Vec<Scalar> s = decision(c, X_test);
  const Scalar o = c.orientation();
  Eigen::Index hits = 0;
  double sq = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const Scalar y = y_test[j];
    if (y != Scalar(1) && y != Scalar(-1)) throw std::invalid_argument("test labels must be in {-1, +1}");
    const Scalar predicted = o * s[j] >= Scalar(0) ? Scalar(1) : Scalar(-1);
    if (predicted == y) ++hits;
    const double d = static_cast<double>(s[j] - y);
    sq += d * d;
  }
  const auto m = static_cast<double>(s.size());
  return {static_cast<double>(hits) / m, sq / m};
}

inline Vec<double> loo_decisions(const LabeledDataset& ds, const RhoParams& rho, double gamma,
                                 LooDiagnostics* diagnostics = nullptr) {
  ds.validate();
  const RidgeSystem<double> system(ds.X, gamma);
  return system.loo_decisions(lpc_targets(ds.y_noisy, rho), diagnostics);
}

// ---------------------------------------------------------------------------
// Binary cross-entropy variant, trained by full-batch gradient descent.

struct BceOptions {
  double gamma = 0.01;
  double learning_rate = 0.1;
  int iterations = 1000;
};

/// Gradient descent produced a non-finite objective. Carries the last finite iterate.
class DivergenceError : public NumericError {
public:
  DivergenceError(int step, Eigen::VectorXd last_finite)
      : NumericError("BCE objective became non-finite at step " + std::to_string(step)),
        step_(step), last_finite_(std::move(last_finite)) {}
  int step() const { return step_; }
  const Eigen::VectorXd& last_finite() const { return last_finite_; }

private:
  int step_;
  Eigen::VectorXd last_finite_;
};

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar z) {
  return z > Scalar(0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// With y in {0, 1} mapped from {-1, +1}: bce(z, y) = softplus(z) - y z.
// Perturbed loss: beta * ((1 - rho_{-y}) bce(z, y) - rho_y bce(z, 1 - y)).
template <typename Scalar>
struct PerturbedBce {
  Scalar beta, rho_plus, rho_minus;

  Scalar loss(Scalar z, Scalar label) const {
    const bool pos = label > Scalar(0);
    const Scalar rho_y = pos ? rho_plus : rho_minus;
    const Scalar rho_not_y = pos ? rho_minus : rho_plus;
    const Scalar y01 = pos ? Scalar(1) : Scalar(0);
    const Scalar sp = softplus(z);
    return beta * ((Scalar(1) - rho_not_y) * (sp - y01 * z) - rho_y * (sp - (Scalar(1) - y01) * z));
  }

  Scalar derivative(Scalar z, Scalar label) const {
    const bool pos = label > Scalar(0);
    const Scalar rho_y = pos ? rho_plus : rho_minus;
    const Scalar rho_not_y = pos ? rho_minus : rho_plus;
    const Scalar y01 = pos ? Scalar(1) : Scalar(0);
    const Scalar s = sigmoid(z);
    return beta * ((Scalar(1) - rho_not_y) * (s - y01) - rho_y * (s - (Scalar(1) - y01)));
  }
};

template <typename Scalar>
PerturbedBce<Scalar> make_bce(const RhoParams& rho) {
  return {static_cast<Scalar>(rho.beta()), static_cast<Scalar>(rho.rho_plus()),
          static_cast<Scalar>(rho.rho_minus())};
}

} // namespace detail

/// (1/n) sum_i perturbed_bce(w^T x_i, y_i) + gamma |w|^2
template <typename DerivedX, typename DerivedY, typename DerivedW>
typename DerivedX::Scalar bce_objective(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                                        const RhoParams& rho, typename DerivedX::Scalar gamma,
                                        const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedX::Scalar;
  const auto f = detail::make_bce<Scalar>(rho);
  const Vec<Scalar> z = X.transpose() * w;
  Scalar total = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += f.loss(z[i], y[i]);
  return total / static_cast<Scalar>(z.size()) + gamma * w.squaredNorm();
}

template <typename DerivedX, typename DerivedY, typename DerivedW>
Vec<typename DerivedX::Scalar> bce_gradient(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                                            const RhoParams& rho, typename DerivedX::Scalar gamma,
                                            const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedX::Scalar;
  const auto f = detail::make_bce<Scalar>(rho);
  const Vec<Scalar> z = X.transpose() * w;
  Vec<Scalar> dz(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) dz[i] = f.derivative(z[i], y[i]);
  return X * dz / static_cast<Scalar>(z.size()) + Scalar(2) * gamma * w;
}

/// Gradient descent from w = 0 for exactly options.iterations steps.
template <typename DerivedX, typename DerivedY>
Classifier<typename DerivedX::Scalar> train_lpc_bce(const Eigen::MatrixBase<DerivedX>& X,
                                                    const Eigen::MatrixBase<DerivedY>& y_noisy,
                                                    const RhoParams& rho, const BceOptions& options) {
  using Scalar = typename DerivedX::Scalar;
  if (!(options.gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (options.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (y_noisy.size() != X.cols()) throw std::invalid_argument("label count does not match columns");
  if (!X.allFinite()) throw std::invalid_argument("features contain non-finite values");

  const auto gamma = static_cast<Scalar>(options.gamma);
  const auto lr = static_cast<Scalar>(options.learning_rate);
  const auto f = detail::make_bce<Scalar>(rho);
  const auto n = static_cast<Scalar>(X.cols());
  Vec<Scalar> w = Vec<Scalar>::Zero(X.rows());
  Vec<Scalar> z = Vec<Scalar>::Zero(X.cols());
  Vec<Scalar> dz(X.cols());
  for (int step = 0; step < options.iterations; ++step) {
    for (Eigen::Index i = 0; i < z.size(); ++i) dz[i] = f.derivative(z[i], y_noisy[i]);
    Vec<Scalar> next = w - lr * (X * dz / n + Scalar(2) * gamma * w);
    Vec<Scalar> z_next = X.transpose() * next;
    Scalar loss = 0;
    for (Eigen::Index i = 0; i < z_next.size(); ++i) loss += f.loss(z_next[i], y_noisy[i]);
    if (!next.allFinite() || !std::isfinite(loss)) throw DivergenceError(step, w.template cast<double>());
    w = std::move(next);
    z = std::move(z_next);
  }

  Classifier<Scalar> c;
  c.w = std::move(w);
  c.gamma = gamma;
  c.rho = rho;
  c.loss = LossKind::bce;
  c.n_train = X.cols();
  return c;
}

inline Classifier<double> train_lpc_bce(const LabeledDataset& ds, const RhoParams& rho, const BceOptions& options) {
  ds.validate();
  return train_lpc_bce(ds.X, ds.y_noisy, rho, options);
}

} // namespace lpc

#pragma once

#include <Eigen/Dense>

#include "lpc/rho.hpp"

namespace lpc {

/// Isotropic asymptotic setting: dimension ratio eta = p/n, class-1 share
/// pi1, and ||mu|| as snr.
struct TheoryConfig {
  double eta = 0.0;
  double pi1 = 0.5;
  double snr = 0.0;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  RhoParams rho;
  double gamma = 1.0;

  void validate() const;
};

/// Limit statistics of the decision function w^T x on an independent test
/// point of class a: Gaussian with mean (-1)^a m_rho and second moment nu_rho.
struct TheoryStats {
  double delta = 0.0;
  double h = 0.0;
  double m_rho = 0.0;
  double nu_rho = 0.0;
  double variance = 0.0;
  double kappa = 0.0;
  double m_oracle = 0.0;
  double nu_oracle = 0.0;
  double accuracy = 0.0;
  double risk = 0.0;
  /// Sign of beta; accuracy is computed on orientation * w^T x.
  double orientation = 1.0;
};

/// Non-negative root of gamma d^2 + (1 + gamma - eta) d - eta = 0.
double delta(double eta, double gamma);

/// h = 1 - eta / (1 + gamma (1 + delta))^2
double h_factor(double eta, double gamma, double delta);

TheoryStats theory_stats_isotropic(const TheoryConfig& cfg);

struct Moments {
  double m = 0.0;
  double nu = 0.0;
};

/// (m_rho, nu_rho) without range checks on the flip rates. Both are
/// polynomials in (eps_plus, eps_minus), so finite differences may step
/// outside the simplex.
Moments isotropic_moments(const TheoryConfig& cfg);

struct Prediction {
  double accuracy = 0.0;
  double risk = 0.0;
};

/// accuracy = 1 - phi(orientation * m / sqrt(nu - m^2)), risk = 1 - 2 m + nu.
Prediction predict_accuracy_risk(const TheoryStats& stats);

/// phi(x) = P(N(0, 1) > x)
double gaussian_upper_tail(double x);

/// Maximizer of the predicted accuracy over rho_plus at fixed rho_minus.
/// Depends only on the class share and the flip rates.
double optimal_rho_plus(double pi1, double eps_plus, double eps_minus, double rho_minus = 0.0);

/// The rho_plus at which m_rho vanishes (random guessing). Undefined for pi1 = 1/2.
double worst_rho_plus(double pi1, double eps_plus, double eps_minus, double rho_minus = 0.0);

/// Golden-section search of log10(gamma) over [-3, 3] maximizing the
/// predicted oracle accuracy.
double optimal_gamma(double eta, double snr);

/// Arbitrary class covariances C1, C2 and mean direction mu (class means -mu, +mu).
struct GeneralTheoryConfig {
  Eigen::Index n = 0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov1;
  Eigen::MatrixXd cov2;
  double pi1 = 0.5;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  RhoParams rho;
  double gamma = 1.0;
  /// Class of the test point (1 or 2); the second moment depends on it.
  int test_class = 2;

  void validate() const;
};

struct GeneralDiagnostics {
  double delta1 = 0.0;
  double delta2 = 0.0;
  int iterations = 0;
  double last_change = 0.0;
};

/// Fixed point delta_b = Tr(C_b Qbar_C) / n with
/// Qbar_C = (pi1 C1 / (1 + delta1) + pi2 C2 / (1 + delta2) + gamma I)^{-1},
/// damped by 1/2. Throws NumericError after 10^4 iterations.
GeneralDiagnostics solve_deltas(const GeneralTheoryConfig& cfg);

/// (pi1 Sigma1 / (1 + delta1) + pi2 Sigma2 / (1 + delta2) + gamma I)^{-1} with
/// Sigma_b = mu mu^T + C_b.
Eigen::MatrixXd deterministic_equivalent(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov1,
                                         const Eigen::MatrixXd& cov2, double pi1, double delta1,
                                         double delta2, double gamma);

TheoryStats theory_stats_general(const GeneralTheoryConfig& cfg, GeneralDiagnostics* diagnostics = nullptr);

} // namespace lpc

#include "lpc/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lpc/errors.hpp"

namespace lpc {

namespace {

void check_common(double pi1, double eps_plus, double eps_minus, double gamma) {
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw std::invalid_argument("pi1 must lie in (0, 1)");
  if (!(eps_plus >= 0.0 && eps_plus < 1.0 && eps_minus >= 0.0 && eps_minus < 1.0))
    throw std::invalid_argument("flip probabilities must lie in [0, 1)");
  if (!(eps_plus + eps_minus < 1.0)) throw std::invalid_argument("eps_plus + eps_minus must be < 1");
  if (!(gamma > 0.0 && std::isfinite(gamma))) throw std::invalid_argument("gamma must be positive");
}

constexpr double kMinH = 1e-6;

// Label-dependent coefficients shared by both paths: the mean of the target
// for a sample of true class b is c_b, its second moment d_b.
struct TargetMoments {
  double c1, c2, d1, d2;
};

TargetMoments target_moments(const RhoParams& rho, double eps_plus, double eps_minus) {
  const double b = rho.beta();
  const double lm = rho.lambda_minus();
  const double lp = rho.lambda_plus();
  const double rp = rho.rho_plus();
  const double rm = rho.rho_minus();
  return {lm - 2.0 * b * eps_minus, lp - 2.0 * b * eps_plus,
          4.0 * b * b * eps_minus * (rp - rm) + lm * lm,
          4.0 * b * b * eps_plus * (rm - rp) + lp * lp};
}

} // namespace

void TheoryConfig::validate() const {
  if (!(eta > 0.0 && std::isfinite(eta))) throw std::invalid_argument("eta must be positive");
  if (!(snr >= 0.0 && std::isfinite(snr))) throw std::invalid_argument("snr must be >= 0");
  check_common(pi1, eps_plus, eps_minus, gamma);
}

double delta(double eta, double gamma) {
  const double a = eta - gamma - 1.0;
  return (a + std::sqrt(a * a + 4.0 * eta * gamma)) / (2.0 * gamma);
}

double h_factor(double eta, double gamma, double delta) {
  const double g = 1.0 + gamma * (1.0 + delta);
  return 1.0 - eta / (g * g);
}

double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

Prediction predict_accuracy_risk(const TheoryStats& s) {
  const double var = s.nu_rho - s.m_rho * s.m_rho;
  if (!(var > 0.0) || !std::isfinite(var))
    throw NumericError("non-positive score variance " + std::to_string(var));
  return {1.0 - gaussian_upper_tail(s.orientation * s.m_rho / std::sqrt(var)),
          1.0 - 2.0 * s.m_rho + s.nu_rho};
}

namespace {

TheoryStats isotropic_unchecked(const TheoryConfig& cfg) {
  const double pi2 = 1.0 - cfg.pi1;
  TheoryStats out;
  out.delta = delta(cfg.eta, cfg.gamma);
  out.h = h_factor(cfg.eta, cfg.gamma, out.delta);
  if (!(out.h > kMinH))
    throw NumericError("h = " + std::to_string(out.h) + " is outside the valid range (eta near 1 with small gamma)");
  const double s = cfg.snr * cfg.snr;
  const double D = s + 1.0 + cfg.gamma * (1.0 + out.delta);
  const auto tm = target_moments(cfg.rho, cfg.eps_plus, cfg.eps_minus);
  const double c = cfg.pi1 * tm.c1 + pi2 * tm.c2;
  const double ratio = (1.0 - out.h) / out.h;

  out.m_oracle = s / D;
  out.kappa = s / (out.h * D) * ((s + 1.0) / D - 2.0 * (1.0 - out.h));
  out.nu_oracle = out.kappa + ratio;
  out.m_rho = c * out.m_oracle;
  out.nu_rho = c * c * out.kappa + ratio * (cfg.pi1 * tm.d1 + pi2 * tm.d2);
  out.variance = out.nu_rho - out.m_rho * out.m_rho;
  out.orientation = cfg.rho.orientation();
  return out;
}

} // namespace

TheoryStats theory_stats_isotropic(const TheoryConfig& cfg) {
  cfg.validate();
  TheoryStats out = isotropic_unchecked(cfg);
  const auto pred = predict_accuracy_risk(out);
  out.accuracy = pred.accuracy;
  out.risk = pred.risk;
  return out;
}

Moments isotropic_moments(const TheoryConfig& cfg) {
  const TheoryStats s = isotropic_unchecked(cfg);
  return {s.m_rho, s.nu_rho};
}

double optimal_rho_plus(double pi1, double eps_plus, double eps_minus, double rho_minus) {
  check_common(pi1, eps_plus, eps_minus, 1.0);
  const double pi2 = 1.0 - pi1;
  return (pi1 * pi1 * eps_minus * (eps_minus - 1.0) + pi2 * pi2 * eps_plus * (1.0 - eps_plus)) /
             (pi1 * pi2 * (1.0 - eps_plus - eps_minus)) +
         rho_minus;
}

double worst_rho_plus(double pi1, double eps_plus, double eps_minus, double rho_minus) {
  check_common(pi1, eps_plus, eps_minus, 1.0);
  if (std::abs(2.0 * pi1 - 1.0) < 1e-12)
    throw std::invalid_argument("worst rho_plus is undefined for balanced classes");
  const double pi2 = 1.0 - pi1;
  return (1.0 - 2.0 * pi1 * eps_minus - 2.0 * pi2 * eps_plus) / (2.0 * pi1 - 1.0) + rho_minus;
}

double optimal_gamma(double eta, double snr) {
  auto score = [&](double log_gamma) {
    TheoryConfig cfg{eta, 0.5, snr, 0.0, 0.0, RhoParams::naive(), std::pow(10.0, log_gamma)};
    try {
      return theory_stats_isotropic(cfg).accuracy;
    } catch (const NumericError&) {
      return 0.0;
    }
  };
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -3.0, b = 3.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = score(x1), f2 = score(x2);
  while (b - a > 1e-6) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = score(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = score(x2);
    }
  }
  return std::pow(10.0, 0.5 * (a + b));
}

// ---------------------------------------------------------------------------
// General covariance

void GeneralTheoryConfig::validate() const {
  const Eigen::Index p = mu.size();
  if (p < 1) throw std::invalid_argument("mu must be non-empty");
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (cov1.rows() != p || cov1.cols() != p) throw std::invalid_argument("C1 must be p x p");
  if (cov2.rows() != p || cov2.cols() != p) throw std::invalid_argument("C2 must be p x p");
  if (!mu.allFinite() || !cov1.allFinite() || !cov2.allFinite())
    throw std::invalid_argument("non-finite entries in mu or covariances");
  if (test_class != 1 && test_class != 2) throw std::invalid_argument("test_class must be 1 or 2");
  check_common(pi1, eps_plus, eps_minus, gamma);
}

namespace {

Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& m, double gamma) {
  Eigen::MatrixXd a = m;
  a.diagonal().array() += gamma;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("resolvent matrix is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

Eigen::MatrixXd bulk_resolvent(const GeneralTheoryConfig& cfg, double d1, double d2) {
  const double pi2 = 1.0 - cfg.pi1;
  return regularized_inverse(cfg.pi1 / (1.0 + d1) * cfg.cov1 + pi2 / (1.0 + d2) * cfg.cov2, cfg.gamma);
}

// Tr(A B) without forming the product.
double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.transpose().array()).sum();
}

} // namespace

GeneralDiagnostics solve_deltas(const GeneralTheoryConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(cfg.n);
  GeneralDiagnostics diag;
  for (int it = 1; it <= 10000; ++it) {
    const Eigen::MatrixXd q = bulk_resolvent(cfg, diag.delta1, diag.delta2);
    const double n1 = trace_product(cfg.cov1, q) / n;
    const double n2 = trace_product(cfg.cov2, q) / n;
    const double next1 = 0.5 * diag.delta1 + 0.5 * n1;
    const double next2 = 0.5 * diag.delta2 + 0.5 * n2;
    diag.last_change = std::max(std::abs(next1 - diag.delta1), std::abs(next2 - diag.delta2));
    diag.delta1 = next1;
    diag.delta2 = next2;
    diag.iterations = it;
    if (!std::isfinite(diag.delta1) || !std::isfinite(diag.delta2))
      throw NumericError("delta fixed point diverged");
    if (diag.last_change < 1e-12) return diag;
  }
  throw NumericError("delta fixed point did not converge in 10000 iterations (last change " +
                     std::to_string(diag.last_change) + ")");
}

Eigen::MatrixXd deterministic_equivalent(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov1,
                                         const Eigen::MatrixXd& cov2, double pi1, double delta1,
                                         double delta2, double gamma) {
  const double pi2 = 1.0 - pi1;
  const double w1 = pi1 / (1.0 + delta1);
  const double w2 = pi2 / (1.0 + delta2);
  Eigen::MatrixXd m = w1 * cov1 + w2 * cov2;
  m.noalias() += (w1 + w2) * mu * mu.transpose();
  return regularized_inverse(m, gamma);
}

TheoryStats theory_stats_general(const GeneralTheoryConfig& cfg, GeneralDiagnostics* diagnostics) {
  const GeneralDiagnostics diag = solve_deltas(cfg);
  if (diagnostics) *diagnostics = diag;
  const double n = static_cast<double>(cfg.n);
  const double pi[2] = {cfg.pi1, 1.0 - cfg.pi1};
  const double dl[2] = {diag.delta1, diag.delta2};
  const Eigen::MatrixXd* cov[2] = {&cfg.cov1, &cfg.cov2};

  const Eigen::MatrixXd qc = bulk_resolvent(cfg, dl[0], dl[1]);
  const Eigen::MatrixXd qbar =
      deterministic_equivalent(cfg.mu, cfg.cov1, cfg.cov2, cfg.pi1, dl[0], dl[1], cfg.gamma);

  // s_ab = Tr(C_b Qc C_a Qc) / n and K_ac = pi_c s_ac / (1 + delta_c)^2.
  const Eigen::MatrixXd p1 = cfg.cov1 * qc;
  const Eigen::MatrixXd p2 = cfg.cov2 * qc;
  const Eigen::MatrixXd* pc[2] = {&p1, &p2};
  Eigen::Matrix2d s, k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s(a, b) = trace_product(*pc[b], *pc[a]) / n;
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) k(a, c) = pi[c] * s(a, c) / ((1.0 + dl[c]) * (1.0 + dl[c]));

  const Eigen::Matrix2d i_minus_k = Eigen::Matrix2d::Identity() - k;
  const auto lu = i_minus_k.fullPivLu();
  if (!lu.isInvertible()) throw NumericError("trace system I - K is singular");
  const Eigen::Matrix2d t = lu.solve(s);

  const Eigen::VectorXd qmu = qbar * cfg.mu;
  const double r = cfg.mu.dot(qmu);
  Eigen::Vector2d g;
  for (int a = 0; a < 2; ++a) g(a) = r * r + qmu.dot(*cov[a] * qmu);
  const Eigen::Vector2d q = lu.solve(g);

  const int a = cfg.test_class - 1;
  const auto tm = target_moments(cfg.rho, cfg.eps_plus, cfg.eps_minus);
  const double c[2] = {tm.c1, tm.c2};
  const double d[2] = {tm.d1, tm.d2};

  double A = 0.0, A0 = 0.0, cross = 0.0, cross0 = 0.0, diagonal = 0.0, diagonal0 = 0.0;
  for (int b = 0; b < 2; ++b) {
    const double w = pi[b] / (1.0 + dl[b]);
    const double w2 = pi[b] * t(a, b) / ((1.0 + dl[b]) * (1.0 + dl[b]));
    A += w * c[b];
    A0 += w;
    cross += c[b] * w2;
    cross0 += w2;
    diagonal += d[b] * w2;
    diagonal0 += w2;
  }

  TheoryStats out;
  out.delta = dl[a];
  out.h = 1.0 - k.row(a).sum();
  if (!(out.h > kMinH)) throw NumericError("h = " + std::to_string(out.h) + " is outside the valid range");
  out.m_rho = A * r;
  out.nu_rho = A * A * q(a) - 2.0 * r * A * cross + diagonal;
  out.m_oracle = A0 * r;
  out.nu_oracle = A0 * A0 * q(a) - 2.0 * r * A0 * cross0 + diagonal0;
  out.kappa = out.nu_oracle - diagonal0;
  out.variance = out.nu_rho - out.m_rho * out.m_rho;
  out.orientation = cfg.rho.orientation();
  const auto pred = predict_accuracy_risk(out);
  out.accuracy = pred.accuracy;
  out.risk = pred.risk;
  return out;
}

} // namespace lpc

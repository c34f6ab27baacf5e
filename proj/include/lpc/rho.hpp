#pragma once

namespace lpc {

/// Label-perturbation pair (rho_plus, rho_minus). A sample with observed label
/// +1 gets target lambda_plus, one with -1 gets -lambda_minus.
class RhoParams {
public:
  RhoParams() = default;
  /// Throws when |1 - rho_plus - rho_minus| <= 1e-8.
  RhoParams(double rho_plus, double rho_minus);

  static RhoParams naive() { return {}; }
  static RhoParams unbiased(double eps_plus, double eps_minus) { return {eps_plus, eps_minus}; }

  double rho_plus() const { return rho_plus_; }
  double rho_minus() const { return rho_minus_; }

  double beta() const { return 1.0 / (1.0 - rho_plus_ - rho_minus_); }
  double lambda_minus() const { return (1.0 - rho_plus_ + rho_minus_) * beta(); }
  double lambda_plus() const { return (1.0 - rho_minus_ + rho_plus_) * beta(); }

  /// Sign of beta. Past the singularity every target changes sign, so the
  /// decision rule multiplies scores by this before thresholding.
  double orientation() const { return beta() < 0.0 ? -1.0 : 1.0; }

  /// Regression target for an observed label in {-1, +1}.
  double target(double label) const { return label > 0.0 ? lambda_plus() : -lambda_minus(); }

  friend bool operator==(const RhoParams&, const RhoParams&) = default;

private:
  double rho_plus_ = 0.0;
  double rho_minus_ = 0.0;
};

} // namespace lpc

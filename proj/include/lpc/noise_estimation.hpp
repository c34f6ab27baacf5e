#pragma once

#include <array>

#include "lpc/datasets.hpp"
#include "lpc/rho.hpp"

namespace lpc {

struct NoiseEstimate {
  double eps_plus_hat = 0.0;
  double eps_minus_hat = 0.0;
  /// Euclidean norm of the moment mismatch at the returned point.
  double residual = 0.0;
  std::array<RhoParams, 2> probes;
  /// The second moments that were matched, one per probe.
  std::array<double, 2> moments{};
  int newton_iterations = 0;
  /// Newton hit a singular Jacobian and the best point seen so far was kept.
  bool newton_stalled = false;
  /// residual exceeded the configured threshold.
  bool residual_warning = false;
};

/// Setting in which the theoretical moments are evaluated.
struct NoiseProblem {
  double eta = 0.0;
  double snr = 0.0;
  double pi1 = 0.5;
  double gamma = 0.1;
  RhoParams probe1{0.0, 0.1};
  RhoParams probe2{0.0, 0.4};
  /// Warning threshold as a fraction of the summed target moments.
  double threshold_factor = 0.05;

  void validate() const;
};

/// (1/n) sum_i (x_i^T w^{-i})^2 using leave-one-out decisions.
double empirical_second_moment(const LabeledDataset& ds, const RhoParams& rho, double gamma);

/// Both probe moments from a single factorization.
std::array<double, 2> empirical_second_moments(const LabeledDataset& ds, const RhoParams& probe1,
                                                const RhoParams& probe2, double gamma);

/// Inverts the map (eps_plus, eps_minus) -> (nu_probe1, nu_probe2) on the
/// simplex {eps >= 0, eps_plus + eps_minus <= 0.99}: a 100 x 100 grid scan
/// followed by clamped Newton steps from the best cell.
NoiseEstimate solve_noise_rates(const std::array<double, 2>& moments, const NoiseProblem& problem);

NoiseEstimate estimate_noise_rates(const LabeledDataset& ds, const RhoParams& probe1, const RhoParams& probe2,
                                   double gamma, double snr, double pi1, double threshold_factor = 0.05);

} // namespace lpc

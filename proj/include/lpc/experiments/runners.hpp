#pragma once

#include <optional>

#include "lpc/experiments/config.hpp"
#include "lpc/experiments/report.hpp"
#include "lpc/theory.hpp"

namespace lpc::experiments {

/// Perturbation used by a variant at the given noise level. Oracle variants
/// train on clean labels with rho = 0.
RhoParams variant_rho(const VariantSpec& v, double pi1, double eps_plus, double eps_minus, double rho_minus);

/// Asymptotic statistics for a binary variant, or nothing when the setting is
/// outside the valid range of the theory.
std::optional<TheoryStats> variant_theory(const VariantSpec& v, double eta, double pi1, double snr, double eps_plus,
                                          double eps_minus, double rho_minus, double gamma);

RunReport run_histogram(const ExperimentConfig& cfg);
/// Handles sweep-eps, sweep-rho and sweep-gamma.
RunReport run_sweep(const ExperimentConfig& cfg);
RunReport run_noise_estimation(const ExperimentConfig& cfg);
RunReport run_multiclass(const ExperimentConfig& cfg);
RunReport run_real_data(const ExperimentConfig& cfg);
RunReport run_theory(const ExperimentConfig& cfg);

RunReport run_experiment(const ExperimentConfig& cfg);

} // namespace lpc::experiments

#include "lpc/noise_estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lpc/errors.hpp"
#include "lpc/lpc_core.hpp"
#include "lpc/theory.hpp"

namespace lpc {

namespace {

constexpr double kSimplexCap = 0.99;
constexpr int kGrid = 100;
constexpr double kFdStep = 1e-6;
constexpr int kMaxNewton = 60;

Eigen::Vector2d forward(const NoiseProblem& pb, const Eigen::Vector2d& e) {
  Eigen::Vector2d out;
  const RhoParams* probes[2] = {&pb.probe1, &pb.probe2};
  for (int k = 0; k < 2; ++k) {
    const TheoryConfig cfg{pb.eta, pb.pi1, pb.snr, e[0], e[1], *probes[k], pb.gamma};
    out[k] = isotropic_moments(cfg).nu;
  }
  return out;
}

Eigen::Vector2d project(Eigen::Vector2d e) {
  e = e.cwiseMax(0.0);
  const double excess = e.sum() - kSimplexCap;
  if (excess > 0.0) {
    e.array() -= 0.5 * excess;
    if (e[0] < 0.0) e = {0.0, kSimplexCap};
    if (e[1] < 0.0) e = {kSimplexCap, 0.0};
  }
  return e;
}

} // namespace

void NoiseProblem::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw std::invalid_argument("pi1 must lie in (0, 1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (probe1 == probe2) throw std::invalid_argument("noise-rate probes must be distinct");
  if (!(threshold_factor > 0.0)) throw std::invalid_argument("threshold factor must be positive");
}

double empirical_second_moment(const LabeledDataset& ds, const RhoParams& rho, double gamma) {
  ds.validate();
  const Eigen::VectorXd loo = loo_decisions(ds, rho, gamma);
  return loo.squaredNorm() / static_cast<double>(loo.size());
}

std::array<double, 2> empirical_second_moments(const LabeledDataset& ds, const RhoParams& probe1,
                                                const RhoParams& probe2, double gamma) {
  ds.validate();
  const RidgeSystem<double> system(ds.X, gamma);
  const double n = static_cast<double>(ds.n());
  return {system.loo_decisions(lpc_targets(ds.y_noisy, probe1)).squaredNorm() / n,
          system.loo_decisions(lpc_targets(ds.y_noisy, probe2)).squaredNorm() / n};
}

NoiseEstimate solve_noise_rates(const std::array<double, 2>& moments, const NoiseProblem& pb) {
  pb.validate();
  if (!std::isfinite(moments[0]) || !std::isfinite(moments[1]))
    throw NumericError("second-moment estimates are not finite");
  const Eigen::Vector2d target(moments[0], moments[1]);

  NoiseEstimate out;
  out.probes = {pb.probe1, pb.probe2};
  out.moments = moments;

  Eigen::Vector2d best(0.0, 0.0);
  double best_r = std::numeric_limits<double>::infinity();
  const double step = kSimplexCap / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; i + j < kGrid; ++j) {
      const Eigen::Vector2d e(i * step, j * step);
      const double r = (forward(pb, e) - target).norm();
      if (r < best_r) {
        best_r = r;
        best = e;
      }
    }
  }

  Eigen::Vector2d e = best;
  for (int it = 1; it <= kMaxNewton; ++it) {
    out.newton_iterations = it;
    const Eigen::Vector2d f = forward(pb, e) - target;
    Eigen::Matrix2d jac;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d hi = e, lo = e;
      hi[k] += kFdStep;
      lo[k] -= kFdStep;
      jac.col(k) = (forward(pb, hi) - forward(pb, lo)) / (2.0 * kFdStep);
    }
    const auto lu = jac.fullPivLu();
    if (!lu.isInvertible()) {
      out.newton_stalled = true;
      break;
    }
    const Eigen::Vector2d next = project(e - lu.solve(f));
    const double r = (forward(pb, next) - target).norm();
    if (r < best_r) {
      best_r = r;
      best = next;
    }
    const double moved = (next - e).norm();
    e = next;
    if (moved < 1e-15) break;
  }

  out.eps_plus_hat = best[0];
  out.eps_minus_hat = best[1];
  out.residual = best_r;
  out.residual_warning = best_r > pb.threshold_factor * (moments[0] + moments[1]);
  return out;
}

NoiseEstimate estimate_noise_rates(const LabeledDataset& ds, const RhoParams& probe1, const RhoParams& probe2,
                                   double gamma, double snr, double pi1, double threshold_factor) {
  NoiseProblem pb{static_cast<double>(ds.p()) / static_cast<double>(ds.n()), snr, pi1, gamma, probe1, probe2,
                  threshold_factor};
  pb.validate();
  return solve_noise_rates(empirical_second_moments(ds, probe1, probe2, gamma), pb);
}

} // namespace lpc

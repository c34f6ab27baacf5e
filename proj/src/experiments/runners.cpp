#include "lpc/experiments/runners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lpc/datasets.hpp"
#include "lpc/errors.hpp"
#include "lpc/lpc_core.hpp"
#include "lpc/multiclass.hpp"
#include "lpc/noise_estimation.hpp"
#include "lpc/parallel.hpp"
#include "lpc/random.hpp"
#include "lpc/experiments/svg_plot.hpp"

namespace lpc::experiments {

RhoParams variant_rho(const VariantSpec& v, double pi1, double eps_plus, double eps_minus, double rho_minus) {
  switch (v.kind) {
  case VariantSpec::Kind::naive:
  case VariantSpec::Kind::oracle: return RhoParams::naive();
  case VariantSpec::Kind::unbiased: return RhoParams::unbiased(eps_plus, eps_minus);
  case VariantSpec::Kind::optimized:
    try {
      return RhoParams(optimal_rho_plus(pi1, eps_plus, eps_minus, rho_minus), rho_minus);
    } catch (const std::invalid_argument& e) {
      throw NumericError(std::string("optimized variant: ") + e.what());
    }
  case VariantSpec::Kind::custom: return v.rho;
  }
  return RhoParams::naive();
}

std::optional<TheoryStats> variant_theory(const VariantSpec& v, double eta, double pi1, double snr, double eps_plus,
                                          double eps_minus, double rho_minus, double gamma) {
  const bool oracle = v.kind == VariantSpec::Kind::oracle;
  const TheoryConfig tc{eta, pi1, snr, oracle ? 0.0 : eps_plus, oracle ? 0.0 : eps_minus,
                        variant_rho(v, pi1, eps_plus, eps_minus, rho_minus), gamma};
  try {
    return theory_stats_isotropic(tc);
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

namespace {

struct Draw {
  LabeledDataset train;
  Eigen::MatrixXd X_test;
  Eigen::VectorXd y_test;
};

Draw make_draw(const ExperimentConfig& cfg, double eps_plus, std::uint64_t seed) {
  Draw d;
  d.train = generate_noisy_gmm(GmmSpec::isotropic(cfg.p, cfg.n, cfg.pi1, cfg.snr, eps_plus, cfg.eps_minus, seed));
  LabeledDataset test = generate_gmm(
      GmmSpec::isotropic(cfg.p, cfg.n_test, cfg.pi1, cfg.snr, 0.0, 0.0, substream_seed(seed, stream::test, 0)));
  d.X_test = std::move(test.X);
  d.y_test = std::move(test.y_noisy);
  return d;
}

/// One classifier per (variant, rho). Squared-loss variants share a single
/// factorization.
std::vector<Classifier<double>> train_all(const LabeledDataset& train, const std::vector<VariantSpec>& variants,
                                          const std::vector<RhoParams>& rhos, const ExperimentConfig& cfg,
                                          double gamma) {
  std::vector<Classifier<double>> out(variants.size());
  auto labels = [&](std::size_t v) -> const Eigen::VectorXd& {
    return variants[v].kind == VariantSpec::Kind::oracle ? *train.y_clean : train.y_noisy;
  };
  if (cfg.loss == LossKind::bce) {
    for (std::size_t v = 0; v < variants.size(); ++v) out[v] = train_lpc_bce(train.X, labels(v), rhos[v], cfg.bce);
    return out;
  }
  const RidgeSystem<double> system(train.X, gamma);
  Eigen::MatrixXd targets(train.n(), static_cast<Eigen::Index>(variants.size()));
  for (std::size_t v = 0; v < variants.size(); ++v)
    targets.col(static_cast<Eigen::Index>(v)) = lpc_targets(labels(v), rhos[v]);
  const Eigen::MatrixXd W = system.solve(targets);
  for (std::size_t v = 0; v < variants.size(); ++v) {
    out[v].w = W.col(static_cast<Eigen::Index>(v));
    out[v].gamma = gamma;
    out[v].rho = rhos[v];
    out[v].n_train = train.n();
  }
  return out;
}

double resolved_gamma(const ExperimentConfig& cfg, double eta, double snr) {
  return cfg.gamma_optimal ? optimal_gamma(eta, snr) : cfg.gamma;
}

std::string seed_text(std::uint64_t s) { return std::to_string(s); }

RunReport start_report(const ExperimentConfig& cfg) {
  RunReport r;
  r.experiment = to_string(cfg.kind);
  r.config_echo = cfg.echo;
  r.config_hash = cfg.hash;
  r.seeds = cfg.seeds;
  return r;
}

void finish_rows(RunReport& report, std::vector<std::vector<ReportRow>>& slots) {
  for (auto& s : slots)
    for (auto& row : s) report.rows.push_back(std::move(row));
  append_seed_means(report.rows);
  sort_rows(report.rows);
}

// Mean rows of one metric for a variant, in grid order.
std::pair<std::vector<double>, std::vector<std::pair<double, std::optional<double>>>> mean_series(
    const std::vector<ReportRow>& rows, const std::string& variant, const std::string& metric) {
  std::vector<double> x;
  std::vector<std::pair<double, std::optional<double>>> y;
  for (const auto& r : rows) {
    if (r.seed != "mean" || r.variant != variant || r.metric != metric) continue;
    x.push_back(r.grid);
    y.emplace_back(r.empirical, r.theory);
  }
  return {x, y};
}

void add_theory_and_empirical(PlotSpec& plot, const std::vector<ReportRow>& rows, const std::string& variant,
                              const std::string& metric) {
  const auto [x, y] = mean_series(rows, variant, metric);
  Series emp{variant + " (empirical)", x, {}, true, false};
  Series th{variant + " (theory)", {}, {}, false, false};
  for (std::size_t i = 0; i < x.size(); ++i) {
    emp.y.push_back(y[i].first);
    if (y[i].second) {
      th.x.push_back(x[i]);
      th.y.push_back(*y[i].second);
    }
  }
  if (!th.x.empty()) plot.series.push_back(std::move(th));
  plot.series.push_back(std::move(emp));
}

} // namespace

// ---------------------------------------------------------------------------

RunReport run_histogram(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  const double eta = static_cast<double>(cfg.p) / static_cast<double>(cfg.n);
  const double gamma = resolved_gamma(cfg, eta, cfg.snr);
  const std::size_t nv = cfg.variants.size();

  std::vector<RhoParams> rhos;
  std::vector<std::optional<TheoryStats>> theory;
  for (const auto& v : cfg.variants) {
    rhos.push_back(variant_rho(v, cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus));
    theory.push_back(cfg.loss == LossKind::squared
                         ? variant_theory(v, eta, cfg.pi1, cfg.snr, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus, gamma)
                         : std::nullopt);
  }

  // Decision values of the first seed feed the histogram.
  std::vector<Eigen::VectorXd> first_scores(nv);
  Eigen::VectorXd first_labels;

  std::vector<std::vector<ReportRow>> slots(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
    const std::uint64_t seed = cfg.seeds[si];
    const Draw d = make_draw(cfg, cfg.eps_plus, seed);
    const auto models = train_all(d.train, cfg.variants, rhos, cfg, gamma);
    for (std::size_t v = 0; v < nv; ++v) {
      const Eigen::VectorXd s = decision(models[v], d.X_test);
      const Evaluation ev = evaluate(models[v], d.X_test, d.y_test);
      double sum[2] = {0, 0}, sq[2] = {0, 0};
      double count[2] = {0, 0};
      for (Eigen::Index j = 0; j < s.size(); ++j) {
        const int c = d.y_test[j] > 0 ? 1 : 0;
        sum[c] += s[j];
        sq[c] += s[j] * s[j];
        count[c] += 1;
      }
      const auto& th = theory[v];
      auto push = [&](const std::string& metric, double emp, std::optional<double> t) {
        slots[si].push_back({report.experiment, cfg.variants[v].name, 0.0, seed_text(seed), metric, emp, t});
      };
      const std::optional<double> sd =
          th ? std::optional<double>(std::sqrt(th->variance)) : std::nullopt;
      for (int c = 0; c < 2; ++c) {
        const double mean = sum[c] / count[c];
        const double var = sq[c] / count[c] - mean * mean;
        const std::string suffix = c == 0 ? "_class1" : "_class2";
        push("mean" + suffix, mean, th ? std::optional<double>(c == 0 ? -th->m_rho : th->m_rho) : std::nullopt);
        push("std" + suffix, std::sqrt(std::max(var, 0.0)), sd);
      }
      push("accuracy", ev.accuracy, th ? std::optional<double>(th->accuracy) : std::nullopt);
      push("risk", ev.risk, th ? std::optional<double>(th->risk) : std::nullopt);
      if (si == 0) first_scores[v] = s;
    }
    if (si == 0) first_labels = d.y_test;
  });
  finish_rows(report, slots);

  // Shared bin edges across variants and classes.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : first_scores) {
    lo = std::min(lo, s.minCoeff());
    hi = std::max(hi, s.maxCoeff());
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / cfg.bins;
  std::ostringstream bins;
  bins << "variant,class,bin_center,density,theory_density\n";
  PlotSpec plot{"Decision function by class (seed " + seed_text(cfg.seeds.front()) + ")", "w^T x", "density", {}, false};
  for (std::size_t v = 0; v < nv; ++v) {
    for (int c = 0; c < 2; ++c) {
      std::vector<double> counts(static_cast<std::size_t>(cfg.bins), 0.0);
      double total = 0.0;
      for (Eigen::Index j = 0; j < first_scores[v].size(); ++j) {
        if ((first_labels[j] > 0) != (c == 1)) continue;
        auto b = static_cast<long long>((first_scores[v][j] - lo) / width);
        b = std::clamp<long long>(b, 0, cfg.bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
        total += 1.0;
      }
      Series bars{cfg.variants[v].name + " class " + std::to_string(c + 1), {}, {}, false, true};
      Series curve{cfg.variants[v].name + " class " + std::to_string(c + 1) + " theory", {}, {}, false, false};
      for (int b = 0; b < cfg.bins; ++b) {
        const double center = lo + (b + 0.5) * width;
        const double density = counts[static_cast<std::size_t>(b)] / (total * width);
        std::optional<double> td;
        if (theory[v]) {
          const double m = c == 0 ? -theory[v]->m_rho : theory[v]->m_rho;
          const double sd = std::sqrt(theory[v]->variance);
          const double z = (center - m) / sd;
          td = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
          curve.x.push_back(center);
          curve.y.push_back(*td);
        }
        bars.x.push_back(center);
        bars.y.push_back(density);
        bins << cfg.variants[v].name << ',' << (c + 1) << ',' << format_number(center) << ','
             << format_number(density) << ',' << (td ? format_number(*td) : "") << '\n';
      }
      plot.series.push_back(std::move(bars));
      if (!curve.x.empty()) plot.series.push_back(std::move(curve));
    }
  }
  report.plot_svg = render_svg(plot);
  report.extras.emplace_back("bins.csv", bins.str());

  std::ostringstream summary;
  summary << "gamma = " << format_number(gamma) << "\n";
  for (std::size_t v = 0; v < nv; ++v) {
    const auto [x, y] = mean_series(report.rows, cfg.variants[v].name, "accuracy");
    summary << cfg.variants[v].name << ": accuracy " << format_number(y.front().first);
    if (y.front().second) summary << " (theory " << format_number(*y.front().second) << ")";
    summary << "\n";
  }
  report.summary = summary.str();
  return report;
}

RunReport run_sweep(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  const bool rho_sweep = cfg.kind == ExperimentKind::sweep_rho;
  std::vector<VariantSpec> variants = cfg.variants;
  if (rho_sweep) {
    VariantSpec lpc;
    lpc.kind = VariantSpec::Kind::custom;
    lpc.name = "lpc";
    variants = {lpc};
  }
  const std::size_t ng = cfg.grid.size();
  const std::size_t ns = cfg.seeds.size();
  const double eta = static_cast<double>(cfg.p) / static_cast<double>(cfg.n);
  std::vector<std::string> skipped;

  std::vector<std::vector<ReportRow>> slots(ng * ns);
  parallel_for(ng * ns, cfg.threads, [&](std::size_t task) {
    const std::size_t gi = task / ns;
    const std::uint64_t seed = cfg.seeds[task % ns];
    const double g = cfg.grid[gi];
    const double eps_plus = cfg.kind == ExperimentKind::sweep_eps ? g : cfg.eps_plus;
    const double gamma = cfg.kind == ExperimentKind::sweep_gamma ? g : resolved_gamma(cfg, eta, cfg.snr);

    std::vector<VariantSpec> vs = variants;
    if (rho_sweep) {
      if (std::abs(1.0 - g - cfg.rho_minus) <= 1e-8) return; // singular perturbation
      vs[0].rho = RhoParams(g, cfg.rho_minus);
    }
    std::vector<RhoParams> rhos;
    for (const auto& v : vs) rhos.push_back(variant_rho(v, cfg.pi1, eps_plus, cfg.eps_minus, cfg.rho_minus));

    const Draw d = make_draw(cfg, eps_plus, seed);
    const auto models = train_all(d.train, vs, rhos, cfg, gamma);
    for (std::size_t v = 0; v < vs.size(); ++v) {
      const Evaluation ev = evaluate(models[v], d.X_test, d.y_test);
      const auto th = cfg.loss == LossKind::squared
                          ? variant_theory(vs[v], eta, cfg.pi1, cfg.snr, eps_plus, cfg.eps_minus, cfg.rho_minus, gamma)
                          : std::nullopt;
      slots[task].push_back({report.experiment, vs[v].name, g, seed_text(seed), "accuracy", ev.accuracy,
                             th ? std::optional<double>(th->accuracy) : std::nullopt});
      slots[task].push_back({report.experiment, vs[v].name, g, seed_text(seed), "risk", ev.risk,
                             th ? std::optional<double>(th->risk) : std::nullopt});
    }
  });
  finish_rows(report, slots);

  const char* axis = cfg.kind == ExperimentKind::sweep_eps   ? "eps_plus"
                     : cfg.kind == ExperimentKind::sweep_rho ? "rho_plus"
                                                             : "gamma";
  PlotSpec plot{std::string("Accuracy versus ") + axis, axis, "accuracy", {}, false};
  for (const auto& v : variants) add_theory_and_empirical(plot, report.rows, v.name, "accuracy");
  report.plot_svg = render_svg(plot);

  std::ostringstream summary;
  for (const auto& v : variants) {
    const auto [x, y] = mean_series(report.rows, v.name, "accuracy");
    std::optional<double> worst_gap;
    double best = 0.0, best_x = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto& [emp, th] = y[i];
      if (th) worst_gap = std::max(worst_gap.value_or(0.0), std::abs(emp - *th));
      if (i == 0 || emp > best) best = emp, best_x = x[i];
    }
    summary << v.name << ": " << x.size() << " grid points, best accuracy " << format_number(best) << " at "
            << format_number(best_x);
    if (worst_gap) summary << ", max |empirical - theory| " << format_number(*worst_gap);
    summary << "\n";
  }
  if (rho_sweep)
    summary << "rho_plus* = " << format_number(optimal_rho_plus(cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus))
            << "\n";
  report.summary = summary.str();
  return report;
}

RunReport run_noise_estimation(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  const std::size_t nsnr = cfg.snr_values.size();
  const std::size_t ng = cfg.grid.size();
  const std::size_t ns = cfg.seeds.size();
  std::vector<std::vector<ReportRow>> slots(nsnr * ng * ns);
  parallel_for(slots.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t k = task / (ng * ns);
    const std::size_t gi = (task / ns) % ng;
    const std::uint64_t seed = cfg.seeds[task % ns];
    const double snr = cfg.snr_values[k];
    const double eps_plus = cfg.grid[gi];
    const LabeledDataset ds =
        generate_noisy_gmm(GmmSpec::isotropic(cfg.p, cfg.n, cfg.pi1, snr, eps_plus, cfg.eps_minus, seed));
    const NoiseEstimate est =
        estimate_noise_rates(ds, cfg.probe1, cfg.probe2, cfg.gamma, snr, cfg.pi1, cfg.threshold_factor);
    const std::string variant = "snr=" + format_number(snr);
    auto& rows = slots[task];
    rows.push_back({report.experiment, variant, eps_plus, seed_text(seed), "eps_plus_hat", est.eps_plus_hat, eps_plus});
    rows.push_back(
        {report.experiment, variant, eps_plus, seed_text(seed), "eps_minus_hat", est.eps_minus_hat, cfg.eps_minus});
    rows.push_back({report.experiment, variant, eps_plus, seed_text(seed), "residual", est.residual, std::nullopt});
    rows.push_back({report.experiment, variant, eps_plus, seed_text(seed), "residual_warning",
                    est.residual_warning ? 1.0 : 0.0, std::nullopt});
  });
  finish_rows(report, slots);

  PlotSpec plot{"Estimated versus true eps_plus", "true eps_plus", "estimated eps_plus", {}, true};
  std::ostringstream summary;
  for (double snr : cfg.snr_values) {
    const std::string variant = "snr=" + format_number(snr);
    const auto [x, y] = mean_series(report.rows, variant, "eps_plus_hat");
    Series s{variant, x, {}, true, false};
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s.y.push_back(y[i].first);
    }
    for (const auto& r : report.rows)
      if (r.variant == variant && r.metric == "eps_plus_hat" && r.seed != "mean") err += *r.gap();
    err /= static_cast<double>(ng * ns);
    summary << variant << ": mean |eps_plus_hat - eps_plus| = " << format_number(err) << "\n";
    plot.series.push_back(std::move(s));
  }
  report.plot_svg = render_svg(plot);
  report.summary = summary.str();
  return report;
}

RunReport run_multiclass(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  MultiGmmSpec spec;
  spec.k = cfg.k;
  spec.p = cfg.p;
  spec.n = cfg.n;
  spec.means = Eigen::MatrixXd::Zero(cfg.p, cfg.k);
  spec.means.row(0) = cfg.mean_coefs.transpose();
  spec.pi = cfg.class_pi;
  spec.eps = cfg.eps_matrix;
  spec.seed = cfg.seeds.front();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("multiclass setup: ") + e.what());
  }

  SearchOptions opt;
  opt.candidates = cfg.candidates;
  opt.box_low = cfg.box_low;
  opt.box_high = cfg.box_high;
  opt.seeds = cfg.seeds;
  opt.gamma = cfg.gamma;
  opt.n_test = cfg.n_test;
  opt.taus = cfg.taus;
  opt.threads = cfg.threads;
  const SearchResult res = search_alpha_beta(spec, opt);

  for (const auto& pt : res.path)
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
      report.rows.push_back({report.experiment, "tau", pt.tau, seed_text(cfg.seeds[s]), "accuracy", pt.per_seed[s],
                             std::nullopt});
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
    report.rows.push_back({report.experiment, "naive", 0.0, seed_text(cfg.seeds[s]), "accuracy",
                           res.naive_per_seed[s], std::nullopt});
  append_seed_means(report.rows);
  sort_rows(report.rows);

  std::ostringstream tau_csv;
  write_tau_csv(tau_csv, res, cfg.seeds);
  report.extras.emplace_back("tau_path.csv", tau_csv.str());

  std::ostringstream ab;
  ab << "which,class,alpha,beta\n";
  for (int a = 0; a < cfg.k; ++a)
    ab << "best," << (a + 1) << ',' << format_number(res.best.alpha[a]) << ',' << format_number(res.best.beta[a])
       << '\n';
  for (int a = 0; a < cfg.k; ++a)
    ab << "worst," << (a + 1) << ',' << format_number(res.worst.alpha[a]) << ','
       << format_number(res.worst.beta[a]) << '\n';
  report.extras.emplace_back("alpha_beta.csv", ab.str());

  PlotSpec plot{"Accuracy along the interpolation path", "tau", "accuracy", {}, false};
  Series path{"tau path (mean)", {}, {}, false, false};
  Series marks{"tau path", {}, {}, true, false};
  for (const auto& pt : res.path) {
    path.x.push_back(pt.tau);
    path.y.push_back(pt.mean);
  }
  marks.x = path.x;
  marks.y = path.y;
  Series naive{"naive", {0.0, 1.0}, {res.naive_accuracy, res.naive_accuracy}, false, false};
  plot.series = {path, marks, naive};
  report.plot_svg = render_svg(plot);

  std::ostringstream summary;
  summary << "best accuracy " << format_number(res.best_accuracy) << ", worst " << format_number(res.worst_accuracy)
          << ", naive " << format_number(res.naive_accuracy) << "\n";
  for (const auto& pt : res.path)
    summary << "tau " << format_number(pt.tau) << ": " << format_number(pt.mean) << " +- " << format_number(pt.std)
            << "\n";
  report.summary = summary.str();
  return report;
}

namespace {

struct Split {
  LabeledDataset train;
  Eigen::MatrixXd X_test;
  Eigen::VectorXd y_test;
};

Split split_columns(const LabeledDataset& all, double test_fraction, std::uint64_t seed) {
  const Eigen::Index n = all.n();
  const auto n_test = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(test_fraction * n)));
  if (n - n_test < 2) throw ConfigError("data set too small for the requested test fraction");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(substream_seed(seed, stream::test, 1));
  std::shuffle(order.begin(), order.end(), rng.engine());
  const Eigen::VectorXd& y = all.reference_labels();
  Split s;
  s.X_test.resize(all.p(), n_test);
  s.y_test.resize(n_test);
  s.train.X.resize(all.p(), n - n_test);
  Eigen::VectorXd y_train(n - n_test);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    if (j < n_test) {
      s.X_test.col(j) = all.X.col(src);
      s.y_test[j] = y[src];
    } else {
      s.train.X.col(j - n_test) = all.X.col(src);
      y_train[j - n_test] = y[src];
    }
  }
  s.train.y_clean = y_train;
  s.train.y_noisy = y_train;
  return s;
}

} // namespace

RunReport run_real_data(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  const bool synthetic = cfg.data_path.empty();
  std::optional<StandardizedData> prepared;
  double pi1 = cfg.pi1, snr = cfg.snr;
  Eigen::Index p = cfg.p, n_train = cfg.n;
  if (!synthetic) {
    prepared = standardize_and_estimate(load_features_csv(cfg.data_path, cfg.csv));
    if (prepared->single_class) throw ConfigError(cfg.data_path + ": labels contain a single class");
    pi1 = prepared->pi1_estimate;
    snr = prepared->snr_estimate;
    p = prepared->data.p();
    n_train = prepared->data.n() - std::max<Eigen::Index>(1, std::llround(cfg.test_fraction * prepared->data.n()));
  }
  const double eta = static_cast<double>(p) / static_cast<double>(n_train);
  const double gamma = resolved_gamma(cfg, eta, snr);
  std::vector<RhoParams> rhos;
  for (const auto& v : cfg.variants) rhos.push_back(variant_rho(v, pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus));

  std::vector<std::vector<ReportRow>> slots(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
    const std::uint64_t seed = cfg.seeds[si];
    LabeledDataset train;
    Eigen::MatrixXd X_test;
    Eigen::VectorXd y_test;
    if (synthetic) {
      Draw d = make_draw(cfg, cfg.eps_plus, seed);
      train = std::move(d.train);
      X_test = std::move(d.X_test);
      y_test = std::move(d.y_test);
    } else {
      Split s = split_columns(prepared->data, cfg.test_fraction, seed);
      train = flip_labels(s.train, cfg.eps_plus, cfg.eps_minus, splitmix64(seed));
      X_test = std::move(s.X_test);
      y_test = std::move(s.y_test);
    }
    const auto models = train_all(train, cfg.variants, rhos, cfg, gamma);
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      const Evaluation ev = evaluate(models[v], X_test, y_test);
      const auto th = synthetic ? variant_theory(cfg.variants[v], eta, pi1, snr, cfg.eps_plus, cfg.eps_minus,
                                                 cfg.rho_minus, gamma)
                                : std::nullopt;
      slots[si].push_back({report.experiment, cfg.variants[v].name, 0.0, seed_text(seed), "accuracy", ev.accuracy,
                           th ? std::optional<double>(th->accuracy) : std::nullopt});
    }
  });
  finish_rows(report, slots);

  std::ostringstream table;
  table << "variant,accuracy_mean_pct,accuracy_std_pct\n";
  std::ostringstream summary;
  summary << (synthetic ? "synthetic Gaussian stand-in" : cfg.data_path) << ", p = " << p << ", pi1 = "
          << format_number(pi1) << ", snr = " << format_number(snr) << ", gamma = " << format_number(gamma) << "\n";
  PlotSpec plot{"Accuracy by variant", "variant index", "accuracy", {}, false};
  Series means{"mean accuracy", {}, {}, true, false};
  for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
    std::vector<double> acc;
    for (const auto& r : report.rows)
      if (r.variant == cfg.variants[v].name && r.metric == "accuracy" && r.seed != "mean") acc.push_back(r.empirical);
    const double m = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
    double var = 0.0;
    for (double a : acc) var += (a - m) * (a - m);
    const double sd = acc.size() > 1 ? std::sqrt(var / static_cast<double>(acc.size() - 1)) : 0.0;
    char line[128];
    std::snprintf(line, sizeof line, "%-12s %6.2f +- %.2f\n", cfg.variants[v].name.c_str(), 100 * m, 100 * sd);
    summary << line;
    table << cfg.variants[v].name << ',' << format_number(100 * m) << ',' << format_number(100 * sd) << '\n';
    means.x.push_back(static_cast<double>(v));
    means.y.push_back(m);
  }
  plot.series.push_back(std::move(means));
  report.plot_svg = render_svg(plot);
  report.extras.emplace_back("table.csv", table.str());
  report.summary = summary.str();
  return report;
}

RunReport run_theory(const ExperimentConfig& cfg) {
  RunReport report = start_report(cfg);
  const double eta = static_cast<double>(cfg.p) / static_cast<double>(cfg.n);
  const double gamma = resolved_gamma(cfg, eta, cfg.snr);
  std::ostringstream table;
  table << "variant,rho_plus,rho_minus,delta,h,m_rho,nu_rho,variance,kappa,m_oracle,nu_oracle,accuracy,risk\n";
  PlotSpec plot{"Predicted accuracy by variant", "variant index", "accuracy", {}, false};
  Series acc{"predicted accuracy", {}, {}, true, false};
  for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
    const auto& var = cfg.variants[v];
    const bool oracle = var.kind == VariantSpec::Kind::oracle;
    const RhoParams rho = variant_rho(var, cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus);
    const TheoryStats s = theory_stats_isotropic(
        {eta, cfg.pi1, cfg.snr, oracle ? 0.0 : cfg.eps_plus, oracle ? 0.0 : cfg.eps_minus, rho, gamma});
    table << var.name << ',' << format_number(rho.rho_plus()) << ',' << format_number(rho.rho_minus()) << ','
          << format_number(s.delta) << ',' << format_number(s.h) << ',' << format_number(s.m_rho) << ','
          << format_number(s.nu_rho) << ',' << format_number(s.variance) << ',' << format_number(s.kappa) << ','
          << format_number(s.m_oracle) << ',' << format_number(s.nu_oracle) << ',' << format_number(s.accuracy)
          << ',' << format_number(s.risk) << '\n';
    const std::pair<const char*, double> metrics[] = {{"delta", s.delta}, {"h", s.h},           {"m_rho", s.m_rho},
                                                      {"nu_rho", s.nu_rho}, {"accuracy", s.accuracy}, {"risk", s.risk}};
    for (const auto& [name, value] : metrics)
      report.rows.push_back({report.experiment, var.name, 0.0, "none", name, std::nan(""), value});
    acc.x.push_back(static_cast<double>(v));
    acc.y.push_back(s.accuracy);
  }
  sort_rows(report.rows);
  plot.series.push_back(std::move(acc));
  report.plot_svg = render_svg(plot);
  report.extras.emplace_back("theory.csv", table.str());
  std::ostringstream summary;
  summary << "eta = " << format_number(eta) << ", gamma = " << format_number(gamma) << "\n" << table.str();
  if (cfg.eps_plus + cfg.eps_minus < 1.0) {
    summary << "rho_plus* = " << format_number(optimal_rho_plus(cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus))
            << "\n";
    if (std::abs(2.0 * cfg.pi1 - 1.0) > 1e-12)
      summary << "worst rho_plus = "
              << format_number(worst_rho_plus(cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg.rho_minus)) << "\n";
  }
  report.summary = summary.str();
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
  case ExperimentKind::histogram: return run_histogram(cfg);
  case ExperimentKind::sweep_eps:
  case ExperimentKind::sweep_rho:
  case ExperimentKind::sweep_gamma: return run_sweep(cfg);
  case ExperimentKind::estimate_noise: return run_noise_estimation(cfg);
  case ExperimentKind::multiclass: return run_multiclass(cfg);
  case ExperimentKind::real_data: return run_real_data(cfg);
  case ExperimentKind::theory: return run_theory(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

} // namespace lpc::experiments

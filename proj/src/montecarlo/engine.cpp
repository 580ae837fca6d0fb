#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include <Eigen/SVD>

#include "aiedet/montecarlo.hpp"

namespace aiedet {
namespace {

constexpr double kMaxFailureFraction = 1e-3;

struct TrialFailure {
  bool failed = false;
  std::string message;
};

void for_each_trial(std::size_t trials, unsigned workers,
                    const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < trials; t += workers) body(t);
    });
  }
}

}  // namespace

std::size_t default_threshold_trials(double pfa) {
  return static_cast<std::size_t>(std::llround(100.0 / pfa));
}

void ExperimentConfig::validate() const {
  clutter.validate();
  aie.validate();
  if (detectors.empty()) throw InvalidParameter("detector list is empty");
  if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidParameter("pfa must lie in (0, 1)");
  if (static_cast<double>(threshold_trials) < std::ceil(10.0 / pfa - 1e-9)) {
    throw InvalidParameter("threshold_trials must be at least 10 / pfa");
  }
  if (pd_trials < 100) throw InvalidParameter("pd_trials must be at least 100");
  if (re_iterations < 1) throw InvalidParameter("re_iterations must be >= 1");
  for (double s : scr_db) {
    if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
      throw InvalidParameter("SCR grid entries must be finite dB values or -inf");
    }
  }
  const CMatrix h = subspace.build(clutter.n, clutter.p);
  Eigen::JacobiSVD<CMatrix> svd(h);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-10 * s(0))) {
    throw InvalidParameter("steering subspace is rank deficient; check f0/df");
  }
}

const std::vector<double>& StatisticTable::of(Detector d) const {
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    if (detectors[i] == d) return statistics[i];
  }
  throw InvalidParameter("detector " + std::string(to_string(d)) + " not in table");
}

StatisticTable run_trials(const ExperimentConfig& cfg, const std::vector<Detector>& detectors,
                          const TrialRecipe& recipe, std::size_t trials, const RngRoot& root,
                          unsigned workers) {
  ClutterConfig clutter = cfg.clutter;
  clutter.delta = recipe.delta;
  clutter.validate();
  const HermitianPD sigma = build_speckle_covariance(clutter.n, clutter.delta);
  const CMatrix h = cfg.subspace.build(clutter.n, clutter.p);
  const SignalSpec spec{recipe.scr_linear, cfg.scattering};

  const std::size_t nd = detectors.size();
  StatisticTable table;
  table.detectors = detectors;
  table.statistics.assign(nd, std::vector<double>(trials, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::vector<TrialFailure>> failures(nd, std::vector<TrialFailure>(trials));

  for_each_trial(trials, workers, [&](std::size_t t) {
    TrialStreams streams = TrialStreams::make(root, t);
    std::optional<DetectionInput> generated;
    try {
      generated.emplace(generate_dataset(clutter, sigma, h, spec, recipe.hypothesis, streams));
    } catch (const std::exception& e) {
      for (std::size_t d = 0; d < nd; ++d) failures[d][t] = {true, e.what()};
      return;
    }
    const DetectionInput& in = *generated;
    try {
      const auto values = evaluate_detectors(in, detectors, cfg.aie, cfg.re_iterations);
      for (std::size_t d = 0; d < nd; ++d) table.statistics[d][t] = values[d];
      return;
    } catch (const std::exception&) {
      // Fall through and isolate the failing detector(s).
    }
    for (std::size_t d = 0; d < nd; ++d) {
      try {
        table.statistics[d][t] =
            evaluate_detectors(in, {detectors[d]}, cfg.aie, cfg.re_iterations).front();
      } catch (const std::exception& e) {
        failures[d][t] = {true, e.what()};
      }
    }
  });

  for (std::size_t d = 0; d < nd; ++d) {
    std::size_t count = 0;
    std::size_t first = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      if (failures[d][t].failed) {
        if (first == trials) first = t;
        ++count;
      }
    }
    table.failures += count;
    if (static_cast<double>(count) > kMaxFailureFraction * static_cast<double>(trials)) {
      throw MonteCarloFailure(std::string(to_string(detectors[d])) + ": " +
                                  std::to_string(count) + " of " + std::to_string(trials) +
                                  " trials failed; first failure at trial " +
                                  std::to_string(first) + ": " + failures[d][first].message,
                              first, detectors[d]);
    }
  }
  return table;
}

ThresholdRecord threshold_from_statistics(Detector d, std::vector<double> stats, double pfa,
                                          std::uint64_t seed) {
  std::erase_if(stats, [](double v) { return !std::isfinite(v); });
  const std::size_t n = stats.size();
  if (n == 0) throw InvalidParameter("no finite statistics to calibrate on");
  const auto m = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(n) * pfa)));
  if (m > n) throw InvalidParameter("threshold rank exceeds trial count");
  std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   stats.end(), std::greater<>());
  ThresholdRecord rec;
  rec.detector = d;
  rec.threshold = stats[m - 1];
  rec.pfa_target = pfa;
  rec.pfa_achieved = static_cast<double>(m) / static_cast<double>(n);
  rec.trials = n;
  rec.seed = seed;
  return rec;
}

std::size_t count_exceedances(const std::vector<double>& stats, double threshold) {
  return static_cast<std::size_t>(std::count_if(stats.begin(), stats.end(), [&](double v) {
    return std::isfinite(v) && v >= threshold;
  }));
}

namespace {

std::size_t finite_count(const std::vector<double>& stats) {
  return static_cast<std::size_t>(
      std::count_if(stats.begin(), stats.end(), [](double v) { return std::isfinite(v); }));
}

}  // namespace

Thresholds calibrate_thresholds(const ExperimentConfig& cfg, const RngRoot& root,
                                unsigned workers) {
  cfg.validate();
  const TrialRecipe recipe{Hypothesis::H0, 0.0, cfg.clutter.delta};
  const StatisticTable table =
      run_trials(cfg, cfg.detectors, recipe, cfg.threshold_trials, root, workers);
  Thresholds out;
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    out[cfg.detectors[d]] =
        threshold_from_statistics(cfg.detectors[d], table.statistics[d], cfg.pfa, root.seed);
  }
  return out;
}

ThresholdRecord calibrate_threshold(Detector d, const ExperimentConfig& cfg,
                                    const RngRoot& root, unsigned workers) {
  ExperimentConfig single = cfg;
  single.detectors = {d};
  return calibrate_thresholds(single, root, workers).at(d);
}

std::map<Detector, CurvePoint> estimate_pd_all(const ExperimentConfig& cfg,
                                               const Thresholds& thresholds, double scr_db,
                                               const RngRoot& root, unsigned workers) {
  cfg.validate();
  if (std::isnan(scr_db) || scr_db == std::numeric_limits<double>::infinity()) {
    throw InvalidParameter("SCR must be a finite dB value or -inf");
  }
  const TrialRecipe recipe{Hypothesis::H1, db_to_linear(scr_db), cfg.clutter.delta};
  const StatisticTable table = run_trials(cfg, cfg.detectors, recipe, cfg.pd_trials, root, workers);
  std::map<Detector, CurvePoint> out;
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    const Detector det = cfg.detectors[d];
    const auto it = thresholds.find(det);
    if (it == thresholds.end()) {
      throw InvalidParameter("no threshold for " + std::string(to_string(det)));
    }
    const std::size_t n = finite_count(table.statistics[d]);
    const std::size_t hits = count_exceedances(table.statistics[d], it->second.threshold);
    const Interval ci = wilson_interval(hits, n);
    out[det] = CurvePoint{scr_db, n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0,
                          ci.low, ci.high, n};
  }
  return out;
}

CurvePoint estimate_pd(Detector d, const ExperimentConfig& cfg, double threshold,
                       double scr_db, const RngRoot& root, unsigned workers) {
  ExperimentConfig single = cfg;
  single.detectors = {d};
  Thresholds th;
  th[d] = ThresholdRecord{d, threshold, cfg.pfa, cfg.pfa, 0, root.seed};
  return estimate_pd_all(single, th, scr_db, root, workers).at(d);
}

Curves pd_vs_scr_curve(const ExperimentConfig& cfg, const RngRoot& root, unsigned workers) {
  const Thresholds th = calibrate_thresholds(cfg, root.with(StreamPurpose::Calibration), workers);
  Curves curves;
  for (Detector d : cfg.detectors) curves[d];
  for (double scr : cfg.scr_db) {
    const auto points =
        estimate_pd_all(cfg, th, scr, root.with(StreamPurpose::Detection), workers);
    for (const auto& [d, pt] : points) curves[d].push_back(pt);
  }
  return curves;
}

CfarTable cfar_sweep(const ExperimentConfig& cfg, const Thresholds& thresholds,
                     const std::vector<double>& deltas, const RngRoot& root, unsigned workers) {
  cfg.validate();
  for (Detector d : cfg.detectors) {
    if (!thresholds.contains(d)) {
      throw InvalidParameter("no threshold for " + std::string(to_string(d)));
    }
  }
  CfarTable out;
  for (Detector d : cfg.detectors) out[d];
  for (double delta : deltas) {
    if (!(delta >= 0.0 && delta < 1.0)) {
      throw InvalidParameter("delta values must lie in [0, 1)");
    }
    const TrialRecipe recipe{Hypothesis::H0, 0.0, delta};
    const StatisticTable table =
        run_trials(cfg, cfg.detectors, recipe, cfg.threshold_trials, root, workers);
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
      const Detector det = cfg.detectors[d];
      const std::size_t n = finite_count(table.statistics[d]);
      const std::size_t hits =
          count_exceedances(table.statistics[d], thresholds.at(det).threshold);
      const Interval ci = wilson_interval(hits, n);
      out[det].push_back(RatePoint{
          delta, n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0, ci.low, ci.high, n});
    }
  }
  return out;
}

CfarTable cfar_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas,
                     const RngRoot& root, unsigned workers) {
  const Thresholds th = calibrate_thresholds(cfg, root.with(StreamPurpose::Calibration), workers);
  return cfar_sweep(cfg, th, deltas, root.with(StreamPurpose::CfarSweep), workers);
}

ExperimentConfig with_axis(const ExperimentConfig& base, StudyAxis axis, Index value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case StudyAxis::K: cfg.clutter.k = value; break;
    case StudyAxis::P: cfg.clutter.p = value; break;
    case StudyAxis::L: cfg.clutter.l = value; break;
  }
  cfg.validate();
  return cfg;
}

std::vector<StudyEntry> run_parameter_study(const ExperimentConfig& base, StudyAxis axis,
                                            const std::vector<Index>& values,
                                            const RngRoot& root, unsigned workers) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(values.size());
  for (Index v : values) configs.push_back(with_axis(base, axis, v));

  std::vector<StudyEntry> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(StudyEntry{values[i], pd_vs_scr_curve(configs[i], root, workers)});
  }
  return out;
}

}  // namespace aiedet

#pragma once

// Monte Carlo evaluation: threshold calibration at a target PFA, PD-vs-SCR
// curves, CFAR sweeps over the speckle correlation, and parameter studies.
//
// Trial t of every run draws its dataset from the substreams
// (seed, purpose, t, role), and all detectors in a run see the same dataset
// for a given t. Results are stored by trial index, so outputs are identical
// for any worker count.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "aiedet/clutter.hpp"
#include "aiedet/detectors.hpp"
#include "aiedet/rng.hpp"

namespace aiedet {

struct ExperimentConfig {
  ClutterConfig clutter;
  SteeringSubspace subspace;
  Scattering scattering = Scattering::UniformDeterministic;
  std::vector<double> scr_db;
  std::vector<Detector> detectors{Detector::AieGlrt, Detector::AieRao, Detector::AieWald,
                                  Detector::AnmfRe};
  double pfa = 1e-3;
  std::size_t threshold_trials = 100000;
  std::size_t pd_trials = 10000;
  std::uint64_t seed = 1;
  AieSettings aie;
  int re_iterations = 4;

  void validate() const;
};

/// 100 / pfa, the default calibration trial count.
std::size_t default_threshold_trials(double pfa);

struct ThresholdRecord {
  Detector detector = Detector::AieGlrt;
  double threshold = 0.0;  // natural-log domain for the GLRT
  double pfa_target = 0.0;
  double pfa_achieved = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  double scr_db = 0.0;
  double pd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t trials = 0;
};

struct RatePoint {
  double delta = 0.0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t trials = 0;
};

using Thresholds = std::map<Detector, ThresholdRecord>;
using Curves = std::map<Detector, std::vector<CurvePoint>>;
using CfarTable = std::map<Detector, std::vector<RatePoint>>;

/// Raised when too many trials fail numerically. Carries the first failing
/// trial and detector.
class MonteCarloFailure : public std::runtime_error {
 public:
  MonteCarloFailure(const std::string& msg, std::size_t trial, Detector detector)
      : std::runtime_error(msg), trial_(trial), detector_(detector) {}
  std::size_t trial() const { return trial_; }
  Detector detector() const { return detector_; }

 private:
  std::size_t trial_;
  Detector detector_;
};

/// What each trial of a batch simulates.
struct TrialRecipe {
  Hypothesis hypothesis = Hypothesis::H0;
  double scr_linear = 0.0;
  double delta = 0.95;
};

/// statistics[d][t] for detector d of `detectors` and trial t. Failed
/// trials hold NaN; more than 0.1% failures for any detector raises
/// MonteCarloFailure.
struct StatisticTable {
  std::vector<Detector> detectors;
  std::vector<std::vector<double>> statistics;
  std::size_t failures = 0;

  const std::vector<double>& of(Detector d) const;
};

StatisticTable run_trials(const ExperimentConfig& cfg, const std::vector<Detector>& detectors,
                          const TrialRecipe& recipe, std::size_t trials, const RngRoot& root,
                          unsigned workers = 1);

/// m-th largest finite value with m = max(1, round(n * pfa)).
ThresholdRecord threshold_from_statistics(Detector d, std::vector<double> stats, double pfa,
                                          std::uint64_t seed);

/// Count of finite statistics >= threshold (the decision rule for H1).
std::size_t count_exceedances(const std::vector<double>& stats, double threshold);

/// Calibrates all detectors of cfg on one shared set of H0 trials drawn
/// from root (purpose as given) at the configured delta.
Thresholds calibrate_thresholds(const ExperimentConfig& cfg, const RngRoot& root,
                                unsigned workers = 1);
ThresholdRecord calibrate_threshold(Detector d, const ExperimentConfig& cfg,
                                    const RngRoot& root, unsigned workers = 1);

/// PD for every detector of cfg at one SCR (dB), using H1 trials from root.
std::map<Detector, CurvePoint> estimate_pd_all(const ExperimentConfig& cfg,
                                               const Thresholds& thresholds, double scr_db,
                                               const RngRoot& root, unsigned workers = 1);
CurvePoint estimate_pd(Detector d, const ExperimentConfig& cfg, double threshold,
                       double scr_db, const RngRoot& root, unsigned workers = 1);

/// Calibrates with purpose Calibration, then sweeps cfg.scr_db with purpose
/// Detection. The same H1 clutter realizations are reused at every SCR.
Curves pd_vs_scr_curve(const ExperimentConfig& cfg, const RngRoot& root, unsigned workers = 1);

/// Empirical PFA of the given thresholds on threshold_trials fresh H0
/// trials per delta (drawn from root; the same clutter draws are recoloured
/// for every delta).
CfarTable cfar_sweep(const ExperimentConfig& cfg, const Thresholds& thresholds,
                     const std::vector<double>& deltas, const RngRoot& root,
                     unsigned workers = 1);

/// Calibrates at cfg.clutter.delta (purpose Calibration), then sweeps with
/// purpose CfarSweep.
CfarTable cfar_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas,
                     const RngRoot& root, unsigned workers = 1);

enum class StudyAxis { K, P, L };

struct StudyEntry {
  Index value = 0;
  Curves curves;
};

std::vector<StudyEntry> run_parameter_study(const ExperimentConfig& base, StudyAxis axis,
                                            const std::vector<Index>& values,
                                            const RngRoot& root, unsigned workers = 1);

ExperimentConfig with_axis(const ExperimentConfig& base, StudyAxis axis, Index value);

// Binomial helpers.

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at two-sided
/// confidence `level`.
Interval wilson_interval(std::size_t successes, std::size_t trials, double level = 0.95);

/// Exact two-sided acceptance band of counts [lo, hi] for Binomial(n, p):
/// lo is the smallest k with CDF(k) >= (1-level)/2 and hi the smallest k
/// with CDF(k) >= 1 - (1-level)/2.
struct CountBand {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool contains(std::size_t k) const { return k >= lo && k <= hi; }
};
CountBand binomial_band(std::size_t n, double p, double level = 0.99);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace aiedet

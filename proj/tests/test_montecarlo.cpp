#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "aiedet/montecarlo.hpp"

using namespace aiedet;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.clutter.n = 4;
  cfg.clutter.k = 2;
  cfg.clutter.l = 6;
  cfg.clutter.p = 1;
  cfg.pfa = 0.05;
  cfg.threshold_trials = 400;
  cfg.pd_trials = 200;
  cfg.scr_db = {-5.0, 5.0, 15.0};
  cfg.seed = 77;
  return cfg;
}

}  // namespace

TEST(Threshold, OrderStatistic) {
  std::vector<double> s(1000);
  std::iota(s.begin(), s.end(), 1.0);
  const ThresholdRecord r = threshold_from_statistics(Detector::AieRao, s, 0.01, 3);
  EXPECT_EQ(r.threshold, 991.0);
  EXPECT_DOUBLE_EQ(r.pfa_achieved, 0.01);
  EXPECT_EQ(r.trials, 1000u);
  EXPECT_EQ(count_exceedances(s, r.threshold), 10u);
}

TEST(Threshold, AtLeastOneExceedance) {
  std::vector<double> s{3.0, 1.0, 2.0};
  const ThresholdRecord r = threshold_from_statistics(Detector::AieRao, s, 1e-3, 0);
  EXPECT_EQ(r.threshold, 3.0);
  EXPECT_DOUBLE_EQ(r.pfa_achieved, 1.0 / 3.0);
}

TEST(Threshold, IgnoresNonFinite) {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 0.0);
  s[99] = std::numeric_limits<double>::quiet_NaN();
  const ThresholdRecord r = threshold_from_statistics(Detector::AieRao, s, 0.02, 0);
  EXPECT_EQ(r.trials, 99u);
  EXPECT_EQ(r.threshold, 97.0);
  EXPECT_EQ(count_exceedances(s, 97.0), 2u);
}

TEST(Binomial, ExactBand) {
  const CountBand b = binomial_band(10000, 0.01, 0.99);
  EXPECT_EQ(b.lo, 75u);
  EXPECT_EQ(b.hi, 127u);
  const CountBand c = binomial_band(1000, 0.05, 0.99);
  EXPECT_EQ(c.lo, 33u);
  EXPECT_EQ(c.hi, 69u);
}

TEST(Binomial, WilsonInterval) {
  const Interval a = wilson_interval(10, 100);
  EXPECT_NEAR(a.low, 0.05522913706067509, 1e-12);
  EXPECT_NEAR(a.high, 0.17436566150491348, 1e-12);
  const Interval z = wilson_interval(0, 50);
  EXPECT_NEAR(z.low, 0.0, 1e-15);
  EXPECT_NEAR(z.high, 0.07134759913335874, 1e-12);
}

TEST(Config, ValidationErrors) {
  ExperimentConfig cfg = small_config();
  cfg.detectors.clear();
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = small_config();
  cfg.threshold_trials = 100;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = small_config();
  cfg.clutter.l = 3;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  EXPECT_NO_THROW(small_config().validate());
  EXPECT_EQ(default_threshold_trials(1e-3), 100000u);
}

TEST(Engine, WorkerCountDoesNotChangeResults) {
  const ExperimentConfig cfg = small_config();
  const RngRoot root{cfg.seed, StreamPurpose::Test};
  const TrialRecipe recipe{Hypothesis::H1, 2.0, 0.9};
  const StatisticTable a = run_trials(cfg, cfg.detectors, recipe, 150, root, 1);
  const StatisticTable b = run_trials(cfg, cfg.detectors, recipe, 150, root, 8);
  ASSERT_EQ(a.statistics.size(), b.statistics.size());
  for (std::size_t d = 0; d < a.statistics.size(); ++d) {
    for (std::size_t t = 0; t < 150; ++t) {
      ASSERT_EQ(std::memcmp(&a.statistics[d][t], &b.statistics[d][t], sizeof(double)), 0);
    }
  }
}

TEST(Engine, ThresholdGrowsAsPfaShrinks) {
  ExperimentConfig cfg = small_config();
  const RngRoot root{cfg.seed, StreamPurpose::Calibration};
  const Thresholds loose = calibrate_thresholds(cfg, root);
  cfg.pfa = 0.01;
  cfg.threshold_trials = 1000;
  const Thresholds tight = calibrate_thresholds(cfg, root);
  for (Detector d : cfg.detectors) {
    EXPECT_GT(tight.at(d).threshold, loose.at(d).threshold) << to_string(d);
  }
}

TEST(Engine, CfarAtReferenceReproducesCalibration) {
  const ExperimentConfig cfg = small_config();
  const RngRoot root{cfg.seed, StreamPurpose::Calibration};
  const Thresholds th = calibrate_thresholds(cfg, root);
  const CfarTable table = cfar_sweep(cfg, th, {cfg.clutter.delta}, root);
  for (Detector d : cfg.detectors) {
    EXPECT_DOUBLE_EQ(table.at(d).front().rate, th.at(d).pfa_achieved) << to_string(d);
  }
}

TEST(Engine, CurveEndpoints) {
  ExperimentConfig cfg = small_config();
  cfg.scr_db = {-30.0, 40.0};
  const Curves curves = pd_vs_scr_curve(cfg, RngRoot{cfg.seed, StreamPurpose::Calibration});
  for (Detector d : cfg.detectors) {
    const auto& pts = curves.at(d);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_LT(pts[0].pd, 0.2) << to_string(d);
    EXPECT_GT(pts[1].pd, 0.95) << to_string(d);
    EXPECT_LE(pts[1].ci_low, pts[1].pd);
    EXPECT_GE(pts[1].ci_high, pts[1].pd);
    EXPECT_EQ(pts[1].trials, cfg.pd_trials);
  }
}

TEST(Engine, StudyAxisOverrides) {
  const ExperimentConfig base = small_config();
  EXPECT_EQ(with_axis(base, StudyAxis::K, 5).clutter.k, 5);
  EXPECT_EQ(with_axis(base, StudyAxis::P, 3).clutter.p, 3);
  EXPECT_EQ(with_axis(base, StudyAxis::L, 9).clutter.l, 9);
  EXPECT_THROW(with_axis(base, StudyAxis::L, 2), InvalidParameter);
}

TEST(Engine, DbConversion) {
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_DOUBLE_EQ(db_to_linear(-20.0), 0.01);
}

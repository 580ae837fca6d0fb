#pragma once

// Alternating iterative estimation (AIE) of the signal coordinates Psi and
// the power mismatches sigma, and the detectors built on it: AIE-GLRT,
// AIE-Rao, AIE-Wald, plus the ANMF with recursive covariance estimate
// (ANMF-RE) as the reference competitor.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aiedet/core.hpp"

namespace aiedet {

enum class Detector {
  AieGlrt,
  AieRao,
  AieWald,
  AnmfRe,
  // Raw CUT energy tr(Z^H Z). Not CFAR; kept as a negative control.
  EnergyControl,
};

std::string_view to_string(Detector d);
/// Accepts the names produced by to_string ("aie-glrt", "anmf-re", ...).
std::optional<Detector> detector_from_string(std::string_view name);

struct AieSettings {
  int n_max = 15;
  // Lower bound on every sigma estimate. sigma is a power ratio relative to
  // the CUT covariance and carries no data scale.
  double sigma_floor = 1e-8;

  void validate() const;
};

struct EstimationResult {
  SigmaVector sigma_h1;
  SigmaVector sigma_h0;
  CMatrix psi;  // p x K, final iterate under H1

  // Xi_h = (L+K) * R_hat_h, factorized.
  std::optional<HermitianPD> xi_h1;
  std::optional<HermitianPD> xi_h0;

  // Relative covariance change between consecutive iterates, one entry per
  // iteration. delta_r_* is |(||R+|| - ||R||)| / ||R||; delta_r_diff_* is
  // ||R+ - R|| / ||R|| (diagnostic only).
  std::vector<double> delta_r_h1;
  std::vector<double> delta_r_h0;
  std::vector<double> delta_r_diff_h1;
  std::vector<double> delta_r_diff_h0;

  CMatrix r_hat_h1(Index l_plus_k) const;
  CMatrix r_hat_h0(Index l_plus_k) const;
};

struct DetectorStatistic {
  double value = 0.0;
  Detector detector = Detector::AieGlrt;
  bool log_domain = false;
};

/// sigma_l^(0) = z_l^H (Z Z^H)^- z_l, floored.
SigmaVector initial_sigma(const DetectionInput& in, double sigma_floor);

/// Omega = sum_l z_l z_l^H / sigma_l.
CMatrix training_gram(const DetectionInput& in, const SigmaVector& sigma);

/// Psi = (H^H Omega^{-1} H)^{-1} H^H Omega^{-1} Z.
CMatrix update_psi(const DetectionInput& in, const SigmaVector& sigma);

/// One Gauss-Seidel sweep over h = 1..L:
///   sigma_h <- ((L+K-N)/N) z_h^H Lambda_h^{-1} z_h
/// where Lambda_h is the CUT Gram matrix ((Z - H Psi)(Z - H Psi)^H under H1,
/// Z Z^H under H0) plus z_l z_l^H / sigma_l over l != h, taking the values
/// already updated in this sweep for l < h and `prev` for l > h.
/// `psi` must be present exactly when hyp is H1.
SigmaVector update_sigma(const DetectionInput& in, Hypothesis hyp,
                         const std::optional<CMatrix>& psi, const SigmaVector& prev,
                         double sigma_floor);

/// Runs n_max AIE iterations under both hypotheses from the common start
/// initial_sigma(). Factorization failures are rethrown with the iteration
/// index in the message.
EstimationResult aie_estimate(const DetectionInput& in, const AieSettings& settings);

/// tr[Z^H X^{-1} H (H^H X^{-1} H)^{-1} H^H X^{-1} Z], the kernel shared by
/// AIE-Rao (X = Xi_0), AIE-Wald (X = Xi_1) and the ANMF-RE numerator.
double subspace_energy(const HermitianPD& x, const CMatrix& h, const CMatrix& z);

/// Natural log of the AIE-GLRT ratio, evaluated entirely in log domain.
DetectorStatistic aie_glrt(const DetectionInput& in, const EstimationResult& est);
DetectorStatistic aie_rao(const DetectionInput& in, const EstimationResult& est);
DetectorStatistic aie_wald(const DetectionInput& in, const EstimationResult& est);

/// Trace-normalized recursive covariance estimate, started from the
/// normalized sample covariance and iterated `iterations` times.
HermitianPD recursive_covariance(const CMatrix& z_l, int iterations);
DetectorStatistic anmf_re(const DetectionInput& in, int re_iterations = 4);

DetectorStatistic energy_control(const DetectionInput& in);

/// |(||next||_F - ||prev||_F)| / ||prev||_F
double delta_r(const CMatrix& prev, const CMatrix& next);
/// ||next - prev||_F / ||prev||_F
double delta_r_diff(const CMatrix& prev, const CMatrix& next);

/// Evaluates several detectors on one dataset, running the AIE estimation
/// once if any AIE detector is requested. Output order follows `which`.
std::vector<double> evaluate_detectors(const DetectionInput& in,
                                       const std::vector<Detector>& which,
                                       const AieSettings& settings, int re_iterations = 4);

}  // namespace aiedet

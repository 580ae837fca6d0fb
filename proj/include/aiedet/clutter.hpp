#pragma once

// Compound-Gaussian (K-distributed) clutter with exponentially correlated
// speckle, and subspace targets calibrated to a signal-to-clutter ratio.

#include "aiedet/core.hpp"
#include "aiedet/rng.hpp"

namespace aiedet {

struct ClutterConfig {
  Index n = 8;
  Index k = 3;
  Index l = 16;
  Index p = 2;
  double delta = 0.95;   // one-lag correlation of the speckle
  double shape_v = 1.0;  // texture shape
  double scale_u = 1.0;  // texture mean power

  void validate() const;
};

enum class Scattering { UniformDeterministic, UniformRandomPhase };

struct SignalSpec {
  double scr = 0.0;  // linear
  Scattering mode = Scattering::UniformDeterministic;
};

/// Doppler steering vectors used as the default signal subspace:
/// column j is N^{-1/2} [1, e^{i2pi f_j}, ..., e^{i2pi(N-1)f_j}]^T with
/// f_j = f0 + j*df.
struct SteeringSubspace {
  double f0 = 0.1;
  double df = 0.02;

  CMatrix build(Index n, Index p) const;
};

/// [Sigma]_{a,b} = delta^{|a-b|}.
HermitianPD build_speckle_covariance(Index n, double delta);

/// Gamma draw with shape v and mean u (variance u^2/v).
double sample_texture(double v, double u, PhiloxEngine& rng);

/// sqrt(tau) * Sigma^{1/2} g with g standard circular complex Gaussian.
CMatrix sample_clutter_column(const HermitianPD& sigma, double tau, PhiloxEngine& rng);

/// Signal coordinates Psi (p x K) with tr(Psi^H H^H Sigma^{-1} H Psi) = scr,
/// the energy split equally across the K columns.
CMatrix synthesize_signal(const CMatrix& h, const HermitianPD& sigma, const SignalSpec& spec,
                          Index k, PhiloxEngine& phase_rng);

/// One synthetic (Z, Z_L, H). Every column of Z and Z_L draws its own
/// texture. Under H1 the K columns of H*Psi are added to Z.
DetectionInput generate_dataset(const ClutterConfig& cfg, const CMatrix& h,
                                const SignalSpec& spec, Hypothesis hyp, TrialStreams& streams);

DetectionInput generate_dataset(const ClutterConfig& cfg, const SignalSpec& spec,
                                Hypothesis hyp, TrialStreams& streams);

/// Reuses a precomputed Sigma; used by the Monte Carlo engine.
DetectionInput generate_dataset(const ClutterConfig& cfg, const HermitianPD& sigma,
                                const CMatrix& h, const SignalSpec& spec, Hypothesis hyp,
                                TrialStreams& streams);

}  // namespace aiedet

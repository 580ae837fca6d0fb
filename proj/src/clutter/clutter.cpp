#include "aiedet/clutter.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace aiedet {
namespace {

CVector complex_gaussian(Index n, PhiloxEngine& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  CVector g(n);
  for (Index i = 0; i < n; ++i) {
    const double re = half(rng);
    const double im = half(rng);
    g(i) = Complex(re, im);
  }
  return g;
}

CVector colored_column(const CMatrix& lower, double tau, PhiloxEngine& rng) {
  CVector x = lower.triangularView<Eigen::Lower>() * complex_gaussian(lower.rows(), rng);
  return std::sqrt(tau) * x;
}

}  // namespace

void ClutterConfig::validate() const {
  validate_dimensions(n, k, l, p);
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidParameter("delta must lie in [0, 1)");
  }
  if (!(shape_v > 0.0) || !std::isfinite(shape_v)) {
    throw InvalidParameter("texture shape v must be positive");
  }
  if (!(scale_u > 0.0) || !std::isfinite(scale_u)) {
    throw InvalidParameter("texture scale u must be positive");
  }
}

CMatrix SteeringSubspace::build(Index n, Index p) const {
  CMatrix h(n, p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < p; ++j) {
    const double f = f0 + static_cast<double>(j) * df;
    for (Index i = 0; i < n; ++i) {
      h(i, j) = norm * std::polar(1.0, 2.0 * std::numbers::pi * f * static_cast<double>(i));
    }
  }
  return h;
}

HermitianPD build_speckle_covariance(Index n, double delta) {
  if (n < 1) throw InvalidParameter("speckle covariance: N must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidParameter("speckle covariance: delta must lie in [0, 1)");
  }
  CMatrix s(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      s(a, b) = std::pow(delta, static_cast<double>(std::abs(a - b)));
    }
  }
  return HermitianPD(std::move(s));
}

double sample_texture(double v, double u, PhiloxEngine& rng) {
  std::gamma_distribution<double> gamma(v, u / v);
  return gamma(rng);
}

CMatrix sample_clutter_column(const HermitianPD& sigma, double tau, PhiloxEngine& rng) {
  if (!(tau > 0.0)) throw InvalidParameter("texture must be positive");
  return colored_column(sigma.lower(), tau, rng);
}

CMatrix synthesize_signal(const CMatrix& h, const HermitianPD& sigma, const SignalSpec& spec,
                          Index k, PhiloxEngine& phase_rng) {
  if (!(spec.scr >= 0.0) || !std::isfinite(spec.scr)) {
    throw InvalidParameter("SCR must be finite and non-negative");
  }
  if (h.rows() != sigma.dim() || k < 1) {
    throw InvalidParameter("synthesize_signal: shape mismatch");
  }
  const Index p = h.cols();
  CMatrix psi = CMatrix::Ones(p, k);
  if (spec.scr == 0.0) return CMatrix::Zero(p, k);

  // Every column of the all-ones base has the same whitened energy.
  const CMatrix wh = sigma.whiten(h * psi.col(0));
  const double base_energy = wh.squaredNorm();
  psi *= std::sqrt(spec.scr / (static_cast<double>(k) * base_energy));

  if (spec.mode == Scattering::UniformRandomPhase) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (Index c = 0; c < k; ++c) psi.col(c) *= std::polar(1.0, angle(phase_rng));
  }
  return psi;
}

DetectionInput generate_dataset(const ClutterConfig& cfg, const HermitianPD& sigma,
                                const CMatrix& h, const SignalSpec& spec, Hypothesis hyp,
                                TrialStreams& streams) {
  const CMatrix lower = sigma.lower();
  CMatrix z(cfg.n, cfg.k);
  CMatrix z_l(cfg.n, cfg.l);
  for (Index c = 0; c < cfg.k; ++c) {
    const double tau = sample_texture(cfg.shape_v, cfg.scale_u, streams.texture);
    z.col(c) = colored_column(lower, tau, streams.speckle);
  }
  for (Index c = 0; c < cfg.l; ++c) {
    const double tau = sample_texture(cfg.shape_v, cfg.scale_u, streams.texture);
    z_l.col(c) = colored_column(lower, tau, streams.speckle);
  }
  if (hyp == Hypothesis::H1) {
    z += h * synthesize_signal(h, sigma, spec, cfg.k, streams.phase);
  }
  return DetectionInput(std::move(z), std::move(z_l), h);
}

DetectionInput generate_dataset(const ClutterConfig& cfg, const CMatrix& h,
                                const SignalSpec& spec, Hypothesis hyp, TrialStreams& streams) {
  cfg.validate();
  if (h.rows() != cfg.n || h.cols() != cfg.p) {
    throw InvalidParameter("subspace matrix shape does not match (N, p)");
  }
  return generate_dataset(cfg, build_speckle_covariance(cfg.n, cfg.delta), h, spec, hyp,
                          streams);
}

DetectionInput generate_dataset(const ClutterConfig& cfg, const SignalSpec& spec,
                                Hypothesis hyp, TrialStreams& streams) {
  return generate_dataset(cfg, SteeringSubspace{}.build(cfg.n, cfg.p), spec, hyp, streams);
}

}  // namespace aiedet

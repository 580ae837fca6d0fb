#include <array>
#include <cmath>

#include "aiedet/detectors.hpp"

namespace aiedet {
namespace {

constexpr std::array<std::pair<Detector, std::string_view>, 5> kNames{{
    {Detector::AieGlrt, "aie-glrt"},
    {Detector::AieRao, "aie-rao"},
    {Detector::AieWald, "aie-wald"},
    {Detector::AnmfRe, "anmf-re"},
    {Detector::EnergyControl, "energy"},
}};

const HermitianPD& require(const std::optional<HermitianPD>& xi, const char* what) {
  if (!xi) throw InvalidParameter(std::string("estimation result lacks ") + what);
  return *xi;
}

bool is_aie(Detector d) {
  return d == Detector::AieGlrt || d == Detector::AieRao || d == Detector::AieWald;
}

}  // namespace

std::string_view to_string(Detector d) {
  for (const auto& [det, name] : kNames) {
    if (det == d) return name;
  }
  return "unknown";
}

std::optional<Detector> detector_from_string(std::string_view name) {
  for (const auto& [det, n] : kNames) {
    if (n == name) return det;
  }
  return std::nullopt;
}

double subspace_energy(const HermitianPD& x, const CMatrix& h, const CMatrix& z) {
  const CMatrix wh = x.whiten(h);
  const CMatrix wz = x.whiten(z);
  const CMatrix m = wh.adjoint() * wz;  // H^H X^{-1} Z
  const HermitianPD g(hermitian_part(wh.adjoint() * wh));
  return g.whiten(m).squaredNorm();
}

DetectorStatistic aie_glrt(const DetectionInput& in, const EstimationResult& est) {
  const HermitianPD& xi0 = require(est.xi_h0, "Xi_0");
  const HermitianPD& xi1 = require(est.xi_h1, "Xi_1");
  const double exponent = static_cast<double>(in.n()) / static_cast<double>(in.l() + in.k());
  const double log_sigma_ratio =
      est.sigma_h0.array().log().sum() - est.sigma_h1.array().log().sum();
  const double value = exponent * log_sigma_ratio + xi0.logdet() - xi1.logdet();
  return {value, Detector::AieGlrt, true};
}

DetectorStatistic aie_rao(const DetectionInput& in, const EstimationResult& est) {
  return {subspace_energy(require(est.xi_h0, "Xi_0"), in.h(), in.z()), Detector::AieRao, false};
}

DetectorStatistic aie_wald(const DetectionInput& in, const EstimationResult& est) {
  return {subspace_energy(require(est.xi_h1, "Xi_1"), in.h(), in.z()), Detector::AieWald,
          false};
}

HermitianPD recursive_covariance(const CMatrix& z_l, int iterations) {
  if (iterations < 1) throw InvalidParameter("recursive estimator needs >= 1 iteration");
  const Index n = z_l.rows();
  const Index l = z_l.cols();
  if (l < n) throw InvalidParameter("recursive estimator needs L >= N");
  const double nd = static_cast<double>(n);

  CMatrix sample = hermitian_part(z_l * z_l.adjoint()) / static_cast<double>(l);
  HermitianPD r(sample * (nd / sample.trace().real()));
  for (int it = 0; it < iterations; ++it) {
    const Eigen::RowVectorXd q = r.whiten(z_l).colwise().squaredNorm();
    CMatrix omega = CMatrix::Zero(n, n);
    for (Index c = 0; c < l; ++c) {
      if (!(q(c) > 0.0)) {
        throw DegenerateSample("training sample " + std::to_string(c) +
                               " has non-positive quadratic form");
      }
      const CVector w = z_l.col(c) / std::sqrt(q(c));
      omega += w * w.adjoint();
    }
    omega *= nd / static_cast<double>(l);
    r = HermitianPD(omega * (nd / omega.trace().real()));
  }
  return r;
}

DetectorStatistic anmf_re(const DetectionInput& in, int re_iterations) {
  const HermitianPD r = recursive_covariance(in.z_l(), re_iterations);
  const double num = subspace_energy(r, in.h(), in.z());
  const double den = r.whiten(in.z()).squaredNorm();
  if (!(den > 0.0)) throw DegenerateSample("CUT data has zero whitened energy");
  return {num / den, Detector::AnmfRe, false};
}

DetectorStatistic energy_control(const DetectionInput& in) {
  return {in.z().squaredNorm(), Detector::EnergyControl, false};
}

std::vector<double> evaluate_detectors(const DetectionInput& in,
                                       const std::vector<Detector>& which,
                                       const AieSettings& settings, int re_iterations) {
  std::optional<EstimationResult> est;
  for (Detector d : which) {
    if (is_aie(d)) {
      est = aie_estimate(in, settings);
      break;
    }
  }
  std::vector<double> out;
  out.reserve(which.size());
  for (Detector d : which) {
    switch (d) {
      case Detector::AieGlrt: out.push_back(aie_glrt(in, *est).value); break;
      case Detector::AieRao: out.push_back(aie_rao(in, *est).value); break;
      case Detector::AieWald: out.push_back(aie_wald(in, *est).value); break;
      case Detector::AnmfRe: out.push_back(anmf_re(in, re_iterations).value); break;
      case Detector::EnergyControl: out.push_back(energy_control(in).value); break;
    }
  }
  return out;
}

}  // namespace aiedet

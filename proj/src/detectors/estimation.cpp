#include <cmath>
#include <vector>

#include "aiedet/detectors.hpp"

namespace aiedet {
namespace {

// w w^H with w = z / sqrt(s); exactly Hermitian in floating point.
CMatrix scaled_outer(const auto& z, double s) {
  const CVector w = z / std::sqrt(s);
  return w * w.adjoint();
}

CMatrix residual_gram(const DetectionInput& in, const CMatrix* psi) {
  if (psi == nullptr) return hermitian_part(in.z() * in.z().adjoint());
  const CMatrix e = in.z() - in.h() * (*psi);
  return hermitian_part(e * e.adjoint());
}

SigmaVector gauss_seidel_sweep(const DetectionInput& in, const CMatrix& base,
                               const SigmaVector& prev, double sigma_floor) {
  const Index n = in.n();
  const Index l = in.l();
  const double factor = static_cast<double>(l + in.k() - n) / static_cast<double>(n);

  // suffix[h] = sum_{m > h} z_m z_m^H / prev_m
  std::vector<CMatrix> suffix(static_cast<std::size_t>(l));
  suffix[l - 1] = CMatrix::Zero(n, n);
  CVector w(n);
  for (Index h = l - 2; h >= 0; --h) {
    w = in.z_l().col(h + 1) / std::sqrt(prev(h + 1));
    suffix[h] = suffix[h + 1];
    suffix[h].noalias() += w * w.adjoint();
  }

  SigmaVector next(l);
  CMatrix prefix = CMatrix::Zero(n, n);
  CMatrix lambda(n, n);
  Eigen::LLT<CMatrix> llt(n);
  CVector x(n);
  for (Index h = 0; h < l; ++h) {
    lambda = base + prefix + suffix[h];
    llt.compute(lambda);
    if (llt.info() == Eigen::Success) {
      x = llt.matrixL().solve(in.z_l().col(h));
    } else {
      x = HermitianPD(lambda).whiten(in.z_l().col(h));
    }
    next(h) = std::max(factor * x.squaredNorm(), sigma_floor);
    w = in.z_l().col(h) / std::sqrt(next(h));
    prefix.noalias() += w * w.adjoint();
  }
  return next;
}

void check_sigma(const DetectionInput& in, const SigmaVector& sigma) {
  if (sigma.size() != in.l()) {
    throw InvalidParameter("sigma vector length " + std::to_string(sigma.size()) +
                           " does not match L=" + std::to_string(in.l()));
  }
  if (!(sigma.array() > 0.0).all() || !sigma.allFinite()) {
    throw InvalidParameter("sigma entries must be positive and finite");
  }
}

// Xi = base + Omega(sigma), the unnormalized covariance MLE.
CMatrix xi_matrix(const DetectionInput& in, const CMatrix& base, const SigmaVector& sigma) {
  return base + training_gram(in, sigma);
}

template <typename Step>
void with_iteration(const char* hyp, int iteration, Step&& step) {
  try {
    step();
  } catch (const FactorizationFailure& e) {
    throw FactorizationFailure(std::string("AIE ") + hyp + " iteration " +
                               std::to_string(iteration) + ": " + e.what());
  }
}

}  // namespace

void AieSettings::validate() const {
  if (n_max < 1) throw InvalidParameter("AIE iteration cap n_max must be >= 1");
  if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) {
    throw InvalidParameter("sigma floor must be positive");
  }
}

CMatrix EstimationResult::r_hat_h1(Index l_plus_k) const {
  return xi_h1->matrix() / static_cast<double>(l_plus_k);
}

CMatrix EstimationResult::r_hat_h0(Index l_plus_k) const {
  return xi_h0->matrix() / static_cast<double>(l_plus_k);
}

SigmaVector initial_sigma(const DetectionInput& in, double sigma_floor) {
  const CMatrix g = hermitian_part(in.z() * in.z().adjoint());
  return pseudo_quadratic_columns(g, in.z_l()).cwiseMax(sigma_floor);
}

CMatrix training_gram(const DetectionInput& in, const SigmaVector& sigma) {
  check_sigma(in, sigma);
  CMatrix omega = CMatrix::Zero(in.n(), in.n());
  for (Index c = 0; c < in.l(); ++c) omega += scaled_outer(in.z_l().col(c), sigma(c));
  return omega;
}

CMatrix update_psi(const DetectionInput& in, const SigmaVector& sigma) {
  const HermitianPD omega(training_gram(in, sigma));
  const CMatrix wh = omega.whiten(in.h());
  const CMatrix wz = omega.whiten(in.z());
  const HermitianPD normal(hermitian_part(wh.adjoint() * wh));
  return normal.solve(wh.adjoint() * wz);
}

SigmaVector update_sigma(const DetectionInput& in, Hypothesis hyp,
                         const std::optional<CMatrix>& psi, const SigmaVector& prev,
                         double sigma_floor) {
  if ((hyp == Hypothesis::H1) != psi.has_value()) {
    throw InvalidParameter("update_sigma: Psi must be given exactly under H1");
  }
  if (psi && (psi->rows() != in.p() || psi->cols() != in.k())) {
    throw InvalidParameter("update_sigma: Psi must be p x K");
  }
  check_sigma(in, prev);
  const CMatrix base = residual_gram(in, psi ? &*psi : nullptr);
  return gauss_seidel_sweep(in, base, prev, sigma_floor);
}

EstimationResult aie_estimate(const DetectionInput& in, const AieSettings& settings) {
  settings.validate();
  EstimationResult out;
  const SigmaVector start = initial_sigma(in, settings.sigma_floor);
  const auto reserve = static_cast<std::size_t>(settings.n_max);

  // H0: Psi = 0 throughout, so the CUT Gram matrix is fixed.
  {
    const CMatrix base = residual_gram(in, nullptr);
    SigmaVector sigma = start;
    CMatrix xi = xi_matrix(in, base, sigma);
    out.delta_r_h0.reserve(reserve);
    out.delta_r_diff_h0.reserve(reserve);
    for (int it = 0; it < settings.n_max; ++it) {
      with_iteration("H0", it + 1, [&] {
        sigma = gauss_seidel_sweep(in, base, sigma, settings.sigma_floor);
      });
      CMatrix xi_next = xi_matrix(in, base, sigma);
      out.delta_r_h0.push_back(delta_r(xi, xi_next));
      out.delta_r_diff_h0.push_back(delta_r_diff(xi, xi_next));
      xi = std::move(xi_next);
    }
    out.sigma_h0 = sigma;
    with_iteration("H0", settings.n_max, [&] { out.xi_h0.emplace(std::move(xi)); });
  }

  // H1: alternate Psi and sigma. The first covariance iterate uses Psi = 0.
  {
    SigmaVector sigma = start;
    CMatrix psi = CMatrix::Zero(in.p(), in.k());
    CMatrix xi = xi_matrix(in, residual_gram(in, nullptr), sigma);
    out.delta_r_h1.reserve(reserve);
    out.delta_r_diff_h1.reserve(reserve);
    for (int it = 0; it < settings.n_max; ++it) {
      CMatrix base;
      with_iteration("H1", it + 1, [&] {
        psi = update_psi(in, sigma);
        base = residual_gram(in, &psi);
        sigma = gauss_seidel_sweep(in, base, sigma, settings.sigma_floor);
      });
      CMatrix xi_next = xi_matrix(in, base, sigma);
      out.delta_r_h1.push_back(delta_r(xi, xi_next));
      out.delta_r_diff_h1.push_back(delta_r_diff(xi, xi_next));
      xi = std::move(xi_next);
    }
    out.sigma_h1 = sigma;
    out.psi = psi;
    with_iteration("H1", settings.n_max, [&] { out.xi_h1.emplace(std::move(xi)); });
  }
  return out;
}

double delta_r(const CMatrix& prev, const CMatrix& next) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols()) {
    throw InvalidParameter("delta_r: dimension mismatch");
  }
  const double base = prev.norm();
  if (!(base > 0.0)) throw InvalidParameter("delta_r: previous iterate has zero norm");
  return std::abs(next.norm() - base) / base;
}

double delta_r_diff(const CMatrix& prev, const CMatrix& next) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols()) {
    throw InvalidParameter("delta_r: dimension mismatch");
  }
  const double base = prev.norm();
  if (!(base > 0.0)) throw InvalidParameter("delta_r: previous iterate has zero norm");
  return (next - prev).norm() / base;
}

}  // namespace aiedet

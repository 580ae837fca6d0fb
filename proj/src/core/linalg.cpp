#include "aiedet/core.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace aiedet {

void require_finite(const CMatrix& m, const std::string& what) {
  if (m.allFinite()) return;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InvalidParameter(what + ": non-finite entry at (" + std::to_string(i) + ", " +
                               std::to_string(j) + ")");
      }
    }
  }
}

CMatrix hermitian_part(const CMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

HermitianPD::HermitianPD(CMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw InvalidParameter("HermitianPD: matrix must be square and non-empty");
  }
  require_finite(matrix_, "HermitianPD");
  const double fro = matrix_.norm();
  const double asym = std::sqrt((matrix_ - matrix_.adjoint()).cwiseAbs2().maxCoeff());
  if (asym > 1e-12 * fro) {
    throw InvalidParameter("HermitianPD: matrix is not Hermitian (asymmetry " +
                           std::to_string(asym) + ")");
  }

  llt_.compute(matrix_);
  if (llt_.info() == Eigen::Success) return;

  const double mean_diag = matrix_.diagonal().real().sum() / static_cast<double>(dim());
  static constexpr std::array<double, 3> kEps{1e-12, 1e-10, 1e-8};
  for (double eps : kEps) {
    const double j = eps * std::abs(mean_diag);
    if (!(j > 0.0)) break;
    CMatrix shifted = matrix_;
    shifted.diagonal().array() += j;
    llt_.compute(shifted);
    if (llt_.info() == Eigen::Success) {
      matrix_ = std::move(shifted);
      jitter_ = j;
      return;
    }
  }
  throw FactorizationFailure("Cholesky factorization failed after maximum jitter (dim " +
                             std::to_string(dim()) + ")");
}

CMatrix HermitianPD::solve(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw InvalidParameter("hermitian_solve: row count mismatch");
  }
  return llt_.solve(b);
}

CMatrix HermitianPD::whiten(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw InvalidParameter("whiten: row count mismatch");
  }
  return llt_.matrixL().solve(b);
}

double HermitianPD::logdet() const {
  // |M| = prod |Lc_ii|^2
  return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
}

CMatrix hermitian_solve(const HermitianPD& a, const CMatrix& b) {
  return a.solve(b);
}

double logdet(const HermitianPD& a) {
  return a.logdet();
}

Eigen::VectorXd pseudo_quadratic_columns(const CMatrix& g, const CMatrix& zs) {
  if (g.rows() != g.cols() || zs.rows() != g.rows()) {
    throw InvalidParameter("pseudo_quadratic: shape mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(zs.cols());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(g);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0)) return out;

  const CMatrix coords = eig.eigenvectors().adjoint() * zs;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > kPinvCutoff * lmax) {
      out += coords.row(i).cwiseAbs2().transpose() / lambda(i);
    }
  }
  return out;
}

double pseudo_quadratic(const CMatrix& g, const CMatrix& z) {
  if (z.cols() != 1) throw InvalidParameter("pseudo_quadratic: z must be a column");
  return pseudo_quadratic_columns(g, z)(0);
}

}  // namespace aiedet

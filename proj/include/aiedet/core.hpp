#pragma once

// Shared data model and the Hermitian linear-algebra kernels used by every
// detector: Cholesky-backed solves and log-determinants, and quadratic forms
// through the Moore-Penrose inverse of a PSD matrix.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace aiedet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Power mismatches sigma_l, one per training sample.
using SigmaVector = Eigen::VectorXd;

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FactorizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Hypothesis { H0, H1 };

/// Throws InvalidParameter naming `what` if any entry is NaN or infinite.
void require_finite(const CMatrix& m, const std::string& what);

/// (m + m^H) / 2. Used after assembling sums of outer products so the
/// result is Hermitian to the last bit.
CMatrix hermitian_part(const CMatrix& m);

/// A Hermitian positive-definite matrix together with its Cholesky factor.
///
/// Construction validates the Hermitian property (max |M - M^H| must not
/// exceed 1e-12 ||M||_F) and factorizes. If the plain factorization fails,
/// a diagonal jitter eps * tr(M)/dim is added with eps escalating through
/// 1e-12, 1e-10, 1e-8; after that FactorizationFailure is thrown. The stored
/// matrix is the one that was actually factorized.
class HermitianPD {
 public:
  explicit HermitianPD(CMatrix m);

  Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  double jitter() const { return jitter_; }

  /// Lower Cholesky factor Lc with matrix() = Lc Lc^H.
  CMatrix lower() const { return llt_.matrixL(); }

  /// Returns X with matrix() X = b.
  CMatrix solve(const CMatrix& b) const;
  /// Returns Lc^{-1} b. Then b^H M^{-1} b = (Lc^{-1} b)^H (Lc^{-1} b).
  CMatrix whiten(const CMatrix& b) const;
  double logdet() const;

 private:
  CMatrix matrix_;
  Eigen::LLT<CMatrix> llt_;
  double jitter_ = 0.0;
};

CMatrix hermitian_solve(const HermitianPD& a, const CMatrix& b);
double logdet(const HermitianPD& a);

/// z^H G^- z with G^- the Moore-Penrose inverse of the Hermitian PSD
/// matrix G. Eigenvalues below kPinvCutoff * lambda_max count as zero.
double pseudo_quadratic(const CMatrix& g, const CMatrix& z);

/// pseudo_quadratic(g, zs.col(j)) for every column j, sharing one
/// eigendecomposition of g.
Eigen::VectorXd pseudo_quadratic_columns(const CMatrix& g, const CMatrix& zs);

inline constexpr double kPinvCutoff = 1e-12;

/// The triple (Z, Z_L, H) that every detector consumes.
///
/// Z is N x K (cells under test), Z_L is N x L (training samples), H is
/// N x p (signal subspace). The constructor enforces consistent shapes,
/// finite entries, p <= N, full column rank of H, L >= N and L + K > N.
class DetectionInput {
 public:
  DetectionInput(CMatrix z, CMatrix z_l, CMatrix h);

  const CMatrix& z() const { return z_; }
  const CMatrix& z_l() const { return z_l_; }
  const CMatrix& h() const { return h_; }

  Index n() const { return z_.rows(); }
  Index k() const { return z_.cols(); }
  Index l() const { return z_l_.cols(); }
  Index p() const { return h_.cols(); }

  /// Same subspace, data scaled jointly by c.
  DetectionInput scaled(double c) const;

 private:
  CMatrix z_;
  CMatrix z_l_;
  CMatrix h_;
};

/// Checks the dimension constraints shared by DetectionInput and the
/// simulator configuration.
void validate_dimensions(Index n, Index k, Index l, Index p);

}  // namespace aiedet

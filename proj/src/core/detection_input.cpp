#include "aiedet/core.hpp"

#include <Eigen/SVD>

namespace aiedet {

void validate_dimensions(Index n, Index k, Index l, Index p) {
  if (n < 1 || k < 1 || l < 1 || p < 1) {
    throw InvalidParameter("dimensions N, K, L, p must all be positive");
  }
  if (p > n) {
    throw InvalidParameter("subspace rank p=" + std::to_string(p) + " exceeds N=" +
                           std::to_string(n));
  }
  if (l < n) {
    throw InvalidParameter("need L >= N (L=" + std::to_string(l) + ", N=" + std::to_string(n) +
                           ")");
  }
  if (l + k <= n) {
    throw InvalidParameter("need L + K > N");
  }
}

DetectionInput::DetectionInput(CMatrix z, CMatrix z_l, CMatrix h)
    : z_(std::move(z)), z_l_(std::move(z_l)), h_(std::move(h)) {
  if (z_l_.rows() != z_.rows() || h_.rows() != z_.rows()) {
    throw InvalidParameter("row counts of Z (" + std::to_string(z_.rows()) + "), Z_L (" +
                           std::to_string(z_l_.rows()) + ") and H (" +
                           std::to_string(h_.rows()) + ") differ");
  }
  validate_dimensions(z_.rows(), z_.cols(), z_l_.cols(), h_.cols());
  require_finite(z_, "Z");
  require_finite(z_l_, "Z_L");
  require_finite(h_, "H");

  Eigen::JacobiSVD<CMatrix> svd(h_);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-10 * s(0))) {
    throw InvalidParameter("H does not have full column rank");
  }
}

DetectionInput DetectionInput::scaled(double c) const {
  return DetectionInput(z_ * c, z_l_ * c, h_);
}

}  // namespace aiedet

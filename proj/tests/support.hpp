#pragma once

#include <random>

#include "aiedet/core.hpp"
#include "oracle/direct.hpp"

namespace testing_support {

using aiedet::CMatrix;
using aiedet::Complex;
using aiedet::Index;

inline CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

inline CMatrix random_hpd(Index n, std::mt19937_64& rng) {
  const CMatrix a = random_matrix(n, n + 2, rng);
  return aiedet::hermitian_part(a * a.adjoint()) + 0.1 * CMatrix::Identity(n, n);
}

inline oracle::Mat to_oracle(const CMatrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    }
  }
  return out;
}

inline aiedet::DetectionInput random_input(Index n, Index k, Index l, Index p,
                                           std::mt19937_64& rng) {
  return aiedet::DetectionInput(random_matrix(n, k, rng), random_matrix(n, l, rng),
                                random_matrix(n, p, rng));
}

inline oracle::Problem to_problem(const aiedet::DetectionInput& in) {
  return oracle::Problem{to_oracle(in.z()), to_oracle(in.z_l()), to_oracle(in.h())};
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace testing_support

#pragma once

// Direct-assembly reference implementations used only by the tests.
// Plain row-major complex matrices, Gauss-Jordan inverses and LU
// determinants; nothing here touches the library or Eigen.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct Mat {
  std::size_t r = 0;
  std::size_t c = 0;
  std::vector<C> v;

  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : r(rows), c(cols), v(rows * cols) {}

  C& operator()(std::size_t i, std::size_t j) { return v[i * c + j]; }
  C operator()(std::size_t i, std::size_t j) const { return v[i * c + j]; }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat col(std::size_t j) const {
    Mat out(r, 1);
    for (std::size_t i = 0; i < r; ++i) out(i, 0) = (*this)(i, j);
    return out;
  }
};

inline Mat operator*(const Mat& a, const Mat& b) {
  if (a.c != b.r) throw std::logic_error("oracle: product shape");
  Mat out(a.r, b.c);
  for (std::size_t i = 0; i < a.r; ++i) {
    for (std::size_t j = 0; j < b.c; ++j) {
      C s = 0.0;
      for (std::size_t k = 0; k < a.c; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

inline Mat operator+(Mat a, const Mat& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
  return a;
}

inline Mat operator-(Mat a, const Mat& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
  return a;
}

inline Mat operator*(C s, Mat a) {
  for (auto& x : a.v) x *= s;
  return a;
}

inline Mat adj(const Mat& a) {
  Mat out(a.c, a.r);
  for (std::size_t i = 0; i < a.r; ++i) {
    for (std::size_t j = 0; j < a.c; ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

inline C trace(const Mat& a) {
  C s = 0.0;
  for (std::size_t i = 0; i < a.r; ++i) s += a(i, i);
  return s;
}

/// Gauss-Jordan elimination with partial pivoting on [A | I].
inline Mat inverse(const Mat& a) {
  const std::size_t n = a.r;
  Mat m = a;
  Mat inv = Mat::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    }
    if (std::abs(m(piv, col)) == 0.0) throw std::runtime_error("oracle: singular matrix");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(m(col, j), m(piv, j));
      std::swap(inv(col, j), inv(piv, j));
    }
    const C d = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const C f = m(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Determinant by LU elimination with partial pivoting.
inline C det(Mat m) {
  const std::size_t n = m.r;
  C d = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      d = -d;
    }
    const C p = m(col, col);
    if (std::abs(p) == 0.0) return 0.0;
    d *= p;
    for (std::size_t i = col + 1; i < n; ++i) {
      const C f = m(i, col) / p;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return d;
}

/// Determinant by cofactor expansion along the first row (small n only).
inline C det_cofactor(const Mat& m) {
  const std::size_t n = m.r;
  if (n == 1) return m(0, 0);
  C s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Mat minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        minor(i - 1, cc++) = m(i, k);
      }
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * m(0, j) * det_cofactor(minor);
  }
  return s;
}

/// z^H (Z Z^H)^+ z through Z^+ = (Z^H Z)^{-1} Z^H, valid for full column
/// rank Z: (Z Z^H)^+ = (Z^+)^H Z^+.
inline double pinv_quadratic(const Mat& z_cut, const Mat& z) {
  const Mat zp = inverse(adj(z_cut) * z_cut) * adj(z_cut);
  const Mat y = zp * z;
  double s = 0.0;
  for (const C& x : y.v) s += std::norm(x);
  return s;
}

inline Mat outer_over(const Mat& z, double s) {
  return C(1.0 / s) * (z * adj(z));
}

struct Problem {
  Mat z;    // N x K
  Mat zl;   // N x L
  Mat h;    // N x p
};

struct Estimates {
  std::vector<double> sigma0;
  std::vector<double> sigma1;
  Mat psi;
  Mat xi0;
  Mat xi1;
};

inline Mat omega_of(const Problem& pr, const std::vector<double>& sigma) {
  Mat o(pr.z.r, pr.z.r);
  for (std::size_t l = 0; l < pr.zl.c; ++l) o = o + outer_over(pr.zl.col(l), sigma[l]);
  return o;
}

inline Mat psi_of(const Problem& pr, const std::vector<double>& sigma) {
  const Mat oi = inverse(omega_of(pr, sigma));
  return inverse(adj(pr.h) * oi * pr.h) * adj(pr.h) * oi * pr.z;
}

inline double quad(const Mat& a_inv, const Mat& z) {
  return (adj(z) * a_inv * z)(0, 0).real();
}

/// Lambda_h assembled explicitly from the documented index split.
inline Mat lambda_of(const Problem& pr, const Mat& base, const std::vector<double>& updated,
                     const std::vector<double>& previous, std::size_t h) {
  Mat lam = base;
  for (std::size_t l = 0; l < pr.zl.c; ++l) {
    if (l < h) lam = lam + outer_over(pr.zl.col(l), updated[l]);
    if (l > h) lam = lam + outer_over(pr.zl.col(l), previous[l]);
  }
  return lam;
}

inline std::vector<double> sweep(const Problem& pr, const Mat& base,
                                 const std::vector<double>& prev, double floor) {
  const double n = static_cast<double>(pr.z.r);
  const double factor = (static_cast<double>(pr.zl.c + pr.z.c) - n) / n;
  std::vector<double> next(prev.size());
  for (std::size_t h = 0; h < prev.size(); ++h) {
    const Mat lam = lambda_of(pr, base, next, prev, h);
    next[h] = std::max(factor * quad(inverse(lam), pr.zl.col(h)), floor);
  }
  return next;
}

inline Estimates estimate(const Problem& pr, int n_max, double floor) {
  std::vector<double> start(pr.zl.c);
  for (std::size_t l = 0; l < pr.zl.c; ++l) {
    start[l] = std::max(pinv_quadratic(pr.z, pr.zl.col(l)), floor);
  }
  Estimates e;
  const Mat g0 = pr.z * adj(pr.z);
  e.sigma0 = start;
  for (int it = 0; it < n_max; ++it) e.sigma0 = sweep(pr, g0, e.sigma0, floor);
  e.sigma1 = start;
  for (int it = 0; it < n_max; ++it) {
    e.psi = psi_of(pr, e.sigma1);
    const Mat r = pr.z - pr.h * e.psi;
    e.sigma1 = sweep(pr, r * adj(r), e.sigma1, floor);
  }
  const Mat r = pr.z - pr.h * e.psi;
  e.xi0 = g0 + omega_of(pr, e.sigma0);
  e.xi1 = r * adj(r) + omega_of(pr, e.sigma1);
  return e;
}

/// The GLRT ratio evaluated directly as a product and determinant ratio.
inline double glrt_ratio(const Problem& pr, const Estimates& e) {
  double prod0 = 1.0;
  double prod1 = 1.0;
  for (double s : e.sigma0) prod0 *= s;
  for (double s : e.sigma1) prod1 *= s;
  const double expo =
      static_cast<double>(pr.z.r) / static_cast<double>(pr.zl.c + pr.z.c);
  return std::pow(prod0 / prod1, expo) * (det(e.xi0) / det(e.xi1)).real();
}

inline double projected_energy(const Mat& x, const Mat& h, const Mat& z) {
  const Mat xi = inverse(x);
  const Mat m = adj(z) * xi * h * inverse(adj(h) * xi * h) * adj(h) * xi * z;
  return trace(m).real();
}

inline double whitened_energy(const Mat& x, const Mat& z) {
  return trace(adj(z) * inverse(x) * z).real();
}

inline Mat recursive_estimate(const Mat& zl, int iterations) {
  const std::size_t n = zl.r;
  const double nd = static_cast<double>(n);
  Mat s = C(1.0 / static_cast<double>(zl.c)) * (zl * adj(zl));
  Mat r = C(nd / trace(s).real()) * s;
  for (int it = 0; it < iterations; ++it) {
    const Mat ri = inverse(r);
    Mat o(n, n);
    for (std::size_t l = 0; l < zl.c; ++l) o = o + outer_over(zl.col(l), quad(ri, zl.col(l)));
    o = C(nd / static_cast<double>(zl.c)) * o;
    r = C(nd / trace(o).real()) * o;
  }
  return r;
}

inline double anmf(const Problem& pr, int iterations) {
  const Mat r = recursive_estimate(pr.zl, iterations);
  return projected_energy(r, pr.h, pr.z) / whitened_energy(r, pr.z);
}

/// ln f(s) with f(s) = s^N |Lambda + z z^H / s|^{L+K}.
inline double log_sigma_objective(const Mat& lambda, const Mat& z, double s, std::size_t l_plus_k) {
  const double n = static_cast<double>(lambda.r);
  const C d = det(lambda + outer_over(z, s));
  return n * std::log(s) + static_cast<double>(l_plus_k) * std::log(d.real());
}

}  // namespace oracle

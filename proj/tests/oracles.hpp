#pragma once

// Test-only reference computations. Nothing in here calls into the library's
// eigensolvers or propagators, so results can be used to check them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi rotations on its real
/// 2n x 2n embedding [[Re, -Im], [Im, Re]] (every eigenvalue appears twice).
inline std::vector<double> hermitian_eigenvalues(const Matrix& h) {
  const auto n = h.rows();
  Eigen::MatrixXd a(2 * n, 2 * n);
  a.topLeftCorner(n, n) = h.real();
  a.topRightCorner(n, n) = -h.imag();
  a.bottomLeftCorner(n, n) = h.imag();
  a.bottomRightCorner(n, n) = h.real();
  const auto m = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev;
  for (Eigen::Index k = 0; k < m; ++k) ev.push_back(a(k, k));
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < ev.size(); k += 2) out.push_back(0.5 * (ev[k] + ev[k + 1]));
  return out;
}

/// exp(-i H t) by a product of short Taylor-summed steps (no squaring).
inline Matrix taylor_exp(const Matrix& h, double t, int steps = 64) {
  const auto n = h.rows();
  const Matrix gen = Complex(0.0, -t / steps) * h;
  Matrix step = Matrix::Identity(n, n), term = Matrix::Identity(n, n);
  for (int k = 1; k < 60; ++k) {
    term = term * gen / static_cast<double>(k);
    step += term;
  }
  Matrix out = Matrix::Identity(n, n);
  for (int k = 0; k < steps; ++k) out = step * out;
  return out;
}

/// Central difference of a matrix-valued function.
template <class F>
Matrix central_difference(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * scale * (m + m.adjoint());
}

inline Vector random_state(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v.normalized();
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(n, n);
}

}  // namespace oracle

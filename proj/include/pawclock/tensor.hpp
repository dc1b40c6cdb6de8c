#pragma once

// Dense complex linear algebra over small tensor-product Hilbert spaces.
//
// Ordering convention: in every tensor product the leftmost factor is the
// slowest-varying index. Operators are Eigen::MatrixXcd, states are
// Eigen::VectorXcd. hbar = 1 throughout.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pawclock/errors.hpp"

namespace pawclock {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double kHermiticity = 1e-12;  // relative to max |O_ij|
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kNormalization = 1e-12;
inline constexpr double kDegeneracy = 1e-9;  // relative to ||O||
inline constexpr double kKernel = 1e-9;      // relative to ||O||
}  // namespace tol

inline Operator identity(std::size_t d) { return Operator::Identity(d, d); }

inline Operator pauli_x() {
  Operator m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Operator pauli_y() {
  Operator m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline Operator pauli_z() {
  Operator m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

inline Ket basis_ket(std::size_t d, std::size_t k) {
  Ket v = Ket::Zero(d);
  v(k) = 1.0;
  return v;
}

inline double max_abs(const Operator& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Operator 2-norm (largest singular value).
inline double op_norm(const Operator& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Operator> svd(m);
  return svd.singularValues()(0);
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline bool is_hermitian(const Operator& o, double rel_tol = tol::kHermiticity) {
  if (o.rows() != o.cols()) return false;
  const double scale = std::max(1.0, max_abs(o));
  return max_abs(o - o.adjoint()) <= rel_tol * scale;
}

inline bool is_unitary(const Operator& u, double abs_tol = tol::kUnitarity) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - identity(u.rows())) <= abs_tol;
}

/// Global-phase invariant overlap |<x|y>| / (||x|| ||y||).
inline double fidelity(const Ket& x, const Ket& y) {
  if (x.size() != y.size()) throw DimensionError("fidelity: dimension mismatch");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::abs(x.dot(y)) / (nx * ny);
}

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline Operator tensor_product(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Ket tensor_product(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Operator tensor_product(std::span<const Operator> factors) {
  Operator out = Operator::Identity(1, 1);
  for (const auto& f : factors) out = tensor_product(out, f);
  return out;
}

inline Ket tensor_product(std::span<const Ket> factors) {
  Ket out = Ket::Ones(1);
  for (const auto& f : factors) out = tensor_product(out, f);
  return out;
}

/// 1 ⊗ ... ⊗ op ⊗ ... ⊗ 1 with `op` on factor `site`.
inline Operator embed_local(const Operator& op, std::size_t site, std::span<const std::size_t> dims) {
  if (site >= dims.size())
    throw DimensionError("embed_local: site " + std::to_string(site) + " out of range for " +
                         std::to_string(dims.size()) + " factors");
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != dims[site])
    throw DimensionError("embed_local: operator dimension does not match dims[" +
                         std::to_string(site) + "]");
  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < site; ++k) left *= dims[k];
  for (std::size_t k = site + 1; k < dims.size(); ++k) right *= dims[k];
  return tensor_product(tensor_product(identity(left), op), identity(right));
}

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Operator eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  Ket vector(std::size_t k) const { return eigenvectors.col(static_cast<Eigen::Index>(k)); }

  double norm() const {
    return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
  }

  template <class F>
  Operator apply(F&& f) const {
    Eigen::VectorXcd d(eigenvalues.size());
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) d(k) = f(eigenvalues(k));
    return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
  }

  Operator reconstruct() const {
    return apply([](double x) { return Complex{x, 0.0}; });
  }

  /// exp(-i O t) from the stored decomposition.
  Operator evolve(double t) const {
    return apply([t](double x) { return std::exp(-kI * (x * t)); });
  }
};

inline SpectralDecomposition eig_hermitian(const Operator& o) {
  if (!is_hermitian(o)) throw NotHermitian("eig_hermitian: operator is not Hermitian");
  const Operator sym = 0.5 * (o + o.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Orthonormal basis of the eigenspace with |lambda| <= rel_tol * ||O||.
inline std::vector<Ket> kernel(const Operator& o, double rel_tol = tol::kKernel) {
  const auto spec = eig_hermitian(o);
  const double threshold = rel_tol * spec.norm();
  std::vector<Ket> out;
  for (std::size_t k = 0; k < spec.size(); ++k)
    if (std::abs(spec.eigenvalues(static_cast<Eigen::Index>(k))) <= threshold)
      out.push_back(spec.vector(k));
  return out;
}

inline Operator evolve(const Operator& o, double t) { return eig_hermitian(o).evolve(t); }

struct SchmidtData {
  std::size_t rank = 0;
  std::vector<double> coefficients;  // lambda_n, descending
  std::vector<Ket> left;
  std::vector<Ket> right;

  double coefficient_sum() const {
    return std::accumulate(coefficients.begin(), coefficients.end(), 0.0);
  }

  Ket reconstruct() const {
    Ket out = Ket::Zero(left.empty() ? 0 : left[0].size() * right[0].size());
    for (std::size_t n = 0; n < rank; ++n)
      out += std::sqrt(coefficients[n]) * tensor_product(left[n], right[n]);
    return out;
  }
};

/// Schmidt decomposition across the cut d_left | d_right.
/// Coefficients with sqrt(lambda) below 1e-12 are dropped from the rank.
inline SchmidtData schmidt(const Ket& psi, std::size_t d_left, std::size_t d_right) {
  if (static_cast<std::size_t>(psi.size()) != d_left * d_right)
    throw DimensionError("schmidt: state dimension " + std::to_string(psi.size()) +
                         " != " + std::to_string(d_left) + "*" + std::to_string(d_right));
  Operator m(d_left, d_right);
  for (std::size_t i = 0; i < d_left; ++i)
    for (std::size_t j = 0; j < d_right; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          psi(static_cast<Eigen::Index>(i * d_right + j));
  Eigen::JacobiSVD<Operator> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData out;
  const auto& s = svd.singularValues();
  for (Eigen::Index n = 0; n < s.size(); ++n) {
    if (s(n) <= 1e-12) break;
    out.coefficients.push_back(s(n) * s(n));
    out.left.push_back(svd.matrixU().col(n));
    out.right.push_back(svd.matrixV().col(n).conjugate());
  }
  out.rank = out.coefficients.size();
  return out;
}

/// Reduced operator on the factors listed in `keep` (ascending, unique).
inline Operator partial_trace(const Operator& rho, std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep) {
  const std::size_t total = product(dims);
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total)
    throw DimensionError("partial_trace: operator dimension does not match product of dims");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DimensionError("partial_trace: keep index out of range");
    kept[k] = true;
  }
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) stride[k - 1] = stride[k] * dims[k];

  Dims keep_dims, trace_dims;
  std::vector<std::size_t> keep_stride, trace_stride;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (kept[k] ? keep_dims : trace_dims).push_back(dims[k]);
    (kept[k] ? keep_stride : trace_stride).push_back(stride[k]);
  }
  const std::size_t dk = product(keep_dims);
  const std::size_t dt = product(trace_dims);

  // Full-space offset of a multi-index given in mixed radix over `sub_dims`.
  auto offset = [](std::size_t flat, const Dims& sub_dims, const std::vector<std::size_t>& sub_stride) {
    std::size_t off = 0;
    for (std::size_t k = sub_dims.size(); k-- > 0;) {
      off += (flat % sub_dims[k]) * sub_stride[k];
      flat /= sub_dims[k];
    }
    return off;
  };

  std::vector<std::size_t> keep_off(dk), trace_off(dt);
  for (std::size_t i = 0; i < dk; ++i) keep_off[i] = offset(i, keep_dims, keep_stride);
  for (std::size_t m = 0; m < dt; ++m) trace_off[m] = offset(m, trace_dims, trace_stride);

  Operator out = Operator::Zero(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (std::size_t m = 0; m < dt; ++m)
        acc += rho(static_cast<Eigen::Index>(keep_off[r] + trace_off[m]),
                   static_cast<Eigen::Index>(keep_off[c] + trace_off[m]));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return out;
}

/// (<bra|_site ⊗ 1) psi: contracts one tensor factor against a bra.
/// The result lives on the remaining factors in their original order.
inline Ket contract_site(const Ket& psi, std::span<const std::size_t> dims, std::size_t site,
                         const Ket& bra) {
  if (site >= dims.size()) throw DimensionError("contract_site: site out of range");
  if (static_cast<std::size_t>(psi.size()) != product(dims))
    throw DimensionError("contract_site: state dimension does not match dims");
  if (static_cast<std::size_t>(bra.size()) != dims[site])
    throw DimensionError("contract_site: bra dimension does not match dims[site]");
  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < site; ++k) left *= dims[k];
  for (std::size_t k = site + 1; k < dims.size(); ++k) right *= dims[k];
  const std::size_t d = dims[site];
  Ket out = Ket::Zero(left * right);
  for (std::size_t l = 0; l < left; ++l)
    for (std::size_t k = 0; k < d; ++k) {
      const Complex c = std::conj(bra(static_cast<Eigen::Index>(k)));
      out.segment(l * right, right) += c * psi.segment((l * d + k) * right, right);
    }
  return out;
}

inline Dims remove_factor(std::span<const std::size_t> dims, std::size_t site) {
  Dims out;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (k != site) out.push_back(dims[k]);
  return out;
}

/// Result of propagating with a generator that is not necessarily Hermitian.
struct GeneratorEvolution {
  enum class Method { Spectral, Diagonalizable, TaylorStepDoubling };
  Operator propagator;
  Method method = Method::Spectral;
  double error_estimate = 0.0;
};

/// exp(-i G t) for an arbitrary square generator G.
///
/// Hermitian G goes through the spectral route. Otherwise G is diagonalized
/// as V D V^-1 when V is well conditioned; failing that, the interval is cut
/// into 2^k Taylor-summed substeps and k is increased until two successive
/// refinements agree to 1e-13 relative.
inline GeneratorEvolution evolve_generator(const Operator& g, double t) {
  if (g.rows() != g.cols()) throw DimensionError("evolve_generator: generator must be square");
  if (is_hermitian(g)) return {evolve(g, t), GeneratorEvolution::Method::Spectral, 0.0};

  const double gnorm = std::max(op_norm(g), 1e-300);
  Eigen::ComplexEigenSolver<Operator> ces(g);
  if (ces.info() == Eigen::Success) {
    const Operator& v = ces.eigenvectors();
    Eigen::JacobiSVD<Operator> svd(v);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
    if (cond < 1e8) {
      const Operator vinv = v.inverse();
      const double recon = op_norm(v * ces.eigenvalues().asDiagonal() * vinv - g) / gnorm;
      if (recon <= 1e-10) {
        Eigen::VectorXcd d(ces.eigenvalues().size());
        for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::exp(-kI * ces.eigenvalues()(k) * t);
        return {v * d.asDiagonal() * vinv, GeneratorEvolution::Method::Diagonalizable, recon * cond};
      }
    }
  }

  const auto n = g.rows();
  auto taylor_steps = [&](int halvings) {
    const double steps = std::ldexp(1.0, halvings);
    const Operator step_gen = (-kI * (t / steps)) * g;
    Operator step = identity(n);
    Operator term = identity(n);
    for (int k = 1; k < 200; ++k) {
      term = term * step_gen / static_cast<double>(k);
      step += term;
      if (max_abs(term) <= 1e-18 * max_abs(step)) break;
    }
    Operator out = step;
    for (int h = 0; h < halvings; ++h) out = out * out;
    return out;
  };
  int k = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(1.0, gnorm * std::abs(t))))));
  Operator prev = taylor_steps(k);
  for (int iter = 0; iter < 40; ++iter) {
    Operator next = taylor_steps(++k);
    const double err = max_abs(next - prev) / std::max(1.0, max_abs(next));
    if (err <= 1e-13) return {next, GeneratorEvolution::Method::TaylorStepDoubling, err};
    prev = std::move(next);
  }
  throw Error("evolve_generator: step doubling did not converge");
}

}  // namespace pawclock

#pragma once

// Time-dilated dynamics seen from one local clock A of an interacting network.
//
// Conditioning the constraint on |tau>_A gives i R(A) d/dtau psi = H^(A) psi with
//   R(A)   = 1 - Phi(A),  Phi(A) = sum_{J != A} g_AJ H_J,
//   H^(A)  = H_S + sum_{J != A} H_J - 1/2 sum_{J,K != A} g_JK H_J H_K.
// When R is invertible the equation becomes i d/dtau psi = H_eff psi with
// H_eff = R^-1 H^(A) = sum_n Phi^n H^(A) (the series only for rho(Phi) < 1).
// All operators here act on U|A: the remaining clocks in network order, then S.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pawclock/universe.hpp"

namespace pawclock {

inline constexpr std::size_t kMaxSeriesOrder = 200;

/// Factor dimensions of U|A.
inline Dims rest_dims(const UniverseSpec& u, std::size_t a) { return rest_dims(u, Scope::local(a)); }

/// Local Hamiltonian H_J of clock J != A embedded on U|A.
inline Operator rest_clock_hamiltonian(const UniverseSpec& u, std::size_t a, std::size_t j) {
  return embed_in_rest(u, Scope::local(a), u.clock.clock(j).hamiltonian(), j);
}

inline Operator conditional_hamiltonian(const UniverseSpec& u, std::size_t a) {
  const auto& net = u.clock;
  if (a >= net.size()) throw DimensionError("conditional_hamiltonian: clock index out of range");
  Operator h = embed_in_rest(u, Scope::local(a), u.system_hamiltonian, u.system_site());
  std::vector<Operator> hj(net.size());
  for (std::size_t j = 0; j < net.size(); ++j)
    if (j != a) {
      hj[j] = rest_clock_hamiltonian(u, a, j);
      h += hj[j];
    }
  for (std::size_t j = 0; j < net.size(); ++j)
    for (std::size_t k = 0; k < net.size(); ++k)
      if (j != a && k != a && net.coupling(j, k) != 0.0) h -= 0.5 * net.coupling(j, k) * hj[j] * hj[k];
  return h;
}

struct RedshiftBundle {
  std::size_t clock = 0;
  Operator redshift;  // R(A)
  Operator phi;       // Phi(A)
  double spectral_radius = 0.0;
  SpectralDecomposition spectrum;  // of R, ascending eigenvalues epsilon
  double tolerance = 0.0;          // |epsilon| <= tolerance counts as zero
  bool invertible = true;

  std::vector<double> eigenvalues() const {
    return {spectrum.eigenvalues.data(), spectrum.eigenvalues.data() + spectrum.eigenvalues.size()};
  }
};

inline RedshiftBundle redshift(const UniverseSpec& u, std::size_t a) {
  const auto& net = u.clock;
  if (a >= net.size()) throw DimensionError("redshift: clock index out of range");
  const auto dims = rest_dims(u, a);
  RedshiftBundle b;
  b.clock = a;
  b.phi = Operator::Zero(product(dims), product(dims));
  for (std::size_t j = 0; j < net.size(); ++j)
    if (j != a && net.coupling(a, j) != 0.0) b.phi += net.coupling(a, j) * rest_clock_hamiltonian(u, a, j);
  b.redshift = identity(b.phi.rows()) - b.phi;
  b.spectral_radius = eig_hermitian(b.phi).norm();
  b.spectrum = eig_hermitian(b.redshift);
  b.tolerance = tol::kDegeneracy * (1.0 + b.spectral_radius);
  b.invertible = b.spectrum.eigenvalues.cwiseAbs().minCoeff() > b.tolerance;
  return b;
}

struct InversionMode {
  enum class Kind { Exact, Series };
  Kind kind = Kind::Exact;
  std::optional<std::size_t> order;  // series only; default_series_order when unset

  static InversionMode exact() { return {Kind::Exact, std::nullopt}; }
  static InversionMode series(std::optional<std::size_t> m = std::nullopt) { return {Kind::Series, m}; }
};

/// Smallest m with rho^(m+1) / (1 - rho) <= 1e-12, capped at 200.
inline std::size_t default_series_order(double rho) {
  if (rho >= 1.0) throw SeriesDivergent("default_series_order: spectral radius >= 1");
  if (rho == 0.0) return 0;
  double tail = rho / (1.0 - rho);
  std::size_t m = 0;
  while (tail > 1e-12 && m < kMaxSeriesOrder) {
    tail *= rho;
    ++m;
  }
  return m;
}

/// Exact spectral inverse sum_k eps_k^-1 P_k, or the partial sum sum_{n<=m} Phi^n.
inline Operator invert_redshift(const RedshiftBundle& b, InversionMode mode = InversionMode::exact()) {
  if (mode.kind == InversionMode::Kind::Exact) {
    if (!b.invertible)
      throw NonInvertible("invert_redshift: R has an eigenvalue within " + std::to_string(b.tolerance) + " of zero");
    return b.spectrum.apply([](double e) { return Complex{1.0 / e, 0.0}; });
  }
  if (b.spectral_radius >= 1.0)
    throw SeriesDivergent("invert_redshift: geometric series needs rho(Phi) < 1, got " +
                          std::to_string(b.spectral_radius) + "; use exact mode");
  const std::size_t m = mode.order.value_or(default_series_order(b.spectral_radius));
  Operator sum = identity(b.phi.rows());
  Operator power = identity(b.phi.rows());
  for (std::size_t n = 1; n <= m; ++n) {
    power = power * b.phi;
    sum += power;
  }
  return sum;
}

struct EffectiveHamiltonian {
  std::size_t clock = 0;
  InversionMode mode;
  Operator conditional;         // H^(A)
  std::optional<Operator> exact;  // R^-1 H^(A), when R is invertible
  std::vector<Operator> series;   // series[m] = sum_{n<=m} Phi^n H^(A), when rho < 1
  double spectral_radius = 0.0;
  double antihermitian_defect = 0.0;  // ||(G - G^dag)/2|| of generator()

  const Operator& generator() const {
    if (mode.kind == InversionMode::Kind::Series) return series.back();
    return *exact;
  }

  /// ||H^(A)|| rho^(m+1) / (1 - rho)
  double series_bound(std::size_t m) const {
    return op_norm(conditional) * std::pow(spectral_radius, static_cast<double>(m + 1)) / (1.0 - spectral_radius);
  }
};

inline EffectiveHamiltonian effective_hamiltonian(const UniverseSpec& u, std::size_t a,
                                                  InversionMode mode = InversionMode::exact()) {
  const auto b = redshift(u, a);
  EffectiveHamiltonian e;
  e.clock = a;
  e.mode = mode;
  e.conditional = conditional_hamiltonian(u, a);
  e.spectral_radius = b.spectral_radius;
  if (mode.kind == InversionMode::Kind::Exact && !b.invertible)
    throw NonInvertible("effective_hamiltonian: redshift operator is not invertible");
  if (b.invertible) e.exact = invert_redshift(b, InversionMode::exact()) * e.conditional;
  if (b.spectral_radius < 1.0) {
    const std::size_t m = mode.order.value_or(default_series_order(b.spectral_radius));
    Operator term = e.conditional;
    e.series.push_back(term);
    for (std::size_t n = 1; n <= m; ++n) {
      term = b.phi * term;
      e.series.push_back(e.series.back() + term);
    }
  } else if (mode.kind == InversionMode::Kind::Series) {
    throw SeriesDivergent("effective_hamiltonian: series mode needs rho(Phi) < 1");
  }
  const Operator& g = e.generator();
  e.antihermitian_defect = op_norm(0.5 * (g - g.adjoint()));
  return e;
}

/// The effective Hamiltonian expanded to the printed second order:
///   H_S + sum_J H_J - 1/2 sum_{J,K} (g_JK - 2 g_AJ) H_J H_K + sum_J g_AJ H_J H_S
///   + sum_{J,K} g_AJ g_AK H_J H_K H_S - 1/2 sum_{J,K,L} g_AL (g_KJ - 2 g_AJ) H_J H_K H_L
/// with every index running over clocks other than A.
inline Operator expanded_effective_hamiltonian(const UniverseSpec& u, std::size_t a) {
  const auto& net = u.clock;
  const Operator hs = embed_in_rest(u, Scope::local(a), u.system_hamiltonian, u.system_site());
  std::vector<std::size_t> others;
  std::vector<Operator> h(net.size());
  for (std::size_t j = 0; j < net.size(); ++j)
    if (j != a) {
      others.push_back(j);
      h[j] = rest_clock_hamiltonian(u, a, j);
    }
  auto g = [&](std::size_t x, std::size_t y) { return net.coupling(x, y); };
  Operator out = hs;
  for (auto j : others) out += h[j] + g(a, j) * h[j] * hs;
  for (auto j : others)
    for (auto k : others) {
      out -= 0.5 * (g(j, k) - 2.0 * g(a, j)) * h[j] * h[k];
      out += g(a, j) * g(a, k) * h[j] * h[k] * hs;
      for (auto l : others) out -= 0.5 * g(a, l) * (g(k, j) - 2.0 * g(a, j)) * h[j] * h[k] * h[l];
    }
  return out;
}

// ---------------------------------------------------------------------------
// Time-dilated propagation

struct TimeDilatedTrajectory {
  std::vector<double> tau;
  std::vector<Ket> states;
  double max_norm_drift = 0.0;
  double antihermitian_defect = 0.0;
  GeneratorEvolution::Method method = GeneratorEvolution::Method::Spectral;
};

/// psi(tau) = exp(-i H_eff (tau - tau_0)) psi0 over the grid, tau_0 = first node.
///
/// A generator whose anti-Hermitian part exceeds 1e-10 is propagated as a
/// general (possibly non-normal) matrix and the norm drift is reported.
inline TimeDilatedTrajectory propagate_time_dilated(const UniverseSpec& u, std::size_t a, const Ket& psi0,
                                                    const TimeGrid& grid,
                                                    InversionMode mode = InversionMode::exact()) {
  const auto eff = effective_hamiltonian(u, a, mode);
  const Operator& gen = eff.generator();
  if (psi0.size() != gen.rows()) throw DimensionError("propagate_time_dilated: psi0 does not live on U|A");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw Error("propagate_time_dilated: psi0 must be normalized");
  TimeDilatedTrajectory out;
  out.antihermitian_defect = eff.antihermitian_defect;
  if (grid.nodes.empty()) return out;
  const double tau0 = grid.nodes.front();
  std::optional<SpectralDecomposition> spec;
  if (eff.antihermitian_defect <= 1e-10) spec = eig_hermitian(0.5 * (gen + gen.adjoint()));
  for (double tau : grid.nodes) {
    Ket v;
    if (spec) {
      v = spec->evolve(tau - tau0) * psi0;
    } else {
      const auto ev = evolve_generator(gen, tau - tau0);
      out.method = ev.method;
      v = ev.propagator * psi0;
    }
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(v.norm() - 1.0));
    out.tau.push_back(tau);
    out.states.push_back(std::move(v));
  }
  return out;
}

/// max_tau |<R>(tau) - <R>(tau_0)| along the time-dilated trajectory.
inline double check_redshift_conservation(const UniverseSpec& u, std::size_t a, const Ket& psi0, const TimeGrid& grid,
                                          InversionMode mode = InversionMode::exact()) {
  const auto b = redshift(u, a);
  const auto traj = propagate_time_dilated(u, a, psi0, grid, mode);
  auto expect = [&](const Ket& v) { return v.dot(b.redshift * v).real() / v.squaredNorm(); };
  const double r0 = expect(psi0);
  double drift = 0.0;
  for (const auto& v : traj.states) drift = std::max(drift, std::abs(expect(v) - r0));
  return drift;
}

struct RouteComparison {
  std::vector<double> tau;
  std::vector<double> fidelity;  // |<conditioned|propagated>|
  std::vector<double> amplitude;  // a_A(tau)
  double min_fidelity = 1.0;
  double amplitude_deviation = 0.0;  // max |a_A(tau) - a_A(tau_0)|
};

/// Conditions the full history on clock A at every node and compares with
/// time-dilated propagation of the conditional state at the first node.
inline RouteComparison compare_routes(const HistoryState& h, std::size_t a, const TimeGrid& grid,
                                      InversionMode mode = InversionMode::exact()) {
  RouteComparison out;
  if (grid.nodes.empty()) return out;
  const auto start = condition_local(h, a, grid.nodes.front());
  const auto traj = propagate_time_dilated(h.universe, a, start.psi, grid, mode);
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const auto c = condition_local(h, a, grid.nodes[k]);
    const double f = fidelity(c.psi, traj.states[k]);
    out.tau.push_back(grid.nodes[k]);
    out.fidelity.push_back(f);
    out.amplitude.push_back(c.amplitude);
    out.min_fidelity = std::min(out.min_fidelity, f);
    out.amplitude_deviation = std::max(out.amplitude_deviation, std::abs(c.amplitude - start.amplitude));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Non-invertible redshift

struct DegenerateSplit {
  Operator frozen_projector;
  Operator dynamical_projector;
  /// Eigenvalues of H^(A) restricted to the frozen subspace.
  std::vector<double> frozen_energies;
  /// Zero-energy states of the restricted constraint, embedded on U|A.
  std::vector<Ket> stationary_states;
  std::vector<double> stationary_residuals;  // ||H^(A) phi||
  double stationary_constraint_residual = 0.0;  // max of the above, 0 when none
  /// Redshift eigenvalues of the dynamical subspace (rescale d/dtau there).
  std::vector<double> dynamical_redshifts;
  double block_coupling = 0.0;  // ||P_d H^(A) P_f||
};

inline DegenerateSplit degenerate_split(const UniverseSpec& u, std::size_t a) {
  const auto b = redshift(u, a);
  if (b.invertible) throw CalledOnInvertible("degenerate_split: redshift operator is invertible");
  const auto n = b.redshift.rows();
  std::vector<Eigen::Index> frozen_cols;
  DegenerateSplit s;
  for (Eigen::Index k = 0; k < b.spectrum.eigenvalues.size(); ++k) {
    if (std::abs(b.spectrum.eigenvalues(k)) <= b.tolerance)
      frozen_cols.push_back(k);
    else
      s.dynamical_redshifts.push_back(b.spectrum.eigenvalues(k));
  }
  Operator q(n, static_cast<Eigen::Index>(frozen_cols.size()));
  for (std::size_t c = 0; c < frozen_cols.size(); ++c)
    q.col(static_cast<Eigen::Index>(c)) = b.spectrum.eigenvectors.col(frozen_cols[c]);
  s.frozen_projector = q * q.adjoint();
  s.dynamical_projector = identity(n) - s.frozen_projector;

  const Operator h = conditional_hamiltonian(u, a);
  s.block_coupling = op_norm(s.dynamical_projector * h * s.frozen_projector);
  const auto restricted = eig_hermitian(q.adjoint() * h * q);
  const double zero = tol::kKernel * std::max(1.0, op_norm(h));
  for (std::size_t k = 0; k < restricted.size(); ++k) {
    const double e = restricted.eigenvalues(static_cast<Eigen::Index>(k));
    s.frozen_energies.push_back(e);
    if (std::abs(e) <= zero) {
      Ket phi = q * restricted.vector(k);
      s.stationary_residuals.push_back((h * phi).norm());
      s.stationary_constraint_residual = std::max(s.stationary_constraint_residual, s.stationary_residuals.back());
      s.stationary_states.push_back(std::move(phi));
    }
  }
  return s;
}

/// Minimum over the grid of the fidelity between the frozen-subspace component
/// of the conditional state and its value at the first node.
/// Relative norm below which a frozen component is treated as vanishing.
inline constexpr double kFrozenNodeFloor = 1e-6;

inline double frozen_component_stationarity(const HistoryState& h, std::size_t a, const DegenerateSplit& split,
                                            const TimeGrid& grid) {
  double worst = 1.0;
  if (grid.nodes.empty()) return worst;
  const Ket first = split.frozen_projector * condition_local(h, a, grid.nodes.front()).psi;
  if (first.norm() <= kConditioningFloor) throw ZeroAmplitude(grid.nodes.front(), first.norm());
  for (double tau : grid.nodes) {
    const Ket v = split.frozen_projector * condition_local(h, a, tau).psi;
    // a component passing through zero has no direction to compare
    if (v.norm() <= kFrozenNodeFloor * first.norm()) continue;
    worst = std::min(worst, fidelity(first, v));
  }
  return worst;
}

struct DilationEntry {
  double redshift = 0.0;        // eigenvalue epsilon of R
  std::size_t multiplicity = 0;
  std::optional<double> time_scale;  // 1/epsilon; empty when frozen
  int sign = 0;                       // +1 forward, -1 reversed, 0 frozen
};

/// Per-eigenspace time-scale factor 1/epsilon of the redshift operator.
inline std::vector<DilationEntry> dilation_sign_map(const UniverseSpec& u, std::size_t a) {
  const auto b = redshift(u, a);
  std::vector<DilationEntry> out;
  for (Eigen::Index k = 0; k < b.spectrum.eigenvalues.size(); ++k) {
    const double e = b.spectrum.eigenvalues(k);
    if (!out.empty() && std::abs(out.back().redshift - e) <= b.tolerance) {
      ++out.back().multiplicity;
      continue;
    }
    DilationEntry d;
    d.redshift = e;
    d.multiplicity = 1;
    if (std::abs(e) > b.tolerance) {
      d.time_scale = 1.0 / e;
      d.sign = e > 0 ? 1 : -1;
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace pawclock

#pragma once

// Universe = clock network ⊗ system. Builds the constraint operator, solves
// H|Psi> = 0 for history states and conditions them on global or local
// clock time states.
//
// Factor order of the Universe space: local clocks in network order, then S.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pawclock/clock.hpp"
#include "pawclock/tensor.hpp"

namespace pawclock {

inline constexpr double kConditioningFloor = 1e-12;
inline constexpr std::size_t kDefaultGridNodes = 256;

struct UniverseSpec {
  ClockNetwork clock;
  Operator system_hamiltonian;

  UniverseSpec(ClockNetwork network, Operator h_s) : clock(std::move(network)), system_hamiltonian(std::move(h_s)) {
    if (system_hamiltonian.rows() == 0) throw DimensionError("UniverseSpec: empty system Hamiltonian");
    if (!is_hermitian(system_hamiltonian)) throw NotHermitian("UniverseSpec: H_S is not Hermitian");
  }

  std::size_t system_dim() const { return static_cast<std::size_t>(system_hamiltonian.rows()); }
  std::size_t clock_dim() const { return clock.dim(); }
  std::size_t dim() const { return clock_dim() * system_dim(); }

  Dims dims() const {
    Dims d = clock.dims();
    d.push_back(system_dim());
    return d;
  }
  std::size_t system_site() const { return clock.size(); }
};

/// H = H_C ⊗ 1_S + 1_C ⊗ H_S with H_C including the gravitational-like term when enabled.
inline Operator assemble_hamiltonian(const UniverseSpec& u) {
  return tensor_product(u.clock.hamiltonian(), identity(u.system_dim())) +
         tensor_product(identity(u.clock_dim()), u.system_hamiltonian);
}

struct HistoryState {
  UniverseSpec universe;
  Ket psi;
  double constraint_residual = 0.0;  // ||H Psi||
  SchmidtData schmidt;               // clock | system cut
  /// c_ab over the clock product eigenbasis (local energy bases, product order),
  /// so that a^2(t) = sum_ab c_ab exp(-i (E_a - E_b) t).
  Operator clock_coefficients;
};

inline HistoryState make_history(const UniverseSpec& u, const Ket& psi) {
  if (static_cast<std::size_t>(psi.size()) != u.dim()) throw DimensionError("make_history: state dimension mismatch");
  const double n = psi.norm();
  if (n == 0.0) throw Error("make_history: zero vector");
  HistoryState h{u, psi / n, 0.0, {}, {}};
  h.constraint_residual = (assemble_hamiltonian(u) * h.psi).norm();
  h.schmidt = schmidt(h.psi, u.clock_dim(), u.system_dim());

  const Operator pb = u.clock.product_basis();
  const auto ph = u.clock.product_phases();
  Operator rho_c = Operator::Zero(u.clock_dim(), u.clock_dim());
  for (std::size_t k = 0; k < h.schmidt.rank; ++k)
    rho_c += h.schmidt.coefficients[k] * h.schmidt.left[k] * h.schmidt.left[k].adjoint();
  const Operator in_energy = pb.adjoint() * rho_c * pb;  // <w_b|rho|w_a> at (b, a)
  const auto d = static_cast<Eigen::Index>(u.clock_dim());
  h.clock_coefficients = Operator(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      h.clock_coefficients(a, b) =
          std::exp(kI * (ph[static_cast<std::size_t>(b)] - ph[static_cast<std::size_t>(a)])) * in_energy(b, a) /
          static_cast<double>(d);
  return h;
}

/// One history state per kernel basis vector of the constraint.
inline std::vector<HistoryState> solve_constraint(const UniverseSpec& u, double rel_tol = tol::kKernel) {
  const auto basis = kernel(assemble_hamiltonian(u), rel_tol);
  if (basis.empty())
    throw EmptyKernel("solve_constraint: H has no eigenvalue within tolerance of zero; shift the clock spectrum "
                      "or choose a compatible system Hamiltonian");
  std::vector<HistoryState> out;
  out.reserve(basis.size());
  for (const auto& v : basis) out.push_back(make_history(u, v));
  return out;
}

/// Normalized combination sum_k coeffs[k] * basis[k].psi.
inline HistoryState select_history(std::span<const HistoryState> basis, std::span<const Complex> coeffs) {
  if (basis.empty() || basis.size() != coeffs.size())
    throw DimensionError("select_history: need one coefficient per basis state");
  Ket v = Ket::Zero(basis[0].psi.size());
  for (std::size_t k = 0; k < basis.size(); ++k) v += coeffs[k] * basis[k].psi;
  if (v.norm() <= 1e-14) throw Error("select_history: combination is the zero vector");
  return make_history(basis[0].universe, v);
}

/// A clock product eigenstate paired with a system eigenstate of opposite energy.
struct EnergyPair {
  std::size_t clock_level;   // product index
  std::size_t system_level;  // index into ascending H_S eigenvalues
  double energy;             // clock energy
};

inline std::vector<EnergyPair> energy_pairs(const UniverseSpec& u, double rel_tol = tol::kKernel) {
  const auto e = u.clock.product_energies();
  const auto sys = eig_hermitian(u.system_hamiltonian);
  double scale = sys.norm();
  for (double x : e) scale = std::max(scale, std::abs(x));
  scale = std::max(scale, 1e-300);
  std::vector<EnergyPair> out;
  for (std::size_t p = 0; p < e.size(); ++p)
    for (std::size_t j = 0; j < sys.size(); ++j)
      if (std::abs(e[p] + sys.eigenvalues(static_cast<Eigen::Index>(j))) <= rel_tol * scale)
        out.push_back({p, j, e[p]});
  return out;
}

/// H_S = V diag(-E_p for p in levels) V^dagger: one system level cancelling each
/// listed clock product level. `basis` defaults to the identity.
inline Operator matched_system_hamiltonian(const ClockNetwork& net, std::span<const std::size_t> levels,
                                           const Operator& basis = {}) {
  const auto e = net.product_energies();
  const auto n = static_cast<Eigen::Index>(levels.size());
  if (n == 0) throw DimensionError("matched_system_hamiltonian: need at least one level");
  Eigen::VectorXcd diag(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto p = levels[static_cast<std::size_t>(k)];
    if (p >= e.size()) throw DimensionError("matched_system_hamiltonian: clock level out of range");
    diag(k) = -e[p];
  }
  const Operator v = basis.size() == 0 ? identity(static_cast<std::size_t>(n)) : basis;
  if (v.rows() != n || v.cols() != n) throw DimensionError("matched_system_hamiltonian: basis size mismatch");
  if (!is_unitary(v)) throw Error("matched_system_hamiltonian: basis is not unitary");
  const Operator h = v * diag.asDiagonal() * v.adjoint();
  return 0.5 * (h + h.adjoint());
}

/// Psi = sum_pairs w_p |E_p>_C |-E_p>_S (equal weights by default).
inline HistoryState energy_paired_history(const UniverseSpec& u, std::span<const Complex> weights = {}) {
  const auto pairs = energy_pairs(u);
  if (pairs.empty()) throw EmptyKernel("energy_paired_history: no clock level matches a system level");
  if (!weights.empty() && weights.size() != pairs.size())
    throw DimensionError("energy_paired_history: expected " + std::to_string(pairs.size()) + " weights");
  const Operator pb = u.clock.product_basis();
  const auto sys = eig_hermitian(u.system_hamiltonian);
  Ket v = Ket::Zero(u.dim());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Complex w = weights.empty() ? Complex{1.0, 0.0} : weights[k];
    v += w * tensor_product(Ket(pb.col(static_cast<Eigen::Index>(pairs[k].clock_level))),
                            sys.vector(pairs[k].system_level));
  }
  return make_history(u, v);
}

// ---------------------------------------------------------------------------
// Conditioning

/// Which clock the history is read from: the global clock C or local clock J.
struct Scope {
  std::optional<std::size_t> clock;

  static Scope global() { return {}; }
  static Scope local(std::size_t j) { return {j}; }
  bool is_global() const { return !clock.has_value(); }
};

struct ConditionalState {
  double label = 0.0;
  double amplitude = 0.0;
  Ket psi;
};

struct ConditionalDensity {
  double label = 0.0;
  Operator rho;
};

/// Factor dimensions of the space the conditional state lives on.
inline Dims rest_dims(const UniverseSpec& u, Scope scope) {
  if (scope.is_global()) return {u.system_dim()};
  if (*scope.clock >= u.clock.size()) throw DimensionError("scope: clock index out of range");
  return remove_factor(u.dims(), *scope.clock);
}

/// Unnormalized (<t| ⊗ 1) Psi for the given scope.
inline Ket project_time(const HistoryState& h, Scope scope, double t) {
  const auto& u = h.universe;
  if (scope.is_global()) {
    const Dims cut{u.clock_dim(), u.system_dim()};
    return contract_site(h.psi, cut, 0, u.clock.time_state(t));
  }
  const std::size_t j = *scope.clock;
  if (j >= u.clock.size()) throw DimensionError("condition_local: clock index out of range");
  return contract_site(h.psi, u.dims(), j, u.clock.clock(j).time_state(t));
}

inline ConditionalState condition(const HistoryState& h, Scope scope, double t) {
  Ket v = project_time(h, scope, t);
  const double a = v.norm();
  if (a <= kConditioningFloor) throw ZeroAmplitude(t, a);
  return {t, a, v / a};
}

inline ConditionalState condition_global(const HistoryState& h, double t) { return condition(h, Scope::global(), t); }

inline ConditionalState condition_local(const HistoryState& h, std::size_t j, double tau) {
  return condition(h, Scope::local(j), tau);
}

inline ConditionalState condition_local(const HistoryState& h, const std::string& label, double tau) {
  return condition_local(h, h.universe.clock.index_of(label), tau);
}

/// Conditions on every local clock at once: (⊗_J <tau_J| ⊗ 1_S) Psi.
inline ConditionalState condition_joint(const HistoryState& h, std::span<const double> taus) {
  const auto& net = h.universe.clock;
  if (taus.size() != net.size()) throw DimensionError("condition_joint: one tau per local clock required");
  std::vector<Ket> f;
  for (std::size_t j = 0; j < net.size(); ++j) f.push_back(net.clock(j).time_state(taus[j]));
  const Dims cut{h.universe.clock_dim(), h.universe.system_dim()};
  Ket v = contract_site(h.psi, cut, 0, tensor_product(std::span<const Ket>(f)));
  const double a = v.norm();
  if (a <= kConditioningFloor) throw ZeroAmplitude(taus.empty() ? 0.0 : taus[0], a);
  return {taus.empty() ? 0.0 : taus[0], a, v / a};
}

inline ConditionalDensity conditional_density(const HistoryState& h, Scope scope, double t) {
  const auto c = condition(h, scope, t);
  return {t, c.psi * c.psi.adjoint()};
}

/// Tr[O rho(t)] with O acting on the scoped factor.
inline double expectation(const HistoryState& h, const Operator& o, Scope scope, double t) {
  const auto c = condition(h, scope, t);
  if (o.rows() != c.psi.size() || o.cols() != c.psi.size())
    throw DimensionError("expectation: observable does not act on the conditioned factor");
  return c.psi.dot(o * c.psi).real();
}

/// Embeds an operator acting on Universe factor `site` into the conditioned space of `scope`.
inline Operator embed_in_rest(const UniverseSpec& u, Scope scope, const Operator& op, std::size_t site) {
  const auto dims = rest_dims(u, scope);
  if (scope.is_global()) {
    if (site != u.system_site()) throw DimensionError("embed_in_rest: global scope only exposes the system factor");
    return embed_local(op, 0, dims);
  }
  if (site == *scope.clock) throw DimensionError("embed_in_rest: cannot act on the conditioning clock");
  return embed_local(op, site > *scope.clock ? site - 1 : site, dims);
}

// ---------------------------------------------------------------------------
// Grids and profiles

struct TimeGrid {
  std::vector<double> nodes;
  double step = 0.0;

  static TimeGrid uniform(double start, double span, std::size_t n) {
    TimeGrid g;
    g.step = span / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) g.nodes.push_back(start + static_cast<double>(k) * g.step);
    return g;
  }

  /// n points from start to stop inclusive.
  static TimeGrid linspace(double start, double stop, std::size_t n) {
    TimeGrid g;
    g.step = n > 1 ? (stop - start) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t k = 0; k < n; ++k) g.nodes.push_back(start + static_cast<double>(k) * g.step);
    return g;
  }
};

/// Dimension and period of the clock selected by `scope`.
inline std::pair<std::size_t, double> scope_clock_period(const UniverseSpec& u, Scope scope) {
  if (scope.is_global()) return {u.clock_dim(), classify_spectrum(u.clock).period};
  const auto& c = u.clock.clock(*scope.clock);
  return {c.dim(), classify_spectrum(c).period};
}

/// One period of the scoped clock sampled at `n` uniform nodes.
inline TimeGrid default_grid(const UniverseSpec& u, Scope scope, std::size_t n = kDefaultGridNodes) {
  return TimeGrid::uniform(0.0, scope_clock_period(u, scope).second, n);
}

struct AmplitudeProfile {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> probability;  // Pr(t) = (d/T) a^2(t)
  double period = 0.0;
  double quadrature_sum = 0.0;  // sum_n Pr(t_n) dt

  double max_deviation() const {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x - a.front()));
    return m;
  }
};

inline AmplitudeProfile amplitude_profile(const HistoryState& h, Scope scope, const TimeGrid& grid) {
  const auto [d, period] = scope_clock_period(h.universe, scope);
  AmplitudeProfile p;
  p.period = period;
  for (double t : grid.nodes) {
    const double a = project_time(h, scope, t).norm();
    p.t.push_back(t);
    p.a.push_back(a);
    p.probability.push_back(static_cast<double>(d) / period * a * a);
    p.quadrature_sum += p.probability.back() * grid.step;
  }
  return p;
}

/// a^2(t) from the clock coefficients: sum_ab c_ab exp(-i (E_a - E_b) t).
inline double amplitude_squared_from_coefficients(const HistoryState& h, double t) {
  const auto e = h.universe.clock.product_energies();
  Complex acc = 0.0;
  const auto& c = h.clock_coefficients;
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b)
      acc += c(a, b) * std::exp(-kI * (e[static_cast<std::size_t>(a)] - e[static_cast<std::size_t>(b)]) * t);
  return acc.real();
}

/// weight * sum_n a(t_n) |t_n> ⊗ psi(t_n) over the global-clock resolution nodes.
inline Ket reconstruct_history(const HistoryState& h, const ResolutionOfIdentity& res) {
  const auto& u = h.universe;
  Ket out = Ket::Zero(u.dim());
  for (double t : res.nodes) {
    const Ket v = project_time(h, Scope::global(), t);  // a(t) psi(t)
    out += res.weight * tensor_product(u.clock.time_state(t), v);
  }
  return out;
}

}  // namespace pawclock

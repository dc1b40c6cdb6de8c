#pragma once

// Finite-dimensional clocks: single clocks, networks of local clocks with
// gravitational-like couplings, time states, transition amplitudes and the
// discrete / overcomplete / quadrature resolutions of the identity.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pawclock/tensor.hpp"

namespace pawclock {

/// A clock with non-degenerate spectrum {w_k} and reference phases {phi_k}.
///
/// The energy eigenbasis is kept explicitly: column k of basis() is |w_k>
/// expressed in the lab basis. Spin clocks therefore carry the literal
/// H = omega * sigma_x in the sigma_z computational basis.
class ClockModel {
 public:
  ClockModel(std::vector<double> frequencies, std::vector<double> phases, Operator basis)
      : frequencies_(std::move(frequencies)), phases_(std::move(phases)), basis_(std::move(basis)) {
    const auto d = frequencies_.size();
    if (d == 0) throw DimensionError("ClockModel: empty spectrum");
    if (phases_.empty()) phases_.assign(d, 0.0);
    if (phases_.size() != d) throw DimensionError("ClockModel: phases length != spectrum length");
    if (static_cast<std::size_t>(basis_.rows()) != d || static_cast<std::size_t>(basis_.cols()) != d)
      throw DimensionError("ClockModel: basis must be d x d");
    if (!is_unitary(basis_)) throw Error("ClockModel: basis is not unitary");
    const double scale = std::max(1.0, std::max(std::abs(frequencies_.front()), std::abs(frequencies_.back())));
    for (std::size_t k = 1; k < d; ++k)
      if (!(frequencies_[k] - frequencies_[k - 1] > tol::kDegeneracy * scale))
        throw DegenerateSpectrum("ClockModel: frequencies must be strictly ascending");
  }

  /// Clock whose lab basis is its energy basis.
  static ClockModel from_spectrum(std::vector<double> frequencies, std::vector<double> phases = {}) {
    const auto d = frequencies.size();
    return ClockModel(std::move(frequencies), std::move(phases), identity(d));
  }

  /// Spin-1/2 clock with H = omega * sigma_x; |R> = |0> when phases vanish.
  static ClockModel spin(double omega, std::vector<double> phases = {}) {
    if (omega == 0.0) throw DegenerateSpectrum("ClockModel::spin: omega must be nonzero");
    const double s = 1.0 / std::sqrt(2.0);
    Operator b(2, 2);
    // columns: |-> = (1,-1)/sqrt2 with eigenvalue -omega, |+> = (1,1)/sqrt2 with +omega
    if (omega > 0) {
      b << s, s, -s, s;
      return ClockModel({-omega, omega}, std::move(phases), b);
    }
    b << s, s, s, -s;
    return ClockModel({omega, -omega}, std::move(phases), b);
  }

  static ClockModel from_hamiltonian(const Operator& h, std::vector<double> phases = {}) {
    const auto spec = eig_hermitian(h);
    std::vector<double> w(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.eigenvalues.size());
    return ClockModel(std::move(w), std::move(phases), spec.eigenvectors);
  }

  std::size_t dim() const { return frequencies_.size(); }
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& phases() const { return phases_; }
  const Operator& basis() const { return basis_; }

  Operator hamiltonian() const {
    Eigen::VectorXcd w(dim());
    for (std::size_t k = 0; k < dim(); ++k) w(static_cast<Eigen::Index>(k)) = frequencies_[k];
    return basis_ * w.asDiagonal() * basis_.adjoint();
  }

  Ket reference_state() const { return time_state(0.0); }

  /// |t> = d^-1/2 sum_k exp(-i (w_k t + phi_k)) |w_k>
  Ket time_state(double t) const {
    Ket c(dim());
    const double norm = 1.0 / std::sqrt(static_cast<double>(dim()));
    for (std::size_t k = 0; k < dim(); ++k)
      c(static_cast<Eigen::Index>(k)) = norm * std::exp(-kI * (frequencies_[k] * t + phases_[k]));
    return basis_ * c;
  }

  /// <s|t> = d^-1 sum_k exp(i w_k (s - t)); independent of the phases.
  Complex overlap(double s, double t) const {
    Complex acc = 0.0;
    for (double w : frequencies_) acc += std::exp(kI * (w * (s - t)));
    return acc / static_cast<double>(dim());
  }

 private:
  std::vector<double> frequencies_;
  std::vector<double> phases_;
  Operator basis_;
};

enum class Interaction { None, GravitationalLike };

/// Ordered local clocks plus symmetric couplings g_JK (units 1/energy).
///
/// Global clock Hamiltonian: H_C = sum_J H_J - 1/2 sum_{J,K} g_JK H_J H_K,
/// the second term present only for Interaction::GravitationalLike.
class ClockNetwork {
 public:
  ClockNetwork(std::vector<ClockModel> clocks, std::vector<std::string> labels, Eigen::MatrixXd couplings,
               Interaction interaction)
      : clocks_(std::move(clocks)),
        labels_(std::move(labels)),
        couplings_(std::move(couplings)),
        interaction_(interaction) {
    const auto n = clocks_.size();
    if (n == 0) throw DimensionError("ClockNetwork: no clocks");
    if (labels_.empty())
      for (std::size_t j = 0; j < n; ++j) labels_.push_back(std::string(1, static_cast<char>('A' + j)));
    if (labels_.size() != n) throw DimensionError("ClockNetwork: labels length != number of clocks");
    if (couplings_.size() == 0) couplings_ = Eigen::MatrixXd::Zero(n, n);
    if (static_cast<std::size_t>(couplings_.rows()) != n || static_cast<std::size_t>(couplings_.cols()) != n)
      throw DimensionError("ClockNetwork: couplings must be n x n");
    for (std::size_t j = 0; j < n; ++j) {
      if (couplings_(j, j) != 0.0) throw Error("ClockNetwork: g_" + labels_[j] + labels_[j] + " must be zero");
      for (std::size_t k = 0; k < j; ++k)
        if (couplings_(j, k) != couplings_(k, j))
          throw Error("ClockNetwork: couplings must be symmetric (" + labels_[j] + "," + labels_[k] + ")");
    }
    for (const auto& c : clocks_) dims_.push_back(c.dim());
    h_int_spectrum_ = eig_hermitian(interaction_hamiltonian());
  }

  static ClockNetwork single(ClockModel clock, std::string label = "C") {
    return ClockNetwork({std::move(clock)}, {std::move(label)}, Eigen::MatrixXd::Zero(1, 1), Interaction::None);
  }

  /// Spin clocks H_J = omega_J sigma_x with couplings in the dimensionless
  /// convention H_C = omega_0 (sum_J (omega_J/omega_0) sigma_J - sum_{J<K} gt_JK sigma_J sigma_K),
  /// i.e. g_JK = gt_JK * omega_0 / (omega_J omega_K).
  static ClockNetwork spins(std::span<const double> omegas, const Eigen::MatrixXd& dimensionless_g,
                            std::vector<std::string> labels = {}) {
    const auto n = omegas.size();
    std::vector<ClockModel> clocks;
    for (double w : omegas) clocks.push_back(ClockModel::spin(w));
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    bool any = false;
    if (dimensionless_g.size() != 0) {
      if (static_cast<std::size_t>(dimensionless_g.rows()) != n)
        throw DimensionError("ClockNetwork::spins: coupling matrix size mismatch");
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          g(j, k) = dimensionless_g(j, k) * omegas[0] / (omegas[j] * omegas[k]);
          any = any || g(j, k) != 0.0;
        }
    }
    // keep exact symmetry after the floating-point conversion
    g = 0.5 * (g + g.transpose()).eval();
    return ClockNetwork(std::move(clocks), std::move(labels), g,
                        any ? Interaction::GravitationalLike : Interaction::None);
  }

  /// H_C = omega (sigma_A + alpha sigma_B - g sigma_A sigma_B).
  static ClockNetwork two_spin(double omega, double alpha, double g) {
    const double omegas[] = {omega, alpha * omega};
    Eigen::MatrixXd gt(2, 2);
    gt << 0.0, g, g, 0.0;
    return spins(omegas, gt, {"A", "B"});
  }

  std::size_t size() const { return clocks_.size(); }
  const ClockModel& clock(std::size_t j) const { return clocks_.at(j); }
  const std::vector<ClockModel>& clocks() const { return clocks_; }
  const std::string& label(std::size_t j) const { return labels_.at(j); }
  const std::vector<std::string>& labels() const { return labels_; }
  Interaction interaction() const { return interaction_; }
  const Eigen::MatrixXd& couplings() const { return couplings_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return product(dims_); }

  /// g_JK as seen by the Hamiltonian (zero when the interaction is off).
  double coupling(std::size_t j, std::size_t k) const {
    return interaction_ == Interaction::GravitationalLike ? couplings_(j, k) : 0.0;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t j = 0; j < labels_.size(); ++j)
      if (labels_[j] == label) return j;
    throw Error("ClockNetwork: unknown clock label '" + label + "'");
  }

  Operator local_hamiltonian(std::size_t j) const { return embed_local(clocks_.at(j).hamiltonian(), j, dims_); }

  Operator interaction_hamiltonian() const {
    Operator h = Operator::Zero(dim(), dim());
    for (std::size_t j = 0; j < size(); ++j)
      for (std::size_t k = 0; k < size(); ++k)
        if (coupling(j, k) != 0.0) h -= 0.5 * coupling(j, k) * local_hamiltonian(j) * local_hamiltonian(k);
    return h;
  }

  Operator hamiltonian() const {
    Operator h = interaction_hamiltonian();
    for (std::size_t j = 0; j < size(); ++j) h += local_hamiltonian(j);
    return h;
  }

  /// ⊗_J of the local energy bases; it also diagonalizes the interaction.
  Operator product_basis() const {
    std::vector<Operator> b;
    for (const auto& c : clocks_) b.push_back(c.basis());
    return tensor_product(std::span<const Operator>(b));
  }

  /// Local energy indices (k_A, k_B, ...) of product basis state p.
  std::vector<std::size_t> level_indices(std::size_t p) const {
    std::vector<std::size_t> k(size());
    for (std::size_t j = size(); j-- > 0;) {
      k[j] = p % dims_[j];
      p /= dims_[j];
    }
    return k;
  }

  /// Global energies of the product eigenstates, in product order.
  std::vector<double> product_energies() const {
    std::vector<double> e(dim());
    for (std::size_t p = 0; p < dim(); ++p) {
      const auto k = level_indices(p);
      double acc = 0.0;
      for (std::size_t j = 0; j < size(); ++j) acc += clocks_[j].frequencies()[k[j]];
      for (std::size_t j = 0; j < size(); ++j)
        for (std::size_t l = 0; l < size(); ++l)
          acc -= 0.5 * coupling(j, l) * clocks_[j].frequencies()[k[j]] * clocks_[l].frequencies()[k[l]];
      e[p] = acc;
    }
    return e;
  }

  /// Sum of local reference phases for each product eigenstate.
  std::vector<double> product_phases() const {
    std::vector<double> ph(dim());
    for (std::size_t p = 0; p < dim(); ++p) {
      const auto k = level_indices(p);
      double acc = 0.0;
      for (std::size_t j = 0; j < size(); ++j) acc += clocks_[j].phases()[k[j]];
      ph[p] = acc;
    }
    return ph;
  }

  bool degenerate() const {
    auto e = product_energies();
    std::sort(e.begin(), e.end());
    const double scale = std::max({1.0, std::abs(e.front()), std::abs(e.back())});
    for (std::size_t k = 1; k < e.size(); ++k)
      if (e[k] - e[k - 1] <= tol::kDegeneracy * scale) return true;
    return false;
  }

  /// The global clock as a single ClockModel; requires a non-degenerate H_C.
  ClockModel global_clock() const {
    if (degenerate()) throw DegenerateSpectrum("ClockNetwork: global clock spectrum is degenerate");
    const auto e = product_energies();
    const auto ph = product_phases();
    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return e[a] < e[b]; });
    const Operator pb = product_basis();
    Operator basis(dim(), dim());
    std::vector<double> w, phi;
    for (std::size_t k = 0; k < order.size(); ++k) {
      basis.col(static_cast<Eigen::Index>(k)) = pb.col(static_cast<Eigen::Index>(order[k]));
      w.push_back(e[order[k]]);
      phi.push_back(ph[order[k]]);
    }
    return ClockModel(std::move(w), std::move(phi), basis);
  }

  Ket reference_state() const { return local_product(0.0); }

  /// ⊗_J |t>_J without the interaction phase.
  Ket local_product(double t) const {
    std::vector<Ket> f;
    for (const auto& c : clocks_) f.push_back(c.time_state(t));
    return tensor_product(std::span<const Ket>(f));
  }

  /// |t>_C = exp(-i H_int t) ⊗_J |t>_J
  Ket time_state(double t) const {
    Ket prod = local_product(t);
    if (interaction_ == Interaction::None) return prod;
    return h_int_spectrum_.evolve(t) * prod;
  }

  /// F({tau_J}|t) = (⊗_J <tau_J|) |t>_C
  Complex transition_amplitude(std::span<const double> taus, double t) const {
    if (taus.size() != size()) throw DimensionError("transition_amplitude: one tau per local clock required");
    std::vector<Ket> f;
    for (std::size_t j = 0; j < size(); ++j) f.push_back(clocks_[j].time_state(taus[j]));
    return tensor_product(std::span<const Ket>(f)).dot(time_state(t));
  }

 private:
  std::vector<ClockModel> clocks_;
  std::vector<std::string> labels_;
  Eigen::MatrixXd couplings_;
  Interaction interaction_;
  Dims dims_;
  SpectralDecomposition h_int_spectrum_;
};

inline Ket global_time_state(const ClockNetwork& net, double t) { return net.time_state(t); }

inline Complex transition_amplitude(const ClockNetwork& net, std::span<const double> taus, double t) {
  return net.transition_amplitude(taus, t);
}

// ---------------------------------------------------------------------------
// Spectrum classification

enum class SpectrumKind { EvenlySpaced, Rational, IrrationalApproximated };

inline const char* to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::EvenlySpaced: return "evenly-spaced";
    case SpectrumKind::Rational: return "rational";
    case SpectrumKind::IrrationalApproximated: return "irrational-approximated";
  }
  return "?";
}

struct SpectrumClass {
  SpectrumKind kind = SpectrumKind::EvenlySpaced;
  double period = 0.0;
  std::vector<std::int64_t> offsets;       // r_k, with r_0 = 0
  std::vector<std::int64_t> numerators;    // A_k
  std::vector<std::int64_t> denominators;  // B_k
  /// max_k |w_0 + r_k 2pi/T - w_k|: what the rationalization costs.
  double max_frequency_error = 0.0;

  std::int64_t max_offset() const { return offsets.empty() ? 0 : *std::max_element(offsets.begin(), offsets.end()); }
};

inline constexpr std::int64_t kDefaultDenominatorCap = 1'000'000;

namespace detail {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool exact = true;
};

// Continued-fraction convergents of x >= 0, stopping at the first one within
// 1e-9 relative of x or at the last denominator not exceeding `cap`.
inline Fraction rationalize(double x, std::int64_t cap) {
  const double target_tol = 1e-9 * std::max(1.0, std::abs(x));
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p = static_cast<std::int64_t>(std::floor(x)), q = 1;
  double frac = x - std::floor(x);
  while (std::abs(x - static_cast<double>(p) / static_cast<double>(q)) > target_tol) {
    if (frac < 1e-300) break;
    const double inv = 1.0 / frac;
    const double a_real = std::floor(inv);
    if (a_real > 9e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const __int128 q_next = static_cast<__int128>(a) * q + q_prev;
    if (q_next > cap) return {p, q, false};
    const __int128 p_next = static_cast<__int128>(a) * p + p_prev;
    p_prev = p;
    q_prev = q;
    p = static_cast<std::int64_t>(p_next);
    q = static_cast<std::int64_t>(q_next);
    frac = inv - a_real;
  }
  return {p, q, std::abs(x - static_cast<double>(p) / static_cast<double>(q)) <= target_tol};
}

}  // namespace detail

/// Classifies an ascending spectrum as evenly spaced, rational or
/// irrational-approximated and derives the period T and integers r_k.
inline SpectrumClass classify_spectrum(std::span<const double> w,
                                       std::int64_t denominator_cap = kDefaultDenominatorCap) {
  const auto d = w.size();
  if (d < 2) throw DimensionError("classify_spectrum: need at least two levels");
  const double gap0 = w[1] - w[0];
  if (!(gap0 > 0.0)) throw DegenerateSpectrum("classify_spectrum: spectrum must be strictly ascending");
  SpectrumClass out;

  bool even = true;
  for (std::size_t k = 1; k < d; ++k)
    if (std::abs((w[k] - w[k - 1]) - gap0) > 1e-9 * std::abs(gap0)) even = false;
  if (even) {
    out.kind = SpectrumKind::EvenlySpaced;
    out.period = 2.0 * std::numbers::pi / gap0;
    for (std::size_t k = 0; k < d; ++k) {
      out.offsets.push_back(static_cast<std::int64_t>(k));
      out.numerators.push_back(static_cast<std::int64_t>(k));
      out.denominators.push_back(1);
    }
  } else {
    bool exact = true;
    std::int64_t r1 = 1;
    for (std::size_t k = 0; k < d; ++k) {
      const auto f = detail::rationalize((w[k] - w[0]) / gap0, denominator_cap);
      exact = exact && f.exact;
      const std::int64_t g = std::gcd(f.num, f.den);
      out.numerators.push_back(g == 0 ? 0 : f.num / g);
      out.denominators.push_back(g == 0 ? 1 : f.den / g);
      const std::int64_t den = out.denominators.back();
      const __int128 l = static_cast<__int128>(r1) / std::gcd(r1, den) * den;
      if (l > (static_cast<__int128>(1) << 53)) throw Error("classify_spectrum: period integer overflow");
      r1 = static_cast<std::int64_t>(l);
    }
    for (std::size_t k = 0; k < d; ++k) out.offsets.push_back(out.numerators[k] * (r1 / out.denominators[k]));
    out.kind = exact ? SpectrumKind::Rational : SpectrumKind::IrrationalApproximated;
    out.period = 2.0 * std::numbers::pi * static_cast<double>(r1) / gap0;
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double model = w[0] + static_cast<double>(out.offsets[k]) * 2.0 * std::numbers::pi / out.period;
    out.max_frequency_error = std::max(out.max_frequency_error, std::abs(model - w[k]));
  }
  return out;
}

inline SpectrumClass classify_spectrum(const ClockModel& c, std::int64_t denominator_cap = kDefaultDenominatorCap) {
  return classify_spectrum(c.frequencies(), denominator_cap);
}

/// Sorted distinct levels (merging values closer than the degeneracy tolerance).
inline std::vector<double> distinct_levels(std::vector<double> e) {
  std::sort(e.begin(), e.end());
  const double scale = std::max({1.0, std::abs(e.front()), std::abs(e.back())});
  std::vector<double> out{e.front()};
  for (std::size_t k = 1; k < e.size(); ++k)
    if (e[k] - out.back() > tol::kDegeneracy * scale) out.push_back(e[k]);
  return out;
}

/// Period of a network's global clock, from its distinct global levels.
inline SpectrumClass classify_spectrum(const ClockNetwork& net,
                                       std::int64_t denominator_cap = kDefaultDenominatorCap) {
  return classify_spectrum(distinct_levels(net.product_energies()), denominator_cap);
}

// ---------------------------------------------------------------------------
// Resolutions of the identity

enum class ResolutionKind { DiscreteOrthonormal, OvercompleteDiscrete, Quadrature };

inline const char* to_string(ResolutionKind k) {
  switch (k) {
    case ResolutionKind::DiscreteOrthonormal: return "discrete-orthonormal";
    case ResolutionKind::OvercompleteDiscrete: return "overcomplete-discrete";
    case ResolutionKind::Quadrature: return "quadrature";
  }
  return "?";
}

struct ResolutionOfIdentity {
  ResolutionKind kind = ResolutionKind::DiscreteOrthonormal;
  std::vector<double> nodes;
  double weight = 1.0;
  double period = 0.0;
  double tolerance = 0.0;
  double defect = 0.0;
  /// (N, defect) for every node count tried while choosing a quadrature.
  std::vector<std::pair<std::size_t, double>> convergence;
};

/// ||weight * sum_n |t_n><t_n| - 1|| in operator norm.
template <class TimeStateFn>
double identity_defect(TimeStateFn&& time_state, std::size_t dim, std::span<const double> nodes, double weight) {
  Operator sum = Operator::Zero(dim, dim);
  for (double t : nodes) {
    const Ket v = time_state(t);
    sum.noalias() += v * v.adjoint();
  }
  return op_norm(weight * sum - identity(dim));
}

inline double identity_defect(const ClockModel& c, std::span<const double> nodes, double weight) {
  return identity_defect([&](double t) { return c.time_state(t); }, c.dim(), nodes, weight);
}

inline std::vector<double> uniform_nodes(double period, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<double>(k) * period / static_cast<double>(n);
  return out;
}

inline constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 20;

/// Builds one of the three resolution kinds for clock `c`.
///
/// DiscreteOrthonormal needs an evenly spaced spectrum (N = d, weight 1).
/// OvercompleteDiscrete uses N > max r_k nodes (default max r_k + 1) with weight d/N.
/// Quadrature doubles N from d until the defect is at most 1e-10.
inline ResolutionOfIdentity build_resolution(const ClockModel& c, ResolutionKind kind,
                                             std::optional<std::size_t> node_count = std::nullopt,
                                             std::int64_t denominator_cap = kDefaultDenominatorCap) {
  const auto cls = classify_spectrum(c, denominator_cap);
  const auto d = c.dim();
  ResolutionOfIdentity out;
  out.kind = kind;
  out.period = cls.period;
  switch (kind) {
    case ResolutionKind::DiscreteOrthonormal: {
      if (cls.kind != SpectrumKind::EvenlySpaced)
        throw InfeasibleResolution(std::string("discrete-orthonormal resolution needs an evenly spaced spectrum, got ") +
                                   to_string(cls.kind));
      out.nodes = uniform_nodes(cls.period, d);
      out.weight = 1.0;
      out.tolerance = 1e-12;
      break;
    }
    case ResolutionKind::OvercompleteDiscrete: {
      const auto min_n = static_cast<std::size_t>(cls.max_offset()) + 1;
      const std::size_t n = node_count.value_or(min_n);
      if (n < min_n)
        throw InfeasibleResolution("overcomplete-discrete resolution needs N > max r_k = " +
                                   std::to_string(cls.max_offset()));
      if (n > kMaxQuadratureNodes) throw InfeasibleResolution("overcomplete-discrete resolution needs too many nodes");
      out.nodes = uniform_nodes(cls.period, n);
      out.weight = static_cast<double>(d) / static_cast<double>(n);
      out.tolerance = 1e-10;
      break;
    }
    case ResolutionKind::Quadrature: {
      out.tolerance = 1e-10;
      std::size_t n = node_count.value_or(d);
      for (;;) {
        auto nodes = uniform_nodes(cls.period, n);
        const double w = static_cast<double>(d) / static_cast<double>(n);
        const double defect = identity_defect(c, nodes, w);
        out.convergence.emplace_back(n, defect);
        if (defect <= out.tolerance || node_count) {
          out.nodes = std::move(nodes);
          out.weight = w;
          break;
        }
        if (2 * n > kMaxQuadratureNodes)
          throw InfeasibleResolution("quadrature resolution did not reach 1e-10 within " +
                                     std::to_string(kMaxQuadratureNodes) + " nodes");
        n *= 2;
      }
      break;
    }
  }
  out.defect = identity_defect(c, out.nodes, out.weight);
  if (out.defect > out.tolerance)
    throw InfeasibleResolution(std::string(to_string(kind)) + " resolution defect " + std::to_string(out.defect) +
                               " exceeds " + std::to_string(out.tolerance) + " for a " + to_string(cls.kind) +
                               " spectrum");
  return out;
}

}  // namespace pawclock

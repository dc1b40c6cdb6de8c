#pragma once

// Turns a validated config into library objects, plus the seeded random
// universes used by the verification suite.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>

#include "pawclock/experiment/config.hpp"
#include "pawclock/universe.hpp"

namespace pawclock::experiment {

/// Haar-like random unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal folded back in.
inline Operator random_unitary(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Operator m(n, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Operator> qr(m);
  Operator q = qr.householderQ() * Operator::Identity(m.rows(), m.cols());
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

inline Operator build_system(const ExperimentConfig& c, const ClockNetwork& net) {
  const auto& s = c.system;
  if (s.preset == "zero") return Operator::Zero(static_cast<Eigen::Index>(s.dim), static_cast<Eigen::Index>(s.dim));
  if (s.preset == "sigma_x") return s.scale * pauli_x();
  if (s.preset == "matched") {
    std::mt19937_64 rng(s.seed);
    return matched_system_hamiltonian(net, s.levels, random_unitary(rng, s.levels.size()));
  }
  const auto n = static_cast<Eigen::Index>(s.matrix.size());
  Operator h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = s.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return h;
}

inline UniverseSpec build_universe(const ExperimentConfig& c) {
  auto net = build_network(c);
  Operator hs = build_system(c, net);
  return UniverseSpec(std::move(net), std::move(hs));
}

inline HistoryState build_history(const ExperimentConfig& c, const UniverseSpec& u) {
  if (c.constraint.rule == "energy-paired") return energy_paired_history(u, c.constraint.coefficients);
  const auto basis = solve_constraint(u);
  if (c.constraint.coefficients.empty()) {
    const std::vector<Complex> ones(basis.size(), Complex{1.0, 0.0});
    return select_history(basis, ones);
  }
  return select_history(basis, c.constraint.coefficients);
}

/// A clock with d_c random levels and a system of dimension d_s whose first
/// min(d_c, d_s) levels cancel distinct clock levels (the rest are generic),
/// in a random basis. The history pairs the matched levels with random weights.
struct RandomUniverse {
  UniverseSpec universe;
  HistoryState history;
};

inline RandomUniverse random_universe(std::uint64_t seed, std::size_t d_c, std::size_t d_s) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gap(0.25, 1.25), start(-1.5, 0.0), extra(3.0, 5.0);
  std::vector<double> w{start(rng)};
  for (std::size_t k = 1; k < d_c; ++k) w.push_back(w.back() + gap(rng));
  auto net = ClockNetwork::single(ClockModel::from_spectrum(w));

  const std::size_t matched = std::min(d_c, d_s);
  std::vector<std::size_t> levels(d_c);
  std::iota(levels.begin(), levels.end(), 0);
  std::shuffle(levels.begin(), levels.end(), rng);
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(d_s));
  for (std::size_t k = 0; k < d_s; ++k)
    diag(static_cast<Eigen::Index>(k)) = k < matched ? -w[levels[k]] : w.back() - w.front() + extra(rng);  // unmatched: above every -w_k
  const Operator v = random_unitary(rng, d_s);
  Operator hs = v * diag.asDiagonal() * v.adjoint();
  hs = 0.5 * (hs + hs.adjoint()).eval();
  UniverseSpec u(std::move(net), hs);

  std::normal_distribution<double> g;
  std::vector<Complex> weights;
  for (std::size_t k = 0; k < energy_pairs(u).size(); ++k) weights.emplace_back(g(rng), g(rng));
  auto h = energy_paired_history(u, weights);
  return {std::move(u), std::move(h)};
}

}  // namespace pawclock::experiment

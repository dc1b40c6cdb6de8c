#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pawclock/universe.hpp"

using namespace pawclock;

namespace {

constexpr double kPi = std::numbers::pi;

UniverseSpec qubit_universe(double omega = 1.0) {
  return UniverseSpec(ClockNetwork::single(ClockModel::spin(omega)), -omega * pauli_x());
}

// Two spins with every product level matched by a system level (d_S = 4).
UniverseSpec two_spin_universe(double omega, double alpha, double g, std::uint64_t seed = 1) {
  auto net = ClockNetwork::two_spin(omega, alpha, g);
  std::mt19937_64 rng(seed);
  const std::size_t levels[] = {0, 1, 2, 3};
  const Operator hs = matched_system_hamiltonian(net, levels, oracle::random_unitary(rng, 4));
  return UniverseSpec(std::move(net), hs);
}

// Random clock spectrum, system matched to all levels in a random basis.
UniverseSpec random_universe(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.3, 1.2);
  std::vector<double> w{-0.8};
  for (std::size_t k = 1; k < d; ++k) w.push_back(w.back() + u(rng));
  auto net = ClockNetwork::single(ClockModel::from_spectrum(w));
  std::vector<std::size_t> levels(d);
  std::iota(levels.begin(), levels.end(), 0);
  const Operator hs = matched_system_hamiltonian(net, levels, oracle::random_unitary(rng, static_cast<Eigen::Index>(d)));
  return UniverseSpec(std::move(net), hs);
}

HistoryState random_history(std::mt19937_64& rng, const UniverseSpec& u) {
  const auto basis = solve_constraint(u);
  std::normal_distribution<double> g;
  std::vector<Complex> c;
  for (std::size_t k = 0; k < basis.size(); ++k) c.emplace_back(g(rng), g(rng));
  return select_history(basis, c);
}

}  // namespace

TEST(UniverseSpec, RejectsNonHermitianSystem) {
  Operator h = pauli_x();
  h(0, 1) = 3.0;
  EXPECT_THROW(UniverseSpec(ClockNetwork::single(ClockModel::spin(1.0)), h), NotHermitian);
}

TEST(AssembleHamiltonian, QubitClockSpectrum) {
  const Operator h = assemble_hamiltonian(qubit_universe());
  EXPECT_TRUE(is_hermitian(h));
  const auto ev = oracle::hermitian_eigenvalues(h);
  const std::vector<double> want{-2, 0, 0, 2};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], want[k], 1e-14);
}

TEST(AssembleHamiltonian, TwoSpinCouplingSign) {
  const double g = 0.3;
  const auto u = UniverseSpec(ClockNetwork::two_spin(1.0, 0.5, g), Operator::Zero(1, 1));
  const Operator sa = tensor_product(pauli_x(), identity(2)), sb = tensor_product(identity(2), pauli_x());
  EXPECT_LE(max_abs(assemble_hamiltonian(u) - (sa + 0.5 * sb - g * sa * sb)), 1e-15);
}

TEST(AssembleHamiltonian, NoCouplingIsSumForm) {
  std::mt19937_64 rng(61);
  const Operator hs = oracle::random_hermitian(rng, 3);
  const auto u = UniverseSpec(ClockNetwork::two_spin(1.0, 0.5, 0.0), hs);
  const Operator want = tensor_product(tensor_product(pauli_x(), identity(2)), identity(3)) +
                        0.5 * tensor_product(tensor_product(identity(2), pauli_x()), identity(3)) +
                        tensor_product(identity(4), hs);
  EXPECT_LE(max_abs(assemble_hamiltonian(u) - want), 1e-15);
}

TEST(SolveConstraint, QubitHasTwoKernelVectors) {
  const auto basis = solve_constraint(qubit_universe(1.4));
  ASSERT_EQ(basis.size(), 2u);
  for (const auto& h : basis) {
    EXPECT_LE(h.constraint_residual, 1e-12);
    EXPECT_NEAR(h.schmidt.coefficient_sum(), 1.0, 1e-12);
  }
  EXPECT_LE(std::abs(basis[0].psi.dot(basis[1].psi)), 1e-12);
}

TEST(SolveConstraint, EmptyKernel) {
  Operator hs = Operator::Zero(2, 2);
  hs.diagonal() << 5.0, 7.0;
  EXPECT_THROW(solve_constraint(UniverseSpec(ClockNetwork::single(ClockModel::from_spectrum({-1.0, 1.0})), hs)),
               EmptyKernel);
}

TEST(SolveConstraint, RandomUniverseResiduals) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_universe(rng, 2 + trial % 3);
    for (const auto& h : solve_constraint(u)) EXPECT_LE(h.constraint_residual, 1e-9 * op_norm(assemble_hamiltonian(u)));
  }
}

TEST(SelectHistory, SingleElementUnchanged) {
  const auto basis = solve_constraint(qubit_universe());
  const std::vector<HistoryState> one{basis[0]};
  const Complex c[] = {1.0};
  EXPECT_LE((select_history(one, c).psi - basis[0].psi).norm(), 1e-15);
}

TEST(SelectHistory, EqualCombinationIsNormalized) {
  const auto basis = solve_constraint(qubit_universe());
  const Complex c[] = {1.0, 1.0};
  const auto h = select_history(basis, c);
  EXPECT_NEAR(h.psi.norm(), 1.0, 1e-15);
  EXPECT_LE(h.constraint_residual, 1e-12);
}

TEST(SelectHistory, Errors) {
  const auto basis = solve_constraint(qubit_universe());
  const Complex one[] = {1.0};
  EXPECT_THROW(select_history(basis, one), DimensionError);
  const std::vector<HistoryState> twice{basis[0], basis[0]};
  const Complex cancel[] = {1.0, -1.0};
  EXPECT_THROW(select_history(twice, cancel), Error);
}

TEST(SelectHistory, EnergyAlignedSchmidtBasisGivesFlatAmplitude) {
  const auto u = two_spin_universe(1.0, 0.5, 0.0);
  const auto h = energy_paired_history(u);
  EXPECT_LE(h.constraint_residual, 1e-12);
  for (double t : default_grid(u, Scope::global(), 64).nodes)
    EXPECT_NEAR(std::pow(condition_global(h, t).amplitude, 2), 0.25, 1e-12);
}

TEST(ConditionGlobal, TwoLevelAmplitudeFormula) {
  const double omega = 1.3, a0 = 0.8, a1 = 0.6;
  const auto u = qubit_universe(omega);
  const auto& c = u.clock.clock(0);
  const Ket psi = a0 * tensor_product(c.time_state(0.0), basis_ket(2, 0)) +
                  a1 * tensor_product(c.time_state(kPi / (2 * omega)), basis_ket(2, 1));
  const auto h = make_history(u, psi);
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const double want = std::sqrt(a0 * a0 * std::pow(std::cos(omega * t), 2) + a1 * a1 * std::pow(std::sin(omega * t), 2));
    EXPECT_NEAR(condition_global(h, t).amplitude, want, 1e-14);
  }
}

TEST(ConditionGlobal, ConstraintBuiltQubitIsFlat) {
  const auto u = qubit_universe(1.0);
  for (const auto& h : solve_constraint(u))
    for (double t : TimeGrid::uniform(0.0, kPi, 50).nodes)
      EXPECT_NEAR(condition_global(h, t).amplitude, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(ConditionGlobal, ReferenceNode) {
  std::mt19937_64 rng(71);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  const Ket direct = contract_site(h.psi, Dims{3, 3}, 0, u.clock.reference_state());
  EXPECT_NEAR(fidelity(condition_global(h, 0.0).psi, direct), 1.0, 1e-14);
}

TEST(ConditionGlobal, EvolutionWithoutEvolution) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_universe(rng, 2 + trial % 3);
    const auto h = random_history(rng, u);
    const Ket psi0 = condition_global(h, 0.0).psi;
    for (double t : {0.3, 1.1, 4.7}) {
      const Ket want = oracle::taylor_exp(u.system_hamiltonian, t, 128) * psi0;
      EXPECT_GE(fidelity(condition_global(h, t).psi, want), 1.0 - 1e-10);
    }
  }
}

TEST(ConditionGlobal, ZeroAmplitudeThrows) {
  const double omega = 1.0;
  const auto u = qubit_universe(omega);
  const Ket psi = tensor_product(u.clock.clock(0).time_state(0.0), basis_ket(2, 0));
  const auto h = make_history(u, psi);
  try {
    condition_global(h, kPi / (2 * omega));
    FAIL() << "expected ZeroAmplitude";
  } catch (const ZeroAmplitude& e) {
    EXPECT_NEAR(e.label(), kPi / 2, 1e-15);
    EXPECT_LE(e.amplitude(), kConditioningFloor);
  }
}

TEST(ConditionGlobal, GlobalPhaseInvariance) {
  std::mt19937_64 rng(79);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  const auto hp = make_history(u, std::exp(kI * 0.77) * h.psi);
  for (double t : {0.0, 1.3}) {
    const auto a = condition_global(h, t), b = condition_global(hp, t);
    EXPECT_NEAR(a.amplitude, b.amplitude, 1e-15);
    EXPECT_NEAR(fidelity(a.psi, b.psi), 1.0, 1e-14);
  }
}

TEST(ConditionLocal, NonInteractingTwoSpinAmplitude) {
  const auto h = energy_paired_history(two_spin_universe(1.0, 0.5, 0.0));
  for (double tau : TimeGrid::uniform(0.0, kPi, 40).nodes) {
    EXPECT_NEAR(condition_local(h, "A", tau).amplitude, 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(condition_local(h, "B", tau).amplitude, 1.0 / std::sqrt(2.0), 1e-12);
  }
}

TEST(ConditionLocal, RestEvolvesWithSystemPlusOtherClocks) {
  const auto u = two_spin_universe(1.0, 0.5, 0.0, 7);
  std::mt19937_64 rng(83);
  const auto h = random_history(rng, u);
  const Operator rest_h = embed_in_rest(u, Scope::local(0), u.clock.clock(1).hamiltonian(), 1) +
                          embed_in_rest(u, Scope::local(0), u.system_hamiltonian, 2);
  const Ket psi0 = condition_local(h, 0, 0.0).psi;
  for (double tau : {0.4, 2.0}) {
    const Ket want = oracle::taylor_exp(rest_h, tau, 128) * psi0;
    EXPECT_GE(fidelity(condition_local(h, 0, tau).psi, want), 1.0 - 1e-10);
  }
}

TEST(ConditionLocal, JointConditioningThroughGlobalResolution) {
  // (⊗_J <tau_J| ⊗ 1) Psi = weight sum_n F(taus | t_n) a(t_n) psi(t_n)
  const auto u = two_spin_universe(1.0, 0.5, 0.0, 3);
  std::mt19937_64 rng(89);
  const auto h = random_history(rng, u);
  const auto res = build_resolution(u.clock.global_clock(), ResolutionKind::DiscreteOrthonormal);
  const double taus[] = {0.7, -0.4};
  Ket via_global = Ket::Zero(4);
  for (double t : res.nodes)
    via_global += res.weight * u.clock.transition_amplitude(taus, t) * project_time(h, Scope::global(), t);
  const auto joint = condition_joint(h, taus);
  EXPECT_LE((joint.amplitude * joint.psi - via_global).norm(), 1e-12);
}

TEST(ConditionLocal, SingleClockNetworkMatchesGlobal) {
  std::mt19937_64 rng(97);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  for (double t : {0.0, 0.9, 2.4}) {
    const auto g = condition_global(h, t), l = condition_local(h, 0, t);
    EXPECT_NEAR(g.amplitude, l.amplitude, 1e-14);
    EXPECT_LE((g.psi - l.psi).norm(), 1e-14);
  }
}

TEST(ConditionalDensity, PureAndConsistent) {
  std::mt19937_64 rng(101);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  const auto d = conditional_density(h, Scope::global(), 0.6);
  EXPECT_NEAR((d.rho * d.rho).trace().real(), 1.0, 1e-10);
  EXPECT_NEAR(d.rho.trace().real(), 1.0, 1e-12);
  EXPECT_GE(oracle::hermitian_eigenvalues(d.rho).front(), -1e-10);
  const Ket p = condition_global(h, 0.6).psi;
  EXPECT_LE(max_abs(d.rho - p * p.adjoint()), 1e-15);
}

TEST(ConditionalDensity, VonNeumannByFiniteDifference) {
  std::mt19937_64 rng(103);
  const auto u = random_universe(rng, 4);
  const auto h = random_history(rng, u);
  const double step = 1e-5;
  for (double t : {0.2, 1.5}) {
    const Operator rho = conditional_density(h, Scope::global(), t).rho;
    const Operator drho = oracle::central_difference(
        [&](double x) { return Operator(conditional_density(h, Scope::global(), x).rho); }, t, step);
    EXPECT_LE(max_abs(drho + kI * commutator(u.system_hamiltonian, rho)), 1e-6);
  }
}

TEST(Expectation, IdentityIsOne) {
  std::mt19937_64 rng(107);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  EXPECT_NEAR(expectation(h, identity(3), Scope::global(), 0.4), 1.0, 1e-14);
  EXPECT_THROW(expectation(h, identity(2), Scope::global(), 0.4), DimensionError);
}

TEST(Expectation, HeisenbergByFiniteDifference) {
  std::mt19937_64 rng(109);
  const auto u = random_universe(rng, 3);
  const auto h = random_history(rng, u);
  const Operator o = oracle::random_hermitian(rng, 3);
  const double step = 1e-5;
  for (double t : {0.3, 2.1}) {
    const double deriv =
        (expectation(h, o, Scope::global(), t + step) - expectation(h, o, Scope::global(), t - step)) / (2 * step);
    const Operator rho = conditional_density(h, Scope::global(), t).rho;
    const double want = (-kI * (commutator(o, u.system_hamiltonian) * rho).trace()).real();
    EXPECT_NEAR(deriv, want, 1e-6);
  }
}

TEST(Expectation, GlobalAndLocalClocksAgreeWithoutInteraction) {
  // clock B sits in a single energy level, so S is not correlated with B and
  // the two readings of O_S coincide
  auto net = ClockNetwork::two_spin(1.0, 0.5, 0.0);
  const std::size_t levels[] = {0, 2};  // (-,-) and (+,-)
  std::mt19937_64 rng(113);
  const auto u = UniverseSpec(net, matched_system_hamiltonian(net, levels, oracle::random_unitary(rng, 2)));
  const Complex w[] = {Complex(0.6, 0.1), Complex(-0.3, 0.7)};
  const auto h = energy_paired_history(u, w);
  const Operator o = oracle::random_hermitian(rng, 2);
  const Operator o_rest = embed_in_rest(u, Scope::local(0), o, 2);
  for (double t : TimeGrid::uniform(0.0, 2 * kPi, 16).nodes)
    EXPECT_NEAR(expectation(h, o, Scope::global(), t), expectation(h, o_rest, Scope::local(0), t), 1e-10);
}

TEST(AmplitudeProfile, NonInteractingIsFlat) {
  const auto u = two_spin_universe(1.0, 0.5, 0.0);
  std::mt19937_64 rng(127);
  const auto h = random_history(rng, u);
  const auto p = amplitude_profile(h, Scope::global(), default_grid(u, Scope::global()));
  EXPECT_EQ(p.t.size(), kDefaultGridNodes);
  EXPECT_LE(p.max_deviation(), 1e-12);
}

TEST(AmplitudeProfile, GravitationalLikeIsStillFlat) {
  const auto u = two_spin_universe(1.0, 0.5, 0.3);
  std::mt19937_64 rng(131);
  const auto h = random_history(rng, u);
  EXPECT_LE(h.constraint_residual, 1e-12);
  const auto p = amplitude_profile(h, Scope::global(), TimeGrid::uniform(0.0, 50.0, 300));
  EXPECT_LE(p.max_deviation(), 1e-12);
  EXPECT_NEAR(p.a.front(), 0.5, 1e-12);
}

TEST(AmplitudeProfile, ProbabilityIntegratesToOne) {
  // arbitrary (non-constraint) state on a rational clock
  std::mt19937_64 rng(137);
  const auto u = UniverseSpec(ClockNetwork::single(ClockModel::from_spectrum({-1.0, 0.0, 0.5, 2.0})),
                              oracle::random_hermitian(rng, 2));
  const auto h = make_history(u, oracle::random_state(rng, 8));
  const auto p = amplitude_profile(h, Scope::global(), default_grid(u, Scope::global()));
  EXPECT_NEAR(p.quadrature_sum, 1.0, 1e-8);
  EXPECT_GT(p.max_deviation(), 1e-3);
}

TEST(AmplitudeProfile, ClockCoefficientsReproduceAmplitude) {
  std::mt19937_64 rng(139);
  for (double g : {0.0, 0.3}) {
    const auto u = UniverseSpec(ClockNetwork::two_spin(1.0, 0.5, g), oracle::random_hermitian(rng, 2));
    const auto h = make_history(u, oracle::random_state(rng, 8));
    for (double t : {0.0, 0.8, 3.3})
      EXPECT_NEAR(amplitude_squared_from_coefficients(h, t), std::pow(project_time(h, Scope::global(), t).norm(), 2),
                  1e-12);
  }
}

TEST(Reconstruction, ResolutionRebuildsHistory) {
  std::mt19937_64 rng(149);
  const auto u = two_spin_universe(1.0, 0.5, 0.3, 5);
  const auto h = random_history(rng, u);
  for (auto kind : {ResolutionKind::OvercompleteDiscrete, ResolutionKind::Quadrature}) {
    const auto res = build_resolution(u.clock.global_clock(), kind);
    EXPECT_GE(fidelity(reconstruct_history(h, res), h.psi), 1.0 - 1e-10);
    EXPECT_NEAR(reconstruct_history(h, res).norm(), 1.0, 1e-9);
  }
}

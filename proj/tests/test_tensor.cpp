#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pawclock/tensor.hpp"

using namespace pawclock;

namespace {

void expect_near_vec(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "index " << k;
}

std::vector<double> eigenvalues(const SpectralDecomposition& s) {
  return {s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size()};
}

}  // namespace

TEST(TensorProduct, IdentityTimesIdentity) {
  EXPECT_EQ(max_abs(tensor_product(identity(2), identity(2)) - identity(4)), 0.0);
}

TEST(TensorProduct, FirstFactorIsSlowestIndex) {
  const Ket e0 = basis_ket(2, 0);
  const Ket out = tensor_product(pauli_x(), identity(2)) * tensor_product(e0, e0);
  EXPECT_EQ((out - tensor_product(basis_ket(2, 1), e0)).norm(), 0.0);
  EXPECT_EQ(out(2), Complex(1.0));
}

TEST(TensorProduct, XXSpectrumMatchesJacobiOracle) {
  const Operator xx = tensor_product(pauli_x(), pauli_x());
  const auto want = oracle::hermitian_eigenvalues(xx);
  expect_near_vec(want, {-1, -1, 1, 1}, 1e-14);
  expect_near_vec(eigenvalues(eig_hermitian(xx)), want, 1e-14);
}

TEST(TensorProduct, MixedProductProperty) {
  std::mt19937_64 rng(11);
  const Operator a = oracle::random_hermitian(rng, 2), b = oracle::random_hermitian(rng, 3);
  const Ket v = oracle::random_state(rng, 2), w = oracle::random_state(rng, 3);
  EXPECT_LT((tensor_product(a, b) * tensor_product(v, w) - tensor_product(Ket(a * v), Ket(b * w))).norm(), 1e-14);
}

TEST(EmbedLocal, SiteZeroOfTwoQubits) {
  const Dims dims{2, 2};
  EXPECT_EQ(max_abs(embed_local(pauli_x(), 0, dims) - tensor_product(pauli_x(), identity(2))), 0.0);
}

TEST(EmbedLocal, IdentityEmbedsToGlobalIdentity) {
  const Dims dims{2, 3, 2};
  for (std::size_t s = 0; s < dims.size(); ++s)
    EXPECT_EQ(max_abs(embed_local(identity(dims[s]), s, dims) - identity(12)), 0.0);
}

TEST(EmbedLocal, DifferentSitesCommute) {
  const Dims dims{2, 2, 3};
  const Operator a = embed_local(pauli_x(), 0, dims), b = embed_local(pauli_x(), 1, dims);
  EXPECT_LE(op_norm(commutator(a, b)), 1e-14);
}

TEST(EmbedLocal, Errors) {
  const Dims dims{2, 3};
  EXPECT_THROW(embed_local(pauli_x(), 2, dims), DimensionError);
  EXPECT_THROW(embed_local(pauli_x(), 1, dims), DimensionError);
}

TEST(EigHermitian, PauliX) {
  const auto s = eig_hermitian(pauli_x());
  expect_near_vec(eigenvalues(s), {-1, 1}, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  Ket minus(2), plus(2);
  minus << r, -r;
  plus << r, r;
  EXPECT_NEAR(fidelity(s.vector(0), minus), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(s.vector(1), plus), 1.0, 1e-15);
}

TEST(EigHermitian, DiagonalIsSortedWithPermutedBasis) {
  Operator d = Operator::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const auto s = eig_hermitian(d);
  expect_near_vec(eigenvalues(s), {1, 2, 3}, 1e-15);
  EXPECT_NEAR(std::abs(s.vector(0)(1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s.vector(1)(2)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s.vector(2)(0)), 1.0, 1e-15);
}

TEST(EigHermitian, TwoSpinClockSpectrum) {
  const Operator h = tensor_product(pauli_x(), identity(2)) + 0.5 * tensor_product(identity(2), pauli_x());
  const auto want = oracle::hermitian_eigenvalues(h);
  expect_near_vec(want, {-1.5, -0.5, 0.5, 1.5}, 1e-14);
  expect_near_vec(eigenvalues(eig_hermitian(h)), want, 1e-14);
}

TEST(EigHermitian, RejectsNonHermitian) {
  Operator m = pauli_x();
  m(0, 1) = 2.0;
  EXPECT_THROW(eig_hermitian(m), NotHermitian);
}

TEST(EigHermitian, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = oracle::random_hermitian(rng, 2 + trial % 7);
    const auto s = eig_hermitian(h);
    EXPECT_LE(max_abs(s.reconstruct() - h), 1e-10 * op_norm(h));
    EXPECT_LE(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - identity(h.rows())), 1e-10);
    expect_near_vec(eigenvalues(s), oracle::hermitian_eigenvalues(h), 1e-10);
  }
}

TEST(Kernel, DiagonalHasOneVector) {
  Operator d = Operator::Zero(3, 3);
  d.diagonal() << 1.0, 0.0, -1.0;
  const auto k = kernel(d);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_NEAR(std::abs(k[0](1)), 1.0, 1e-15);
}

TEST(Kernel, PauliXIsEmpty) { EXPECT_TRUE(kernel(pauli_x()).empty()); }

TEST(Kernel, QubitClockAgainstMinusSigmaX) {
  const Operator h = tensor_product(pauli_x(), identity(2)) - tensor_product(identity(2), pauli_x());
  // oracle: a - b for a, b in {-1, 1}
  const auto ev = oracle::hermitian_eigenvalues(h);
  expect_near_vec(ev, {-2, 0, 0, 2}, 1e-14);
  const auto k = kernel(h);
  ASSERT_EQ(k.size(), 2u);
  for (const auto& v : k) EXPECT_LE((h * v).norm(), tol::kKernel * 2.0);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(5);
  EXPECT_LE(max_abs(evolve(oracle::random_hermitian(rng, 4), 0.0) - identity(4)), 1e-14);
}

TEST(Evolve, QubitClockQuarterPeriod) {
  const double omega = 1.7;
  const Ket r = basis_ket(2, 0);  // (|+> + |->)/sqrt2
  const Ket got = evolve(omega * pauli_x(), std::numbers::pi / (2 * omega)) * r;
  const double s = 1.0 / std::sqrt(2.0);
  Ket plus(2), minus(2);
  plus << s, s;
  minus << s, -s;
  const Ket want = (-kI / std::sqrt(2.0)) * (plus - minus);
  EXPECT_LE((got - want).norm(), 1e-14);
  EXPECT_LE(std::abs(got.dot(r)), 1e-15);
}

TEST(Evolve, GroupLawAndTaylorOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = oracle::random_hermitian(rng, 2 + trial % 5);
    const double s = ut(rng), t = ut(rng);
    const Operator us = evolve(h, s), ut_ = evolve(h, t);
    EXPECT_LE(max_abs(us * ut_ - evolve(h, s + t)), 1e-10);
    EXPECT_LE(max_abs(us - oracle::taylor_exp(h, s)), 1e-10);
    EXPECT_TRUE(is_unitary(us));
    EXPECT_LE(max_abs(commutator(us, h)), 1e-10);
  }
}

TEST(Evolve, GeneratorPropertyByFiniteDifference) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator h = oracle::random_hermitian(rng, 3);
    const auto spec = eig_hermitian(h);
    const double t = 0.37 * trial;
    const Operator deriv = oracle::central_difference([&](double x) { return spec.evolve(x); }, t, 1e-5);
    EXPECT_LE(op_norm(h * spec.evolve(t) - kI * deriv), 1e-6);
  }
}

TEST(EvolveGenerator, HermitianUsesSpectralRoute) {
  const auto ev = evolve_generator(pauli_x(), 0.4);
  EXPECT_EQ(ev.method, GeneratorEvolution::Method::Spectral);
  EXPECT_LE(max_abs(ev.propagator - evolve(pauli_x(), 0.4)), 1e-15);
}

TEST(EvolveGenerator, NonNormalDiagonalizable) {
  Operator g(2, 2);
  g << 1.0, 0.5, 0.0, 2.0;
  const auto ev = evolve_generator(g, 0.8);
  EXPECT_EQ(ev.method, GeneratorEvolution::Method::Diagonalizable);
  EXPECT_LE(max_abs(ev.propagator - oracle::taylor_exp(g, 0.8, 256)), 1e-12);
}

TEST(EvolveGenerator, JordanBlockFallsBackToStepDoubling) {
  Operator g(2, 2);
  g << 1.0, 1.0, 0.0, 1.0;
  const double t = 1.3;
  const auto ev = evolve_generator(g, t);
  EXPECT_EQ(ev.method, GeneratorEvolution::Method::TaylorStepDoubling);
  // exp(-i t J) = exp(-i t) [[1, -i t], [0, 1]]
  Operator want(2, 2);
  want << 1.0, -kI * t, 0.0, 1.0;
  want *= std::exp(-kI * t);
  EXPECT_LE(max_abs(ev.propagator - want), 1e-12);
}

TEST(Schmidt, ProductState) {
  std::mt19937_64 rng(13);
  const Ket v = oracle::random_state(rng, 2), w = oracle::random_state(rng, 3);
  const auto s = schmidt(tensor_product(v, w), 2, 3);
  ASSERT_EQ(s.rank, 1u);
  EXPECT_NEAR(s.coefficients[0], 1.0, 1e-14);
}

TEST(Schmidt, BellState) {
  Ket bell = (tensor_product(basis_ket(2, 0), basis_ket(2, 0)) + tensor_product(basis_ket(2, 1), basis_ket(2, 1))) /
             std::sqrt(2.0);
  const auto s = schmidt(bell, 2, 2);
  ASSERT_EQ(s.rank, 2u);
  EXPECT_NEAR(s.coefficients[0], 0.5, 1e-15);
  EXPECT_NEAR(s.coefficients[1], 0.5, 1e-15);
}

TEST(Schmidt, RandomStatesAgainstReducedDensityOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const Ket psi = oracle::random_state(rng, 6);
    const auto s = schmidt(psi, 2, 3);
    EXPECT_LE(s.rank, 2u);
    EXPECT_NEAR(s.coefficient_sum(), 1.0, 1e-12);
    EXPECT_LE((s.reconstruct() - psi).norm(), 1e-10);
    // oracle: eigenvalues of the reduced density on the left factor
    const Dims dims{2, 3};
    const std::size_t keep[] = {0};
    auto ev = oracle::hermitian_eigenvalues(partial_trace(psi * psi.adjoint(), dims, keep));
    std::sort(ev.rbegin(), ev.rend());
    for (std::size_t n = 0; n < s.rank; ++n) EXPECT_NEAR(s.coefficients[n], ev[n], 1e-10);
  }
}

TEST(Schmidt, DimensionMismatch) { EXPECT_THROW(schmidt(Ket::Ones(5), 2, 3), DimensionError); }

TEST(PartialTrace, ProductOfDensities) {
  std::mt19937_64 rng(19);
  const Ket v = oracle::random_state(rng, 2), w = oracle::random_state(rng, 3);
  const Operator ra = v * v.adjoint(), rb = w * w.adjoint();
  const Dims dims{2, 3};
  const std::size_t keep_a[] = {0}, keep_b[] = {1};
  EXPECT_LE(max_abs(partial_trace(tensor_product(ra, rb), dims, keep_a) - ra), 1e-15);
  EXPECT_LE(max_abs(partial_trace(tensor_product(ra, rb), dims, keep_b) - rb), 1e-15);
}

TEST(PartialTrace, BellReducesToMaximallyMixed) {
  Ket bell = (tensor_product(basis_ket(2, 0), basis_ket(2, 0)) + tensor_product(basis_ket(2, 1), basis_ket(2, 1))) /
             std::sqrt(2.0);
  const Dims dims{2, 2};
  for (std::size_t side : {0u, 1u}) {
    const std::size_t keep[] = {side};
    EXPECT_LE(max_abs(partial_trace(bell * bell.adjoint(), dims, keep) - 0.5 * identity(2)), 1e-15);
  }
}

TEST(PartialTrace, SchmidtSymmetryOfReducedSpectra) {
  std::mt19937_64 rng(23);
  const Dims dims{2, 3};
  const std::size_t ka[] = {0}, kb[] = {1};
  for (int trial = 0; trial < 20; ++trial) {
    const Ket psi = oracle::random_state(rng, 6);
    const Operator rho = psi * psi.adjoint();
    const Operator ra = partial_trace(rho, dims, ka), rb = partial_trace(rho, dims, kb);
    EXPECT_TRUE(is_hermitian(ra));
    EXPECT_NEAR(ra.trace().real(), 1.0, 1e-12);
    auto ea = oracle::hermitian_eigenvalues(ra), eb = oracle::hermitian_eigenvalues(rb);
    // rb has one extra (zero) eigenvalue
    EXPECT_NEAR(eb.front(), 0.0, 1e-10);
    EXPECT_NEAR(ea[0], eb[1], 1e-10);
    EXPECT_NEAR(ea[1], eb[2], 1e-10);
  }
}

TEST(PartialTrace, MiddleFactorOfThree) {
  std::mt19937_64 rng(29);
  const Ket a = oracle::random_state(rng, 2), b = oracle::random_state(rng, 3), c = oracle::random_state(rng, 2);
  const Ket psi = tensor_product(tensor_product(a, b), c);
  const Dims dims{2, 3, 2};
  const std::size_t keep[] = {1};
  EXPECT_LE(max_abs(partial_trace(psi * psi.adjoint(), dims, keep) - b * b.adjoint()), 1e-14);
  const std::size_t keep_outer[] = {0, 2};
  const Ket ac = tensor_product(a, c);
  EXPECT_LE(max_abs(partial_trace(psi * psi.adjoint(), dims, keep_outer) - ac * ac.adjoint()), 1e-14);
}

TEST(PartialTrace, DimensionMismatch) {
  const Dims dims{2, 2};
  const std::size_t keep[] = {0};
  EXPECT_THROW(partial_trace(identity(3), dims, keep), DimensionError);
}

TEST(ContractSite, MatchesExplicitBraTensorIdentity) {
  std::mt19937_64 rng(31);
  const Dims dims{2, 3, 2};
  const Ket psi = oracle::random_state(rng, 12), bra = oracle::random_state(rng, 3);
  // explicit (1 ⊗ <bra| ⊗ 1) as a 4 x 12 matrix
  const Operator proj = tensor_product(tensor_product(identity(2), Operator(bra.adjoint())), identity(2));
  EXPECT_LE((contract_site(psi, dims, 1, bra) - proj * psi).norm(), 1e-14);
}

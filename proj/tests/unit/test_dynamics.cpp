#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rsim/dynamics.hpp"

using namespace rsim;

TEST_SUITE("dynamics") {

TEST_CASE("single-chain Hamiltonian matches the Kronecker form") {
  const std::vector<int> cut{3, 4, 2};
  const ModeRegister reg({"sigma", "b1", "b2"}, cut);
  const Mat h = h_single_chain(0.7, reg).dense();
  const oracle::Mat ref = 0.7 * (oracle::raise(cut, 0) * oracle::lower(cut, 1) + oracle::lower(cut, 0) * oracle::raise(cut, 1));
  CHECK(oracle::max_abs(h - ref) < 1e-15);
  CHECK(h_single_chain(0.7, reg).hermiticity_residual() == 0.0);
}

TEST_CASE("spectral evolution equals the dense propagator") {
  const std::vector<int> cut{3, 3, 3};
  const ModeRegister reg({"sigma", "b1", "b2"}, cut);
  const FockOperator h = h_single_chain(1.3, reg);
  PureState psi{reg, Vec::Zero(reg.dimension()), 0.0};
  for (Index i = 0; i < reg.dimension(); ++i) psi.amplitudes[i] = cplx(std::sin(1.0 + i), std::cos(0.3 * i));
  psi.amplitudes.normalize();
  for (double tau : {0.0, 0.37, 2.9}) {
    const Vec ref = oracle::expm(cplx(0.0, -tau) * h.dense()) * psi.amplitudes;
    const PureState out = evolve(h, psi, tau);
    CHECK((out.amplitudes - ref).norm() < 1e-13);
    CHECK(std::abs(out.norm() - 1.0) < 1e-14);
  }
}

TEST_CASE("commuting two-chain terms reproduce the total Hamiltonian") {
  const ModeRegister reg({"sigma1", "b1", "sigma2", "b2"}, {3, 3, 3, 3});
  PureState psi = minkowski_vacuum(SqueezeParam::from_gamma(0.3), reg);
  const FockOperator h = h_two_chain(1.0, reg);
  const auto terms = h_two_chain_terms(1.0, reg);
  CHECK(terms.size() == 2);
  CHECK(commutator(terms[0], terms[1]).matrix().norm() == 0.0);
  const PureState a = evolve(h, psi, 0.8);
  const PureState b = evolve(terms, psi, 0.8);
  CHECK((a.amplitudes - b.amplitudes).norm() < 1e-13);
  CHECK(a.leakage == psi.leakage);
}

TEST_CASE("propagator evolution is bit-reproducible") {
  const ModeRegister reg({"sigma", "b1", "b2"}, {8, 8, 8});
  const Propagator p(h_single_chain(1.0, reg));
  const PureState psi = minkowski_vacuum(SqueezeParam::from_gamma(0.4), reg);
  const PureState a = p.evolve(psi, 1.234);
  const Propagator q(h_single_chain(1.0, reg));
  const PureState b = q.evolve(psi, 1.234);
  CHECK(a.amplitudes == b.amplitudes);
  CHECK(p.block_count() > 1);
}

TEST_CASE("non-Hermitian generators are refused") {
  const ModeRegister reg({"a", "b"}, {2, 2});
  const FockOperator bad = creation(reg, "a") * annihilation(reg, "b");
  CHECK_THROWS(Propagator{bad});
}

TEST_CASE("Rabi numbers from the Heisenberg solution") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.5);
  const HeisenbergNumbers a = heisenberg_numbers(sp, 1.0, M_PI / 2);
  CHECK(std::abs(a.n_sigma - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(a.n_b1) < 1e-15);
  const HeisenbergNumbers b = heisenberg_numbers(sp, 1.0, 0.0);
  CHECK(b.n_sigma == 0.0);
  CHECK(std::abs(b.n_b1 - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("number conservation of the chain coupling") {
  const ModeRegister reg({"sigma", "b1", "b2"}, {6, 6, 6});
  const FockOperator h = h_single_chain(1.0, reg);
  const FockOperator total = number_operator(reg, "sigma") + number_operator(reg, "b1");
  CHECK(commutator(h, total).matrix().norm() == 0.0);
}

TEST_CASE("tau grids") {
  const auto g1 = default_tau_grid(1.0, false);
  CHECK(g1.size() == 65);
  CHECK(g1.front() == 0.0);
  CHECK(std::abs(g1.back() - 2 * M_PI) < 1e-15);
  CHECK(std::abs(g1[16] - M_PI / 2) < 1e-15);
  const auto g2 = default_tau_grid(2.0, true, 5);
  CHECK(std::abs(g2.back() - M_PI / 2) < 1e-15);
  CHECK_THROWS(linear_grid(0, 1, 0));
}

TEST_CASE("generic duality Hamiltonian checks its commutators") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.3);
  const ModeRegister reg({"sigma1", "b1", "sigma2", "b2"}, {5, 5, 5, 5});
  const BogoliubovFrame a = bogoliubov_frame(sp, reg);
  const CollectiveBFrame b = collective_B_frame(sp, reg);
  CommutatorCheck chk;
  const FockOperator h = h_generic_duality(1.0, a.a1, a.a2, b.B1, b.B2, &chk);
  CHECK(chk.passed);
  CHECK(h.hermiticity_residual() < 1e-14);
  // Written in frame operators the coupling is the two-chain Hamiltonian; exact away from the top levels.
  const FockOperator h2 = h_two_chain(1.0, reg);
  const auto in = interior_indices(reg, 2);
  const Mat d = restrict_matrix(h.dense() - h2.dense(), in, in);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-13);
}

}  // TEST_SUITE

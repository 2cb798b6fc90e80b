#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rsim/closedform.hpp"
#include "rsim/dynamics.hpp"
#include "rsim/identities.hpp"

using namespace rsim;

namespace {

ModeRegister single_register(int n) { return ModeRegister({"sigma", "b1", "b2"}, {n, n, n}); }
ModeRegister two_register(int n) { return ModeRegister({"sigma1", "b1", "sigma2", "b2"}, {n, n, n, n}); }

}  // namespace

TEST_SUITE("closedform") {

TEST_CASE("single chain at tau = 0 is the Minkowski vacuum") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.5);
  const ModeRegister reg = single_register(tail_policy_cutoff(0.5));
  const ClosedFormResult r = psi_single_chain(sp, 1.0, 0.0, reg);
  CHECK((r.state.amplitudes - minkowski_vacuum(sp, reg).amplitudes).norm() < 1e-15);
  CHECK(std::abs(r.leakage - std::pow(0.5, 2 * (tail_policy_cutoff(0.5) + 1))) < 1e-15);
  CHECK_FALSE(r.construction.empty());
}

TEST_CASE("single chain closed form against evolution") {
  for (double g : {0.1, 0.3, 0.5}) {
    const SqueezeParam sp = SqueezeParam::from_gamma(g);
    const ModeRegister reg = single_register(tail_policy_cutoff(g));
    const Propagator p(h_single_chain(1.0, reg));
    const PureState m = minkowski_vacuum(sp, reg);
    for (double tau : {0.3, M_PI / 2, 2.2, M_PI}) {
      const ClosedFormResult cf = psi_single_chain(sp, 1.0, tau, reg);
      const PureState ev = p.evolve(m, tau);
      CHECK(std::abs(overlap(cf.state, ev)) > 1 - 1e-8 - cf.leakage - ev.leakage);
      CHECK((cf.state.amplitudes - ev.amplitudes).norm() < 1e-12);
    }
  }
}

TEST_CASE("Minkowski-vacuum routes agree with the Rindler-vacuum routes") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.4);
  const int n = tail_policy_cutoff(0.4);
  const ModeRegister r1 = single_register(n);
  for (double tau : {0.4, 1.9}) {
    const Vec a = psi_single_chain(sp, 1.0, tau, r1).state.amplitudes;
    const Vec b = psi_single_chain_from_minkowski(sp, 1.0, tau, r1).state.amplitudes;
    CHECK((a - b).norm() < 1e-12);
  }
  const ModeRegister r2 = two_register(10);
  const SqueezeParam s2 = SqueezeParam::from_gamma(0.2);
  for (double tau : {0.4, 1.3}) {
    const Vec a = psi_two_chain(s2, 1.0, tau, r2).state.amplitudes;
    const Vec b = psi_two_chain_from_minkowski(s2, 1.0, tau, r2).state.amplitudes;
    // Both are exact projections only on the interior of the four-mode box.
    double worst = 0.0;
    for (Index i : interior_indices(r2, 2)) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("at g tau = pi/2 the field is empty and the chains carry the squeezing") {
  const double g = 0.3;
  const SqueezeParam sp = SqueezeParam::from_gamma(g);
  const int n = tail_policy_cutoff(g);
  const ModeRegister reg = two_register(n);
  const PureState s = psi_two_chain(sp, 1.0, M_PI / 2, reg).state;
  // sqrt(1-g^2) exp(-g s1^dag s2^dag)|0>
  const ModeRegister chains({"sigma1", "sigma2"}, {n, n});
  const PureState bv = b_frame_vacuum(sp, chains, ChainModes{});
  for (int k = 0; k <= n; ++k) {
    CHECK(std::abs(s.amplitude({k, 0, k, 0}) - bv.amplitude({k, k})) < 1e-15);
  }
  const DensityMatrix field = partial_trace(s, {"b1", "b2"});
  CHECK(std::abs(field.rho(0, 0).real() - 1.0) < 1e-12);
}

TEST_CASE("thermal marginals") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.5);
  const DensityMatrix b = rho_b1_thermal(sp, 1.0, M_PI / 2, 20);
  CHECK(std::abs(b.rho(0, 0).real() - 1.0) < 1e-15);
  CHECK(b.leakage < 1e-15);
  const DensityMatrix s0 = rho_sigma_thermal(sp, 1.0, 0.0, 20);
  CHECK(std::abs(s0.rho(0, 0).real() - 1.0) < 1e-15);
  const DensityMatrix b0 = rho_b1_thermal(sp, 1.0, 0.0, 20);
  for (int m = 0; m <= 20; ++m) CHECK(std::abs(b0.rho(m, m).real() - 0.75 * std::pow(0.25, m)) < 1e-16);
  CHECK(std::abs(b0.rho.trace().real() + b0.leakage - 1.0) < 1e-15);
}

TEST_CASE("evolved marginal matches the thermal form and the binomial oracle") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.3);
  const int n = tail_policy_cutoff(0.3);
  const ModeRegister reg = single_register(n);
  const PureState ev = evolve(h_single_chain(1.0, reg), minkowski_vacuum(sp, reg), 0.9);
  const DensityMatrix rb = partial_trace(ev, {"b1"});
  const DensityMatrix th = rho_b1_thermal(sp, 1.0, 0.9, n);
  const DensityMatrix bo = binomial_trace_oracle(sp, 1.0, 0.9, n);
  CHECK((rb.rho - th.rho).cwiseAbs().maxCoeff() < 1e-8 + ev.leakage);
  CHECK((bo.rho - th.rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("frame-operator form agrees with the single-chain state") {
  for (double g : {0.3, 0.5}) {
    const SqueezeParam sp = SqueezeParam::from_gamma(g);
    const ModeRegister reg = single_register(tail_policy_cutoff(g));
    const BogoliubovFrame f = bogoliubov_frame(sp, reg);
    for (double tau : {0.0, 1.1, M_PI}) {
      const ClosedFormResult um = psi_unruh_minkowski(sp, 1.0, tau, reg, f);
      const ClosedFormResult sc = psi_single_chain(sp, 1.0, tau, reg);
      CHECK(std::abs(overlap(um.state, sc.state)) > 1 - 1e-7 - um.leakage - sc.leakage);
    }
  }
}

TEST_CASE("pair correlation of the frame photons at g tau = pi") {
  const double g = 0.3;
  const SqueezeParam sp = SqueezeParam::from_gamma(g);
  const ModeRegister reg = single_register(tail_policy_cutoff(g));
  const BogoliubovFrame f = bogoliubov_frame(sp, reg);
  const PureState s = psi_unruh_minkowski(sp, 1.0, M_PI, reg, f).state;
  const double lam = 2 * g / (1 + g * g);
  const double expect = lam * lam * (1 + lam * lam) / std::pow(1 - lam * lam, 2);
  const double got = expectation(s, f.a1.adjoint() * f.a2.adjoint() * f.a2 * f.a1).real();
  CHECK(std::abs(got - expect) / expect < 1e-6);
}

TEST_CASE("duality form agrees with the two-chain state") {
  const double g = 0.3;
  const SqueezeParam sp = SqueezeParam::from_gamma(g);
  const int n = tail_policy_cutoff(g);
  const ModeRegister reg = two_register(n);
  const int l = n + (n + 3) / 4;
  const FramePair a = bogoliubov_frame(sp, reg, {}, l).pair();
  const FramePair b = collective_B_frame(sp, reg, {}, l).pair();
  for (double tau : {0.0, 0.6, M_PI / 2}) {
    const ClosedFormResult d = psi_duality(sp, 1.0, tau, reg, a, b);
    const ClosedFormResult t = psi_two_chain(sp, 1.0, tau, reg);
    CHECK(std::abs(overlap(d.state, t.state)) > 1 - 1e-7 - d.leakage - t.leakage);
  }
}

TEST_CASE("creation product") {
  const ModeRegister reg({"a", "b"}, {2, 2});
  const PureState s = apply_exp_series(creation_product(reg, {"a", "b"}) * cplx(0.0), vacuum_state(reg));
  CHECK((s.amplitudes - vacuum_state(reg).amplitudes).norm() == 0.0);
  const Vec v = creation_product(reg, {"a", "a", "b"}).apply(vacuum_state(reg).amplitudes);
  CHECK(std::abs(v[reg.index({2, 1})] - cplx(std::sqrt(2.0))) < 1e-15);
}

}  // TEST_SUITE

#include <cmath>

#include "doctest.h"
#include "rsim/closedform.hpp"
#include "rsim/identities.hpp"

using namespace rsim;

TEST_SUITE("identities") {

TEST_CASE("shift identity") {
  const IdentityReport zero = check_shift_identity(0.0, 8);
  CHECK(zero.residual_norm == 0.0);
  CHECK(zero.passed);
  for (int which : {1, 2}) {
    const IdentityReport r = check_shift_identity(0.5, 10, which);
    CHECK(r.residual_norm < 1e-8);
    CHECK(r.norm_kind == "operator");
    CHECK(r.interior_levels_excluded == 2);
  }
  CHECK_THROWS(check_shift_identity(1.0, 8));
}

TEST_CASE("beam-splitter conjugations on both chains") {
  const auto rs = check_conjugation_identities(cplx(0.0, -0.7), 8);
  CHECK(rs.size() == 4);
  for (const auto& r : rs) {
    CHECK(r.residual_norm < 1e-8);
    CHECK(r.passed);
  }
  for (const auto& r : check_conjugation_identities(cplx(0.4, 0.9), 10)) CHECK(r.residual_norm < 1e-8);
  for (const auto& r : check_conjugation_identities(cplx(0.0), 6)) CHECK(r.residual_norm < 1e-14);
}

TEST_CASE("squeeze rebasing") {
  const double g = 0.3;
  const IdentityReport r = check_squeeze_rebasing(g * (1 - std::cos(1.0)), g, 10);
  CHECK(r.residual_norm < 1e-8);
  CHECK(r.norm_kind == "vector");
  // A = g undoes the squeezing: the left side is sqrt(1-g^2)|0_R>.
  CHECK(check_squeeze_rebasing(0.5, 0.5, 12).residual_norm < 1e-8);
  CHECK_THROWS_AS(check_squeeze_rebasing((0.81 - 1.0) / 0.9, 0.9, 8), SingularInput);
  CHECK_THROWS_AS(check_squeeze_rebasing(-0.6, 0.5, 8), std::domain_error);
}

TEST_CASE("exponential reordering") {
  const IdentityReport r = check_exp_reordering(cplx(0.0, 0.4), -0.3, 10);
  CHECK(r.residual_norm < 1e-8);
  CHECK(check_exp_reordering(0.7, 0.5, 8).residual_norm < 1e-8);
}

TEST_CASE("state equations hold for the closed forms") {
  CHECK(check_single_chain_state_equation(0.5, 1.0, 0.7, 10).residual_norm < 1e-8);
  CHECK(check_two_chain_state_equation(0.5, 1.0, 0.7, 8).residual_norm < 1e-8);
  CHECK(check_single_chain_state_equation(0.3, 2.0, 1.4, 8).residual_norm < 1e-8);
}

TEST_CASE("Riccati solution branches") {
  // generic tangent branch against RK4
  CHECK(check_riccati(0.3, 0.1, 0.2, 1.0).residual < 1e-12);
  // complex coefficients
  CHECK(check_riccati(cplx(0.2, 0.1), cplx(-0.1, 0.05), cplx(0.3, -0.2), 1.5).residual < 1e-12);
  // alpha lambda = beta^2 gives the rational branch, f(1) = -A/(1 + A g - g^2)
  const double g = 0.3, a = 0.2, k = 1 / (1 - g * g);
  const cplx f = riccati_closed_form(a * k, a * g * k, a * g * g * k, 1.0);
  CHECK(std::abs(f - cplx(-a / (1 + a * g - g * g))) < 1e-15);
  CHECK(check_riccati(a * k, a * g * k, a * g * g * k, 1.0).residual < 1e-12);
  // lambda = 0 is linear
  CHECK(std::abs(riccati_closed_form(0.4, 0.0, 0.0, 2.0) - cplx(-0.8)) < 1e-15);
  CHECK(check_riccati(0.4, 0.3, 0.0, 2.0).residual < 1e-12);
  // negative mu^2 (hyperbolic) through the complex tangent
  CHECK(check_riccati(0.1, 0.5, 0.2, 1.0).residual < 1e-12);
}

TEST_CASE("binomial trace oracle") {
  const SqueezeParam sp = SqueezeParam::from_gamma(0.5);
  for (double gt : {0.0, 0.3, M_PI / 2, 2.5}) {
    const DensityMatrix a = binomial_trace_oracle(sp, 1.0, gt, 25);
    const DensityMatrix b = rho_b1_thermal(sp, 1.0, gt, 25);
    CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(a.leakage - b.leakage) < 1e-12);
  }
  try {
    binomial_trace_oracle(SqueezeParam::from_gamma(0.9), 1.0, 0.3, 10);
    FAIL("expected refusal");
  } catch (const InfeasibleCutoff& e) {
    CHECK(e.required_dimension() > 11);
  }
}

TEST_CASE("geometric closure") {
  for (double g : {0.1, 0.5, 0.8}) {
    for (int m = 0; m <= 6; ++m) CHECK(geometric_closure_residual(g, m) < 1e-12);
  }
  CHECK_THROWS(geometric_closure_residual(1.0, 1));
}

TEST_CASE("suite and monotone improvement") {
  const auto suite = run_identity_suite(10);
  CHECK(suite.size() >= 10);
  for (const auto& r : suite) {
    INFO(r.name);
    CHECK(r.passed);
    CHECK(r.residual_norm < kIdentityBound);
  }
  for (const auto& m : check_monotone({6, 8, 10, 12})) {
    INFO(m.name);
    CHECK(m.passed);
    CHECK(m.residuals.size() == 4);
  }
}

}  // TEST_SUITE

#include <cmath>

#include "doctest.h"
#include "rsim/rindler.hpp"

using namespace rsim;

namespace {

// |sum_m e^{i d z_m}| / M for a centred uniform chain: |sin(M d D/2) / (M sin(d D/2))|.
double dirichlet(int m, double d, double spacing) {
  const double x = 0.5 * d * spacing;
  if (std::abs(std::sin(x)) < 1e-300) return 1.0;
  return std::abs(std::sin(m * x) / (m * std::sin(x)));
}

}  // namespace

TEST_SUITE("rindler-geometry") {

TEST_CASE("trajectory values") {
  const ChainGeometry g = uniform_chain(1, 1.0);
  const SpacetimePoint p0 = trajectory(g, 0.0, 0.0);
  CHECK(p0.t == 0.0);
  CHECK(p0.z == 1.0);
  const SpacetimePoint p1 = trajectory(g, 0.0, 1.0);
  CHECK(std::abs(p1.t - 1.1752011936438014) < 1e-15);
  CHECK(std::abs(p1.z - 1.5430806348152437) < 1e-15);
  ChainGeometry h = g;
  h.a = 2.5;
  h.c = 1.7;
  CHECK(std::abs(trajectory(h, 0.0, 0.0).z - 1.7 * 1.7 / 2.5) < 1e-15);
}

TEST_CASE("worldlines are hyperbolae") {
  ChainGeometry g = uniform_chain(3, 0.5, 0.8, 1.3);
  for (double zbar : {-0.7, 0.0, 1.1}) {
    const double inv = std::pow(g.c * g.c / g.a, 2) * std::exp(2 * g.a * zbar / (g.c * g.c));
    for (double tau : {-2.0, 0.0, 0.5, 3.0}) {
      const SpacetimePoint p = trajectory(g, zbar, tau);
      CHECK(std::abs((p.z * p.z - g.c * g.c * p.t * p.t) - inv) / inv < 1e-12);
    }
  }
}

TEST_CASE("mode values") {
  const RindlerModeSpec r1{2.0};
  CHECK(std::abs(rindler_mode_value(r1, 0.0, 1.0) - cplx(1 / std::sqrt(2.0))) < 1e-15);
  for (double z : {0.3, 1.7, 9.0}) CHECK(std::abs(std::abs(rindler_mode_value(r1, 0.1, z)) - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(rindler_mode_value(r1, 1.0, 1.0) == cplx(0.0));
  CHECK(rindler_mode_value(r1, 2.0, 1.0) == cplx(0.0));
  const RindlerModeSpec r2{2.0, Wedge::Left};
  CHECK(rindler_mode_value(r2, 0.0, 1.0) == cplx(0.0));
  CHECK(std::abs(rindler_mode_value(r2, 2.0, 1.0) - cplx(1 / std::sqrt(2.0))) < 1e-15);
  CHECK_THROWS(rindler_mode_value(RindlerModeSpec{0.0}, 0.0, 1.0));
}

TEST_CASE("left-moving modes are the mirror image") {
  const RindlerModeSpec r{1.3, Wedge::Right, Direction::RightMoving};
  const RindlerModeSpec l{1.3, Wedge::Right, Direction::LeftMoving};
  for (double t : {-0.5, 0.0, 0.4}) {
    for (double z : {-3.0, -0.2, 0.7, 2.0}) CHECK(rindler_mode_value(l, t, z) == rindler_mode_value(r, t, -z));
  }
}

TEST_CASE("phase along a worldline is linear with slope -Omega") {
  const ChainGeometry g = uniform_chain(1, 1.0);
  const double omega = 1.7;
  const RindlerModeSpec spec{omega};
  auto phase = [&](double tau) {
    const SpacetimePoint p = trajectory(g, 0.0, tau);
    return std::arg(rindler_mode_value(spec, p.t, p.z) * std::exp(cplx(0.0, omega * tau)));
  };
  // After removing e^{-i Omega tau} nothing is left.
  for (double tau : {0.0, 0.3, 1.0, 2.0}) CHECK(std::abs(phase(tau)) < 1e-8);
  // Central difference of the unwrapped phase.
  const double h = 1e-5, tau = 0.6;
  auto raw = [&](double t) {
    const SpacetimePoint p = trajectory(g, 0.0, t);
    return omega * std::log(p.z - p.t);
  };
  CHECK(std::abs((raw(tau + h) - raw(tau - h)) / (2 * h) + omega) < 1e-8);
  // Off the reference worldline the phase is shifted by Omega a zbar / c^2.
  const SpacetimePoint q = trajectory(g, 0.4, 0.0);
  CHECK(std::abs(std::arg(rindler_mode_value(spec, q.t, q.z)) - omega * 0.4) < 1e-12);
}

TEST_CASE("collective coupling") {
  const ChainGeometry g = uniform_chain(64, 1.0);
  const RindlerModeSpec spec{1.0};
  const cplx on = collective_coupling(g, 1.0, spec);
  CHECK(std::abs(on.real() - 8.0) < 1e-12);
  CHECK(std::abs(on.imag()) < 1e-12);
  // lattice periodicity 2 pi / spacing
  CHECK(std::abs(std::abs(collective_coupling(g, 0.3, spec)) - std::abs(collective_coupling(g, 0.3 + 2 * M_PI, spec))) < 1e-11);
  // against the Dirichlet kernel
  for (double k : {0.9, 1.05, 1.2, 2.5}) {
    CHECK(std::abs(std::abs(collective_coupling(g, k, spec)) / 8.0 - dirichlet(64, 1.0 - k, 1.0)) < 1e-12);
  }
  ChainGeometry empty;
  CHECK_THROWS(collective_coupling(empty, 1.0, spec));
  const ChainGeometry one = uniform_chain(1, 1.0);
  for (double k : {-3.0, 0.0, 0.4, 5.0}) CHECK(std::abs(std::abs(collective_coupling(one, k, spec)) - 1.0) < 1e-15);
}

TEST_CASE("largest sidelobe beyond two main-lobe widths") {
  // The bound of 0.05 is not met: the first sidelobes beyond 4 pi/(M D) reach about 0.128.
  const int m = 64;
  const ChainGeometry g = uniform_chain(m, 1.0);
  const RindlerModeSpec spec{1.0};
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double dk = 4 * M_PI / m + (2 * M_PI - 8 * M_PI / m) * i / 20000.0;
    worst = std::max(worst, std::abs(collective_coupling(g, 1.0 - dk, spec)) / std::sqrt(m));
    worst_oracle = std::max(worst_oracle, dirichlet(m, dk, 1.0));
  }
  CHECK(std::abs(worst - worst_oracle) < 1e-12);
  CHECK(worst == doctest::Approx(0.1284).epsilon(5e-3));
  CHECK(worst > 0.05);
}

TEST_CASE("selectivity report") {
  const std::vector<double> om{0.5, 1.0, 1.5, 2.0};
  const SelectivityReport r64 = coupling_selectivity_report(uniform_chain(64, 1.0), om);
  CHECK(r64.dominance > 10);
  CHECK(r64.magnitude.rows() == 4);
  CHECK(r64.magnitude.cols() == 4);
  // Closed form at fixed spacing: min over the grid of sin(d/2)/|sin(M d/2)| times M.
  double expect = 1e300;
  for (double a : om) {
    for (double b : om) {
      if (a != b) expect = std::min(expect, 1.0 / dirichlet(64, a - b, 1.0));
    }
  }
  CHECK(std::abs(r64.dominance - expect) / expect < 1e-10);
  const double d16 = coupling_selectivity_report(uniform_chain(16, 1.0), om).dominance;
  const double d256 = coupling_selectivity_report(uniform_chain(256, 1.0), om).dominance;
  CHECK(d16 < r64.dominance);
  CHECK(r64.dominance < d256);
  CHECK(coupling_selectivity_report(uniform_chain(1, 1.0), om).dominance == doctest::Approx(1.0));
  const std::string csv = r64.to_csv();
  CHECK(csv.rfind("omega\\k,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("geometry helpers") {
  const ChainGeometry g = uniform_chain(5, 0.5, 2.0, 1.0, 3.0);
  CHECK(g.normalization() == doctest::Approx(std::sqrt(5.0)));
  CHECK(g.density() == doctest::Approx(2.0));
  CHECK(g.span() == doctest::Approx(2.5));
  CHECK(g.positions.front() == doctest::Approx(-1.0));
  CHECK(g.proper_frequency(0.5) == doctest::Approx(3.0 * std::exp(-1.0)));
  CHECK_THROWS(uniform_chain(0, 1.0));
  ChainGeometry bad = g;
  bad.a = -1;
  CHECK_THROWS(bad.validate());
}

}  // TEST_SUITE

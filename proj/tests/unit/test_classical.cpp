#include <cmath>

#include "doctest.h"
#include "rsim/classical.hpp"
#include "rsim/errors.hpp"

using namespace rsim;

namespace {

const cplx I(0.0, 1.0);

// Quadratic formula in nu^2, written out independently of the library.
std::pair<double, double> naive_roots(double w, double ck, double e) {
  const double b = w * w + ck * ck + e * e;
  const double disc = std::sqrt(b * b - 4 * w * w * ck * ck);
  return {std::sqrt(0.5 * (b + disc)), std::sqrt(std::max(0.0, 0.5 * (b - disc)))};
}

template <class F>
cplx d1(F f, double t, double h) {
  return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

template <class F>
cplx d2(F f, double t, double h) {
  return (-f(t - 2 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_SUITE("classical-modes") {

TEST_CASE("dispersion values") {
  const Dispersion d = dispersion({1.0, 1.0, 1.0, 0.1});
  CHECK(std::abs(d.nu_plus - 1.051249220) < 1e-6);
  CHECK(std::abs(d.nu_minus - 0.951249220) < 1e-6);
  CHECK(std::abs(d.nu_plus - (std::sqrt(1.0025) + 0.05)) < 1e-15);
  CHECK(std::abs(d.nu_minus - (std::sqrt(1.0025) - 0.05)) < 1e-15);
  // uncoupled
  const Dispersion u = dispersion({1.0, 0.6, 1.0, 0.0});
  CHECK(u.nu_plus == doctest::Approx(1.0));
  CHECK(u.nu_minus == doctest::Approx(0.6));
  const Dispersion v = dispersion({1.0, 1.8, 1.0, 0.0});
  CHECK(v.nu_plus == doctest::Approx(1.8));
  CHECK(v.nu_minus == doctest::Approx(1.0));
  // c enters only through ck
  const Dispersion w = dispersion({1.3, 0.5, 2.0, 0.2});
  const auto ref = naive_roots(1.3, 1.0, 0.2);
  CHECK(std::abs(w.nu_plus - ref.first) < 1e-13);
  CHECK(std::abs(w.nu_minus - ref.second) < 1e-13);
}

TEST_CASE("dispersion satisfies the quartic") {
  for (double k : {0.0, 0.2, 0.9, 1.0, 1.1, 3.0, -1.4}) {
    for (double e : {0.0, 0.05, 0.3, 1.0}) {
      const ClassicalModeParams p{1.2, k, 0.8, e};
      const Dispersion d = dispersion(p);
      const double ck2 = p.c * p.c * k * k, w2 = p.omega * p.omega;
      for (double nu : {d.nu_plus, d.nu_minus}) {
        const double n2 = nu * nu;
        const double scale = std::max({n2 * n2, w2 * ck2, 1.0});
        CHECK(std::abs(n2 * n2 - n2 * (w2 + ck2 + e * e) + w2 * ck2) / scale < 1e-12);
      }
      CHECK(d.nu_plus >= d.nu_minus);
    }
  }
}

TEST_CASE("resonant and far-detuned limits") {
  for (double e : {1e-3, 1e-2, 0.1}) {
    const ClassicalModeParams p{1.0, 1.0, 1.0, e};
    const Dispersion d = dispersion(p);
    CHECK(std::abs(d.nu_plus - (1.0 + e / 2)) < e * e);
    CHECK(std::abs(d.nu_minus - (1.0 - e / 2)) < e * e);
    CHECK(std::abs(rabi_classical(p) - e) < 1e-14);
  }
  const ClassicalModeParams far{1.0, 10.0, 1.0, 0.1};
  CHECK(std::abs(rabi_classical(far) - 9.0) < 0.01);
  CHECK(max_psi_squared(far) < 1e-3);
}

TEST_CASE("closed form initial values and equations of motion") {
  for (double k : {0.4, 1.0, 1.3}) {
    const ClassicalModeParams p{1.0, k, 1.0, 0.2};
    const ModeAmplitudes m0 = mode_solution(p, 0.0);
    CHECK(std::abs(m0.phi - cplx(1.0)) < 1e-14);
    CHECK(std::abs(m0.psi) < 1e-14);
    auto phi = [&](double t) { return mode_solution(p, t).phi; };
    auto psi = [&](double t) { return mode_solution(p, t).psi; };
    const double h = 1e-3;
    for (double t : {0.0, 0.7, 5.0, 31.0}) {
      const cplx r1 = d2(phi, t, h) + p.c * p.c * k * k * phi(t) - p.epsilon * d1(psi, t, h);
      const cplx r2 = d2(psi, t, h) + p.omega * p.omega * psi(t) + p.epsilon * d1(phi, t, h);
      CHECK(std::abs(r1) < 1e-8);
      CHECK(std::abs(r2) < 1e-8);
    }
  }
}

TEST_CASE("uncoupled oracle is a free plane wave") {
  const ClassicalModeParams p{1.0, 0.7, 1.0, 0.0};
  const ModeTrace t = ode_oracle(p, 50.0, 1e-3);
  double err = 0.0;
  for (std::size_t i = 0; i < t.tau.size(); i += 97) {
    err = std::max(err, std::abs(t.phi[i] - std::exp(-I * 0.7 * t.tau[i])));
    err = std::max(err, std::abs(t.psi[i]));
  }
  CHECK(err < 1e-8);
  CHECK(std::abs(mode_solution(p, 50.0).phi - std::exp(-I * 35.0)) < 1e-12);
}

TEST_CASE("full transfer on resonance") {
  const double e = 0.1;
  const ClassicalModeParams p{1.0, 1.0, 1.0, e};
  CHECK(std::abs(max_psi_squared(p) - 1.0) < 1e-12);
  CHECK(std::abs(std::norm(mode_solution(p, M_PI / e).psi) - 1.0) < 1e-12);
  const ModeTrace t = ode_oracle(p, M_PI / e, 0.01);
  CHECK(std::abs(std::norm(t.psi.back()) - 1.0) < 1e-3);
}

TEST_CASE("oracle agrees with the closed form") {
  for (double k : {0.0, 0.5, 1.0, 1.5}) {
    const ClassicalModeParams p{1.0, k, 1.0, 0.1};
    const ModeTrace t = ode_oracle(p, 60.0, 0.01);
    double err = 0.0;
    for (std::size_t i = 0; i < t.tau.size(); i += 13) {
      const ModeAmplitudes m = mode_solution(p, t.tau[i]);
      err = std::max({err, std::abs(m.phi - t.phi[i]), std::abs(m.psi - t.psi[i])});
    }
    CHECK(err < 1e-6);
    CHECK(t.halving_change < 1e-6);
  }
}

TEST_CASE("small coupling is continuous with the uncoupled solution") {
  const ClassicalModeParams p{1.0, 0.7, 1.0, 1e-4};
  for (double t : {1.0, 10.0, 40.0}) {
    const ModeAmplitudes m = mode_solution(p, t);
    CHECK(std::abs(m.phi - std::exp(-I * 0.7 * t)) < 1e-4 * (1 + t));
    CHECK(std::abs(m.psi) < 1e-3);
  }
}

TEST_CASE("degenerate and invalid inputs") {
  CHECK_THROWS_AS(mode_solution({1.0, 1.0, 1.0, 0.0}, 1.0), SingularInput);
  CHECK(max_psi_squared({1.0, 1.0, 1.0, 0.0}) == 0.0);
  CHECK_THROWS(dispersion({-1.0, 1.0, 1.0, 0.1}));
  CHECK_THROWS(dispersion({1.0, 1.0, 0.0, 0.1}));
  CHECK_THROWS(dispersion({1.0, 1.0, 1.0, -0.1}));
  CHECK_THROWS(ode_oracle({1.0, 1.0, 1.0, 0.1}, 0.0, 0.01));
  CHECK_THROWS_AS(ode_oracle({1.0, 1.0, 1.0, 0.1}, 20.0, 0.9, 1e-12), ConvergenceError);
}

TEST_CASE("energy is conserved") {
  const ClassicalModeParams p{1.0, 1.2, 1.0, 0.3};
  const ModeTrace t = ode_oracle(p, 100.0, 0.01);
  const double e0 = classical_energy(p, t.phi[0], t.dphi[0], t.psi[0], t.dpsi[0]);
  double drift = 0.0;
  for (std::size_t i = 0; i < t.tau.size(); ++i) {
    drift = std::max(drift, std::abs(classical_energy(p, t.phi[i], t.dphi[i], t.psi[i], t.dpsi[i]) - e0) / e0);
  }
  CHECK(drift < 1e-8);
}

TEST_CASE("spectral peaks sit at the normal-mode frequencies") {
  const ClassicalModeParams p{1.0, 1.0, 1.0, 0.1};
  const ModeTrace t = ode_oracle(p, 600.0, 0.01);
  const std::vector<double> peaks = spectral_peaks(t, 2.0);
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[0] - t.nu_plus) < 1e-4);
  CHECK(std::abs(peaks[1] - t.nu_minus) < 1e-4);
}

TEST_CASE("amplitude scan") {
  std::vector<double> ks;
  for (int i = 0; i <= 80; ++i) ks.push_back(2.0 * i / 80);
  const auto rows = amplitude_scan(1.0, 0.1, ks);
  REQUIRE(rows.size() == 81);
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].max_psi2 > rows[best].max_psi2) best = i;
    CHECK(rows[i].max_psi2 <= 1.0 + 1e-12);
  }
  CHECK(rows[best].k == doctest::Approx(1.0));
  CHECK(std::abs(rows[best].max_psi2 - 1.0) < 1e-6);
  CHECK(rows[0].max_psi2 < 1e-12);
  CHECK(rows[0].nu_minus == 0.0);
  CHECK(std::abs(rows[0].nu_plus - std::sqrt(1.01)) < 1e-14);
  // far detuned: a pinned value from the RK4 oracle, not the small-coupling estimate 0.0576
  const ScanRow& far = rows[60];
  CHECK(far.k == doctest::Approx(1.5));
  CHECK(far.max_psi2 == doctest::Approx(0.05538).epsilon(1e-3));
  CHECK(rows[best].max_psi2 / far.max_psi2 > 15);
  const std::string csv = scan_csv(rows, 1.0);
  CHECK(csv.rfind("k,kc_over_omega,nu_plus,nu_minus,rabi,max_psi2\n", 0) == 0);
}

TEST_CASE("far-detuned peak agrees with the oracle") {
  const ClassicalModeParams p{1.0, 1.5, 1.0, 0.1};
  const double period = 2 * M_PI / rabi_classical(p);
  const ModeTrace t = ode_oracle(p, period, 1e-3);
  double peak = 0.0;
  for (const cplx& v : t.psi) peak = std::max(peak, std::norm(v));
  CHECK(std::abs(peak - max_psi_squared(p)) < 1e-6);
  CHECK(std::abs(peak - 0.05538) < 5e-5);
}

}  // TEST_SUITE

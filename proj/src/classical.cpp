#include "rsim/classical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rsim {

namespace {

const cplx I(0.0, 1.0);

using State4 = Eigen::Matrix<cplx, 4, 1>;

State4 rhs(const ClassicalModeParams& p, const State4& y) {
  const double ck2 = p.c * p.c * p.k * p.k;
  State4 d;
  d[0] = y[1];
  d[1] = -ck2 * y[0] + p.epsilon * y[3];
  d[2] = y[3];
  d[3] = -p.omega * p.omega * y[2] - p.epsilon * y[1];
  return d;
}

// Initial data on the span of the two e^{-i nu t} eigenvectors with phi = 1, psi = 0.
State4 positive_frequency_start(const ClassicalModeParams& p) {
  const double ck2 = p.c * p.c * p.k * p.k;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = -ck2;
  m(1, 3) = p.epsilon;
  m(2, 3) = 1.0;
  m(3, 2) = -p.omega * p.omega;
  m(3, 1) = -p.epsilon;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m.cast<cplx>());
  std::vector<int> picks;
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues()[i].imag() < 0.0) picks.push_back(i);
  }
  if (picks.size() == 1) {
    // A zero frequency (k = 0) sits on the real axis; take it as the second mode.
    int zero = -1;
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
      if (i == picks[0]) continue;
      if (std::abs(es.eigenvalues()[i]) < best) {
        best = std::abs(es.eigenvalues()[i]);
        zero = i;
      }
    }
    picks.push_back(zero);
  }
  if (picks.size() != 2) throw SingularInput("classical oracle: cannot isolate positive frequencies");
  const Eigen::Vector4cd v1 = es.eigenvectors().col(picks[0]);
  const Eigen::Vector4cd v2 = es.eigenvectors().col(picks[1]);
  Eigen::Matrix2cd a;
  a << v1[0], v2[0], v1[2], v2[2];
  const Eigen::Vector2cd coef = a.fullPivLu().solve(Eigen::Vector2cd(1.0, 0.0));
  return coef[0] * v1 + coef[1] * v2;
}

ModeTrace integrate(const ClassicalModeParams& p, double tau_end, long steps) {
  ModeTrace t;
  const double h = tau_end / static_cast<double>(steps);
  t.dt = h;
  State4 y = positive_frequency_start(p);
  y[0] = 1.0;
  y[2] = 0.0;
  auto push = [&](double tau) {
    t.tau.push_back(tau);
    t.phi.push_back(y[0]);
    t.dphi.push_back(y[1]);
    t.psi.push_back(y[2]);
    t.dpsi.push_back(y[3]);
  };
  push(0.0);
  for (long s = 0; s < steps; ++s) {
    const State4 k1 = rhs(p, y);
    const State4 k2 = rhs(p, y + 0.5 * h * k1);
    const State4 k3 = rhs(p, y + 0.5 * h * k2);
    const State4 k4 = rhs(p, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    push(static_cast<double>(s + 1) * h);
  }
  return t;
}

}  // namespace

void ClassicalModeParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("classical mode: omega must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("classical mode: epsilon must be >= 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("classical mode: c must be positive");
  if (!std::isfinite(k)) throw std::invalid_argument("classical mode: k must be finite");
}

Dispersion dispersion(const ClassicalModeParams& p) {
  p.validate();
  const double w2 = p.omega * p.omega;
  const double ck = p.c * std::abs(p.k);
  const double ck2 = ck * ck;
  const double e2 = p.epsilon * p.epsilon;
  // (w^2 - c^2k^2)^2 + e^2 (2w^2 + 2c^2k^2 + e^2), free of cancellation
  const double disc = (w2 - ck2) * (w2 - ck2) + e2 * (2.0 * w2 + 2.0 * ck2 + e2);
  if (disc < 0.0) throw std::logic_error("dispersion: negative discriminant");
  const double plus2 = 0.5 * (w2 + ck2 + e2 + std::sqrt(disc));
  const double nu_plus = std::sqrt(plus2);
  // nu_plus nu_minus = c omega |k|
  const double nu_minus = nu_plus > 0.0 ? p.omega * ck / nu_plus : 0.0;
  return {nu_plus, nu_minus};
}

double rabi_classical(const ClassicalModeParams& p) {
  const auto d = dispersion(p);
  return d.nu_plus - d.nu_minus;
}

namespace {

struct Coefficients {
  double a, b;
  cplx c;
  Dispersion d;
};

Coefficients coefficients(const ClassicalModeParams& p) {
  const Dispersion d = dispersion(p);
  const double w2 = p.omega * p.omega;
  const double ck = p.c * std::abs(p.k);
  const double x = w2 - ck * ck;
  const double e2 = p.epsilon * p.epsilon;
  const double root = std::sqrt(x * x + e2 * (2.0 * w2 + 2.0 * ck * ck + e2));
  const double split = d.nu_plus - d.nu_minus;
  if (!(split > 0.0)) throw SingularInput("mode solution: degenerate normal modes (eps = 0 at ck = omega)");
  // nu+^2 - c^2k^2 and nu+^2 - omega^2 satisfy (.)(.) = eps^2 nu+^2; take the stable one directly.
  double up_k, up_w;
  if (x >= 0.0) {
    up_k = 0.5 * (x + e2 + root);
    up_w = up_k > 0.0 ? e2 * d.nu_plus * d.nu_plus / up_k : 0.0;
  } else {
    up_w = 0.5 * (-x + e2 + root);
    up_k = e2 * d.nu_plus * d.nu_plus / up_w;
  }
  (void)up_w;
  // omega^2 - nu-^2 = omega^2 (nu+^2 - c^2k^2)/nu+^2
  const double w_minus = w2 * up_k / (d.nu_plus * d.nu_plus);
  const double den = split * (w2 + d.nu_plus * d.nu_minus);
  const double b = d.nu_plus * w_minus / den;
  return {1.0 - b, b, -I * p.epsilon * p.c * p.omega * std::abs(p.k) / den, d};
}

}  // namespace

ModeAmplitudes mode_solution(const ClassicalModeParams& p, double tau) {
  const Coefficients k = coefficients(p);
  const cplx ep = std::exp(-I * k.d.nu_plus * tau);
  const cplx em = std::exp(-I * k.d.nu_minus * tau);
  return {k.a * ep + k.b * em, k.c * (ep - em)};
}

double max_psi_squared(const ClassicalModeParams& p) {
  if (p.epsilon == 0.0) return 0.0;
  return 4.0 * std::norm(coefficients(p).c);
}

double classical_energy(const ClassicalModeParams& p, cplx phi, cplx dphi, cplx psi, cplx dpsi) {
  const double ck2 = p.c * p.c * p.k * p.k;
  return 0.5 * (std::norm(dphi) + ck2 * std::norm(phi) + std::norm(dpsi) + p.omega * p.omega * std::norm(psi));
}

ModeTrace ode_oracle(const ClassicalModeParams& p, double tau_end, double dt, double halving_tol) {
  p.validate();
  if (!(tau_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("ode oracle: tau_end and dt must be positive");
  const long steps = std::max(1L, std::lround(std::ceil(tau_end / dt - 1e-9)));
  ModeTrace coarse = integrate(p, tau_end, steps);
  const ModeTrace fine = integrate(p, tau_end, 2 * steps);
  double change = 0.0;
  for (std::size_t i = 0; i < coarse.tau.size(); ++i) {
    change = std::max({change, std::abs(coarse.phi[i] - fine.phi[2 * i]), std::abs(coarse.psi[i] - fine.psi[2 * i])});
  }
  coarse.halving_change = change;
  if (!(change <= halving_tol)) {
    throw ConvergenceError("ode oracle: halving dt changed the solution by " + std::to_string(change));
  }
  const Dispersion d = dispersion(p);
  coarse.nu_plus = d.nu_plus;
  coarse.nu_minus = d.nu_minus;
  coarse.rabi = d.nu_plus - d.nu_minus;
  return coarse;
}

std::vector<double> spectral_peaks(const ModeTrace& trace, double nu_max, int count) {
  const std::size_t n = trace.tau.size();
  if (n < 8) throw std::invalid_argument("spectral peaks: trace too short");
  const double T = trace.tau.back() - trace.tau.front();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(j) / (n - 1));
  // phi ~ e^{-i nu t}: demodulate with e^{+i nu t}.
  auto power = [&](double nu) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * trace.phi[j] * std::exp(I * nu * trace.tau[j]);
    return std::abs(s);
  };
  const double bin = 2.0 * M_PI / T;
  const double step = bin / 8.0;
  const int grid = static_cast<int>(std::ceil(nu_max / step)) + 1;
  std::vector<double> vals(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) vals[i] = power(i * step);
  std::vector<std::pair<double, int>> maxima;
  for (int i = 1; i + 1 < grid; ++i) {
    if (vals[i] >= vals[i - 1] && vals[i] > vals[i + 1]) maxima.push_back({vals[i], i});
  }
  std::sort(maxima.begin(), maxima.end(), [](auto& l, auto& r) { return l.first > r.first; });
  std::vector<double> out;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int m = 0; m < count && m < static_cast<int>(maxima.size()); ++m) {
    double lo = (maxima[m].second - 1) * step, hi = (maxima[m].second + 1) * step;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = power(x1), f2 = power(x2);
    while (hi - lo > 1e-10) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = power(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = power(x2);
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<ScanRow> amplitude_scan(double omega, double epsilon, const std::vector<double>& k_grid, double c) {
  std::vector<ScanRow> rows;
  rows.reserve(k_grid.size());
  for (double k : k_grid) {
    const ClassicalModeParams p{omega, k, c, epsilon};
    const Dispersion d = dispersion(p);
    const double rabi = d.nu_plus - d.nu_minus;
    double peak = 0.0;
    if (epsilon > 0.0 && rabi > 0.0) {
      const int samples = 2001;
      const double period = 2.0 * M_PI / rabi;
      for (int i = 0; i < samples; ++i) {
        peak = std::max(peak, std::norm(mode_solution(p, period * i / (samples - 1)).psi));
      }
    }
    rows.push_back({k, d.nu_plus, d.nu_minus, rabi, peak});
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows, double omega, double c) {
  std::string out = "k,kc_over_omega,nu_plus,nu_minus,rabi,max_psi2\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k, r.k * c / omega, r.nu_plus,
                  r.nu_minus, r.rabi, r.max_psi2);
    out += buf;
  }
  return out;
}

}  // namespace rsim

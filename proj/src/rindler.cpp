#include "rsim/rindler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double ChainGeometry::normalization() const { return std::sqrt(static_cast<double>(positions.size())); }

double ChainGeometry::density() const {
  if (positions.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
  return static_cast<double>(positions.size() - 1) / (*hi - *lo);
}

double ChainGeometry::span() const {
  if (positions.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
  const double extent = *hi - *lo;
  return extent * static_cast<double>(positions.size()) / static_cast<double>(positions.size() - 1);
}

double ChainGeometry::proper_frequency(double zbar) const { return omega * std::exp(-a * zbar / (c * c)); }

void ChainGeometry::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("chain geometry: acceleration must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("chain geometry: c must be positive");
  for (double p : positions) {
    if (!std::isfinite(p)) throw std::invalid_argument("chain geometry: non-finite oscillator position");
  }
}

ChainGeometry uniform_chain(int count, double spacing, double a, double c, double omega) {
  if (count < 1) throw std::invalid_argument("uniform chain needs at least one oscillator");
  if (!(spacing > 0.0)) throw std::invalid_argument("uniform chain needs positive spacing");
  ChainGeometry g;
  g.a = a;
  g.c = c;
  g.omega = omega;
  g.positions.resize(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) g.positions[m] = (m - 0.5 * (count - 1)) * spacing;
  g.validate();
  return g;
}

SpacetimePoint trajectory(const ChainGeometry& geom, double zbar, double tau) {
  geom.validate();
  const double scale = std::exp(geom.a * zbar / (geom.c * geom.c));
  const double eta = geom.a * tau / geom.c;
  return {geom.c / geom.a * scale * std::sinh(eta), geom.c * geom.c / geom.a * scale * std::cosh(eta)};
}

cplx rindler_mode_value(const RindlerModeSpec& spec, double t, double z, double c) {
  if (!(spec.Omega > 0.0)) throw std::invalid_argument("Rindler mode needs Omega > 0");
  if (spec.direction == Direction::LeftMoving) z = -z;
  const double amp = 1.0 / std::sqrt(spec.Omega);
  const double u = z / c - t;
  if (spec.wedge == Wedge::Right) {
    if (!(u > 0.0)) return 0.0;
    return amp * std::exp(cplx(0.0, spec.Omega * std::log(u)));
  }
  if (!(u < 0.0)) return 0.0;
  return amp * std::exp(cplx(0.0, -spec.Omega * std::log(-u)));
}

double resonant_wavenumber(const ChainGeometry& geom, double Omega) { return Omega * geom.a / (geom.c * geom.c); }

cplx collective_coupling(const ChainGeometry& geom, double k, const RindlerModeSpec& spec) {
  if (geom.positions.empty()) throw std::invalid_argument("collective coupling: empty chain");
  const double dk = resonant_wavenumber(geom, spec.Omega) - k;
  cplx sum = 0.0;
  for (double z : geom.positions) sum += std::exp(cplx(0.0, dk * z));
  return sum / geom.normalization();
}

SelectivityReport coupling_selectivity_report(const ChainGeometry& geom, const std::vector<double>& omega_grid,
                                              const std::vector<double>& k_grid) {
  if (omega_grid.empty()) throw std::invalid_argument("selectivity report: empty Omega grid");
  SelectivityReport r;
  r.omegas = omega_grid;
  if (k_grid.empty()) {
    for (double om : omega_grid) r.ks.push_back(resonant_wavenumber(geom, om));
  } else {
    r.ks = k_grid;
  }
  r.magnitude.resize(static_cast<Index>(r.omegas.size()), static_cast<Index>(r.ks.size()));
  const double span = geom.span();
  const double lobe = span > 0.0 ? 2.0 * M_PI / span : 0.0;
  r.dominance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.omegas.size(); ++i) {
    const RindlerModeSpec spec{r.omegas[i]};
    const double kres = resonant_wavenumber(geom, spec.Omega);
    for (std::size_t j = 0; j < r.ks.size(); ++j) {
      r.magnitude(static_cast<Index>(i), static_cast<Index>(j)) = std::abs(collective_coupling(geom, r.ks[j], spec));
    }
    const double on = std::abs(collective_coupling(geom, kres, spec));
    double off = 0.0;
    for (std::size_t j = 0; j < r.ks.size(); ++j) {
      const double dk = std::abs(r.ks[j] - kres);
      if (dk == 0.0 || dk < lobe) continue;
      off = std::max(off, r.magnitude(static_cast<Index>(i), static_cast<Index>(j)));
    }
    r.on_resonance.push_back(on);
    r.worst_off_resonance.push_back(off);
    const double ratio = off > 0.0 ? on / off : std::numeric_limits<double>::infinity();
    r.dominance = std::min(r.dominance, ratio);
  }
  return r;
}

std::string SelectivityReport::to_csv() const {
  std::string out = "omega\\k";
  for (double k : ks) out += "," + fmt(k);
  out += "\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    out += fmt(omegas[i]);
    for (std::size_t j = 0; j < ks.size(); ++j) out += "," + fmt(magnitude(static_cast<Index>(i), static_cast<Index>(j)));
    out += "\n";
  }
  return out;
}

}  // namespace rsim

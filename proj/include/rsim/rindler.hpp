#pragma once

#include <string>
#include <vector>

#include "rsim/fock.hpp"

namespace rsim {

// A chain of oscillators riding uniformly accelerated worldlines labelled by
// the co-moving coordinate zbar.
struct ChainGeometry {
  double a = 1.0;      // proper acceleration at zbar = 0
  double c = 1.0;
  double omega = 1.0;  // chain frequency in Rindler time
  std::vector<double> positions;

  std::size_t size() const { return positions.size(); }
  // sqrt(M): keeps the collective mode bosonic.
  double normalization() const;
  // Oscillators per unit zbar, (M - 1)/extent; zero for M < 2.
  double density() const;
  // M times the mean spacing: the extent a lattice sum resolves.
  double span() const;
  // omega e^{-a zbar/c^2}
  double proper_frequency(double zbar) const;
  void validate() const;
};

// M oscillators at (m - (M-1)/2) * spacing.
ChainGeometry uniform_chain(int count, double spacing, double a = 1.0, double c = 1.0, double omega = 1.0);

enum class Wedge { Right, Left };
enum class Direction { RightMoving, LeftMoving };

struct RindlerModeSpec {
  double Omega = 1.0;
  Wedge wedge = Wedge::Right;
  Direction direction = Direction::RightMoving;
};

struct SpacetimePoint {
  double t;
  double z;
};

SpacetimePoint trajectory(const ChainGeometry& geom, double zbar, double tau);

// Right-moving modes: Omega^{-1/2} (z/c - t)^{i Omega} on z/c > t (wedge 1),
// Omega^{-1/2} (t - z/c)^{-i Omega} on t > z/c (wedge 2), zero elsewhere and on
// the boundary. Left-moving values are the mirror image z -> -z.
cplx rindler_mode_value(const RindlerModeSpec& spec, double t, double z, double c = 1.0);

// Resonant wavenumber Omega a / c^2.
double resonant_wavenumber(const ChainGeometry& geom, double Omega);

// (1/sqrt(M)) sum_m e^{i (k_Omega - k) zbar_m}
cplx collective_coupling(const ChainGeometry& geom, double k, const RindlerModeSpec& spec);

struct SelectivityReport {
  std::vector<double> omegas;
  std::vector<double> ks;
  Eigen::MatrixXd magnitude;  // rows follow omegas, columns ks
  std::vector<double> on_resonance;
  std::vector<double> worst_off_resonance;
  // min over Omega of |S(k_Omega)| / max |S(k)| with |k - k_Omega| >= 2 pi/span
  double dominance = 0.0;

  std::string to_csv() const;
};

// With an empty k grid the resonant wavenumbers of the Omega grid are used.
SelectivityReport coupling_selectivity_report(const ChainGeometry& geom, const std::vector<double>& omega_grid,
                                              const std::vector<double>& k_grid = {});

}  // namespace rsim

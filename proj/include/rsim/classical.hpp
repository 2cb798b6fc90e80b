#pragma once

#include <string>
#include <vector>

#include "rsim/fock.hpp"

namespace rsim {

// Field mode phi with wavenumber k coupled to a chain displacement psi:
// phi'' + c^2 k^2 phi - eps psi' = 0,  psi'' + omega^2 psi + eps phi' = 0.
struct ClassicalModeParams {
  double omega = 1.0;
  double k = 1.0;
  double c = 1.0;
  double epsilon = 0.1;

  void validate() const;
};

struct Dispersion {
  double nu_plus;
  double nu_minus;
};

// Positive normal-mode frequencies, nu_plus >= nu_minus.
Dispersion dispersion(const ClassicalModeParams& p);
// nu_plus - nu_minus. Distinct from the Rindler frequency of the quantum modules.
double rabi_classical(const ClassicalModeParams& p);

struct ModeAmplitudes {
  cplx phi;
  cplx psi;
};

// Positive-frequency solution with phi(0) = 1, psi(0) = 0. Throws SingularInput
// when the two normal modes coincide (eps = 0 and ck = omega).
ModeAmplitudes mode_solution(const ClassicalModeParams& p, double tau);
// Peak of |psi|^2 over a Rabi period, 4|C|^2.
double max_psi_squared(const ClassicalModeParams& p);

struct ModeTrace {
  std::vector<double> tau;
  std::vector<cplx> phi, dphi, psi, dpsi;
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  double rabi = 0.0;
  double dt = 0.0;
  double halving_change = 0.0;  // max |change| of phi, psi when dt is halved
};

// Fixed-step RK4 from the positive-frequency initial data of the first-order
// system. Throws ConvergenceError when halving dt moves phi or psi by more
// than halving_tol anywhere on the common grid.
ModeTrace ode_oracle(const ClassicalModeParams& p, double tau_end, double dt, double halving_tol = 1e-6);

// 1/2 (|phi'|^2 + c^2 k^2 |phi|^2 + |psi'|^2 + omega^2 |psi|^2); the coupling adds no
// term because the gyroscopic force does no work.
double classical_energy(const ClassicalModeParams& p, cplx phi, cplx dphi, cplx psi, cplx dpsi);

// Two strongest frequencies of phi(tau) from a Hann-windowed Fourier scan,
// refined by golden-section search. Returned in decreasing order.
std::vector<double> spectral_peaks(const ModeTrace& trace, double nu_max, int count = 2);

struct ScanRow {
  double k;
  double nu_plus;
  double nu_minus;
  double rabi;
  double max_psi2;
};

// max|psi|^2 is the closed form sampled over one Rabi period.
std::vector<ScanRow> amplitude_scan(double omega, double epsilon, const std::vector<double>& k_grid, double c = 1.0);
std::string scan_csv(const std::vector<ScanRow>& rows, double omega, double c = 1.0);

}  // namespace rsim

#pragma once

#include <string>
#include <vector>

#include "rsim/fock.hpp"
#include "rsim/states.hpp"

namespace rsim {

struct IdentityReport {
  std::string name;
  int cutoff = 0;
  double residual_norm = 0.0;   // operator 2-norm or vector 2-norm on the restricted domain
  std::string norm_kind;        // "operator" or "vector"
  std::string domain;           // which rows/columns were kept
  int interior_levels_excluded = 2;
  double operand_norm = 0.0;    // largest operand norm on the domain, for scale
  double roundoff_estimate = 0.0;
  double bound = 1e-8;
  bool passed = false;
};

constexpr double kIdentityBound = 1e-8;

// b1 e^{g b1^dag b2^dag} - e^{g b1^dag b2^dag} b1 - g b2^dag e^{g b1^dag b2^dag}; which = 2 swaps 1 and 2.
IdentityReport check_shift_identity(double gamma, int cutoff, int which = 1);

// Beam-splitter conjugations with Y = s s^dag b - s^* s b^dag on both chains:
// e^Y s^dag = (cos|s| s^dag - s^*/|s| sin|s| b^dag) e^Y and
// e^Y b^dag = (cos|s| b^dag + s/|s| sin|s| s^dag) e^Y.
std::vector<IdentityReport> check_conjugation_identities(cplx s, int cutoff);

// e^{-A b1^dag b2^dag}|0_M> = (1-g^2)/(1+Ag-g^2) e^{-A/(1+Ag-g^2) a1^dag a2^dag}|0_M>.
IdentityReport check_squeeze_rebasing(cplx a, double gamma, int cutoff);

// e^{al a1 s^dag} e^{be a1^dag a2^dag} = e^{al be a2^dag s^dag} e^{be a1^dag a2^dag} e^{al a1 s^dag}
// on every probe state with at most two quanta.
IdentityReport check_exp_reordering(cplx alpha, cplx beta, int cutoff);

// d psi/dt against the generator it obeys, by central differences of the closed form.
IdentityReport check_single_chain_state_equation(double gamma, double g, double tau, int cutoff);
IdentityReport check_two_chain_state_equation(double gamma, double g, double tau, int cutoff);

// f' = -(al + 2 be f + la f^2), f(0) = 0, via the tangent formula against RK4.
struct RiccatiCheck {
  cplx closed_form;
  cplx integrated;
  double residual;
};
cplx riccati_closed_form(cplx alpha, cplx beta, cplx lambda, double t);
RiccatiCheck check_riccati(cplx alpha, cplx beta, cplx lambda, double t, int steps = 4000);

// rho_b1 by expanding (cos b1^dag - i sin s^dag)^n binomially and tracing term by term.
// Throws InfeasibleCutoff when the dropped tail weight exceeds max_leakage.
DensityMatrix binomial_trace_oracle(const SqueezeParam& gamma, double g, double tau, int cutoff,
                                    double max_leakage = 1e-6);

// Relative error of sum_{n>=m} g^{2n} n!/(n-m)! = g^{2m} m!/(1-g^2)^{m+1}.
double geometric_closure_residual(double gamma, int m);

// Runs every identity at one cutoff.
std::vector<IdentityReport> run_identity_suite(int cutoff);

// Residual of each identity across increasing cutoffs must not grow by more
// than a factor of two, or must stay below the roundoff floor.
struct MonotoneReport {
  std::string name;
  std::vector<int> cutoffs;
  std::vector<double> residuals;
  bool passed = false;
};
std::vector<MonotoneReport> check_monotone(const std::vector<int>& cutoffs, double floor = 1e-13);

}  // namespace rsim

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsim/fock.hpp"
#include "rsim/states.hpp"

namespace rsim {

struct EvolutionParams {
  double g = 1.0;
  double tau = 0.0;
  std::vector<double> tau_grid;
};

// g (s^dag b + s b^dag) on the named pair; other modes untouched.
FockOperator h_single_chain(double g, const ModeRegister& reg, const std::string& sigma, const std::string& b);
FockOperator h_single_chain(double g, const ModeRegister& reg, const ChainModes& modes = {});
FockOperator h_two_chain(double g, const ModeRegister& reg, const ChainModes& modes = {});
// The two commuting single-chain pieces of h_two_chain.
std::vector<FockOperator> h_two_chain_terms(double g, const ModeRegister& reg, const ChainModes& modes = {});

struct CommutatorCheck {
  double worst_residual = 0.0;
  bool passed = true;
};

// g (A1^dag B1 + A1 B1^dag + A2^dag B2 + A2 B2^dag). Commutators of the four
// operators are checked on the interior; failures warn instead of throwing.
FockOperator h_generic_duality(double g, const FockOperator& a1, const FockOperator& a2, const FockOperator& b1,
                               const FockOperator& b2, CommutatorCheck* check = nullptr, double tol = 1e-10);

// exp(-i H tau) by spectral decomposition over the connected blocks of H's
// sparsity pattern. Blocks are diagonalized lazily, only where a state has
// support, and cached; evolutions sharing one propagator are thread-safe.
class Propagator {
 public:
  explicit Propagator(const FockOperator& h);
  PureState evolve(const PureState& psi0, double tau) const;
  const ModeRegister& reg() const;
  std::size_t block_count() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

PureState evolve(const FockOperator& h, const PureState& psi0, double tau);
// For mutually commuting terms: exp(-i sum H_k tau) = prod exp(-i H_k tau).
PureState evolve(const std::vector<FockOperator>& commuting_terms, const PureState& psi0, double tau);
PureState evolve(const std::vector<Propagator>& commuting_factors, const PureState& psi0, double tau);

struct HeisenbergNumbers {
  double n_sigma;
  double n_b1;
};

HeisenbergNumbers heisenberg_numbers(const SqueezeParam& gamma, double g, double tau);

// `points` samples over one Rabi period: 2 pi/g (single chain), pi/g (two chains).
std::vector<double> default_tau_grid(double g, bool two_chain, int points = 65);
std::vector<double> linear_grid(double start, double stop, int points);

}  // namespace rsim

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "rsim/fock.hpp"
#include "rsim/squeeze.hpp"

namespace rsim {

class SqueezeParam {
 public:
  static SqueezeParam from_gamma(double gamma);
  // gamma = exp(-pi * omega_rindler); requires omega_rindler > 0.
  static SqueezeParam from_omega(double omega_rindler);

  double gamma() const { return gamma_; }
  std::optional<double> omega_rindler() const { return omega_; }
  // Squeezing parameter r with gamma = tanh(r). Read-only.
  double r() const { return std::atanh(gamma_); }

 private:
  SqueezeParam(double g, std::optional<double> o) : gamma_(g), omega_(o) {}
  double gamma_;
  std::optional<double> omega_;
};

// Mode labels used by the chain scenarios. Relabel to reuse the same physics
// under different names (the cavity toy model does this).
struct ChainModes {
  std::string sigma = "sigma";
  std::string sigma1 = "sigma1";
  std::string sigma2 = "sigma2";
  std::string b1 = "b1";
  std::string b2 = "b2";
};

// sqrt(1-g^2) sum g^n |n>_A |n>_B; leakage = g^{2(N+1)} for common cutoff N.
PureState two_mode_squeezed_vacuum(const SqueezeParam& gamma, const std::string& mode_a,
                                   const std::string& mode_b, const ModeRegister& reg);
// Squeezed (b1, b2) pair, every other mode in its ground state.
PureState minkowski_vacuum(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes = {});
// All-zero occupation. Require the field pair / at least one chain mode.
PureState rindler_vacuum(const ModeRegister& reg, const ChainModes& modes = {});
PureState chain_ground(const ModeRegister& reg, const ChainModes& modes = {});
// sqrt(1-g^2) exp(-g s1^dag s2^dag)|G>: vacuum of the collective B operators.
PureState b_frame_vacuum(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes = {});

// Working cutoff for a squeezer whose bare state carries pair amplitudes up to
// |c| per quantum: tail policy applied to |c|, never below `floor`.
int frame_working_cutoff(double pair_amplitude, int floor, double tail_tol = 1e-12);

struct BogoliubovFrame {
  SqueezeParam gamma;
  std::string b1, b2;
  // (b1 - g b2^dag)/sqrt(1-g^2) and (b2 - g b1^dag)/sqrt(1-g^2) on the register.
  FockOperator a1, a2;
  TwoModeSqueezer squeezer;

  FramePair pair() const { return FramePair{b1, b2, squeezer}; }
};

struct FrameVacuumCheck {
  double a1_residual;
  double a2_residual;
};

// Working cutoff defaults to frame_working_cutoff(2|g|/(1+g^2), cutoff of b1).
BogoliubovFrame bogoliubov_frame(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes = {},
                                 std::optional<int> working_cutoff = std::nullopt);
FrameVacuumCheck check_frame_vacuum(const BogoliubovFrame& frame, const PureState& minkowski);

struct CollectiveBFrame {
  SqueezeParam gamma;
  std::string sigma1, sigma2;
  // (s1 + g s2^dag)/sqrt(1-g^2) and (s2 + g s1^dag)/sqrt(1-g^2).
  FockOperator B1, B2;
  TwoModeSqueezer squeezer;

  FramePair pair() const { return FramePair{sigma1, sigma2, squeezer}; }
};

CollectiveBFrame collective_B_frame(const SqueezeParam& gamma, const ModeRegister& reg,
                                    const ChainModes& modes = {}, std::optional<int> working_cutoff = std::nullopt);

// Reconstruct the source operators from frame operators: (a1 + g a2^dag)/sqrt(1-g^2).
FockOperator frame_inverse_first(const BogoliubovFrame& frame);
FockOperator frame_inverse_second(const BogoliubovFrame& frame);

}  // namespace rsim

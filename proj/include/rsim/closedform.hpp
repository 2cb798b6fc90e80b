#pragma once

#include <string>

#include "rsim/fock.hpp"
#include "rsim/squeeze.hpp"
#include "rsim/states.hpp"

namespace rsim {

struct ClosedFormResult {
  PureState state;
  std::string construction;  // which analytical form produced the state
  double leakage = 0.0;      // 1 - |psi|^2 of the truncated construction
};

// sqrt(1-g^2) exp(g b2^dag (cos b1^dag - i sin s^dag)) |G>|0_R>
ClosedFormResult psi_single_chain(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                                  const ChainModes& modes = {});
// exp(g b2^dag ((cos - 1) b1^dag - i sin s^dag)) |G>|0_M>, the cross-check route.
ClosedFormResult psi_single_chain_from_minkowski(const SqueezeParam& gamma, double g, double tau,
                                                 const ModeRegister& reg, const ChainModes& modes = {});

// sqrt(1-g^2) exp[g (cos b1^dag - i sin s1^dag)(cos b2^dag - i sin s2^dag)] |G>|0_R>
ClosedFormResult psi_two_chain(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                               const ChainModes& modes = {});
// exp[g/2 ((cos 2gt - 1)(b1^dag b2^dag + s1^dag s2^dag) - i sin 2gt (b2^dag s1^dag + b1^dag s2^dag))] |G>|0_M>
ClosedFormResult psi_two_chain_from_minkowski(const SqueezeParam& gamma, double g, double tau,
                                              const ModeRegister& reg, const ChainModes& modes = {});

// (1-g^2)/(1-g^2 cos) exp(-i g sqrt(1-g^2) sin/(1-g^2 cos) a2^dag s^dag)
//   exp(-g (1-cos)/(1-g^2 cos) a1^dag a2^dag) |G>|0_M>, written in the frame's operators.
ClosedFormResult psi_unruh_minkowski(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                                     const BogoliubovFrame& frame, const ChainModes& modes = {});

// sqrt(1-g^2) exp[g (cos B1^dag - i sin A1^dag)(cos B2^dag - i sin A2^dag)] |0_B>|0_A>
ClosedFormResult psi_duality(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                             const FramePair& a_frame, const FramePair& b_frame);

// Diagonal p_m = (1-g^2) g^{2m} cos^{2m} / (1 - g^2 sin^2)^{m+1}, m = 0..cutoff.
DensityMatrix rho_b1_thermal(const SqueezeParam& gamma, double g, double tau, int cutoff,
                             const std::string& label = "b1");
// Same with sin and cos exchanged.
DensityMatrix rho_sigma_thermal(const SqueezeParam& gamma, double g, double tau, int cutoff,
                                const std::string& label = "sigma");

// Product of creation operators on the named modes.
FockOperator creation_product(const ModeRegister& reg, const std::vector<std::string>& labels);

}  // namespace rsim

#include "rsim/states.hpp"

#include <cmath>
#include <stdexcept>

namespace rsim {

namespace {

void require_gamma(double g) {
  if (!(std::abs(g) < 1.0)) throw std::domain_error("squeezing requires |gamma| < 1");
}

}  // namespace

SqueezeParam SqueezeParam::from_gamma(double gamma) {
  require_gamma(gamma);
  return SqueezeParam(gamma, std::nullopt);
}

SqueezeParam SqueezeParam::from_omega(double omega_rindler) {
  if (!(omega_rindler > 0.0) || !std::isfinite(omega_rindler)) {
    throw std::domain_error("Rindler frequency must be positive and finite");
  }
  return SqueezeParam(std::exp(-M_PI * omega_rindler), omega_rindler);
}

PureState two_mode_squeezed_vacuum(const SqueezeParam& gamma, const std::string& mode_a, const std::string& mode_b,
                                   const ModeRegister& reg) {
  const double g = gamma.gamma();
  const std::size_t pa = reg.position(mode_a);
  const std::size_t pb = reg.position(mode_b);
  if (pa == pb) throw std::invalid_argument("squeezed vacuum needs two distinct modes");
  const int n_max = std::min(reg.cutoffs()[pa], reg.cutoffs()[pb]);
  PureState s{reg, Vec::Zero(reg.dimension()), 0.0};
  const double norm = std::sqrt(1.0 - g * g);
  double gn = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    s.amplitudes[n * reg.stride(pa) + n * reg.stride(pb)] = norm * gn;
    gn *= g;
  }
  s.leakage = std::pow(g * g, n_max + 1);
  return s;
}

PureState minkowski_vacuum(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes) {
  return two_mode_squeezed_vacuum(gamma, modes.b1, modes.b2, reg);
}

PureState rindler_vacuum(const ModeRegister& reg, const ChainModes& modes) {
  reg.position(modes.b1);
  reg.position(modes.b2);
  return vacuum_state(reg);
}

PureState chain_ground(const ModeRegister& reg, const ChainModes& modes) {
  if (!reg.contains(modes.sigma) && !reg.contains(modes.sigma1) && !reg.contains(modes.sigma2)) {
    throw std::invalid_argument("chain_ground: register has no chain mode");
  }
  return vacuum_state(reg);
}

PureState b_frame_vacuum(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes) {
  return two_mode_squeezed_vacuum(SqueezeParam::from_gamma(-gamma.gamma()), modes.sigma1, modes.sigma2, reg);
}

int frame_working_cutoff(double pair_amplitude, int floor, double tail_tol) {
  const double c = std::min(std::abs(pair_amplitude), 1.0 - 1e-15);
  return std::max(floor, tail_policy_cutoff(c, tail_tol));
}

namespace {

// (x + s y^dag)/sqrt(1-g^2) with s = sign * g.
FockOperator mixed(const ModeRegister& reg, const std::string& x, const std::string& y, double s, double g) {
  const double k = 1.0 / std::sqrt(1.0 - g * g);
  return (annihilation(reg, x) + creation(reg, y) * cplx(s)) * cplx(k);
}

}  // namespace

BogoliubovFrame bogoliubov_frame(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes,
                                 std::optional<int> working_cutoff) {
  const double g = gamma.gamma();
  const int floor = std::max(reg.cutoff(modes.b1), reg.cutoff(modes.b2));
  const int l = working_cutoff.value_or(frame_working_cutoff(2.0 * g / (1.0 + g * g), floor));
  return BogoliubovFrame{gamma,
                         modes.b1,
                         modes.b2,
                         mixed(reg, modes.b1, modes.b2, -g, g),
                         mixed(reg, modes.b2, modes.b1, -g, g),
                         TwoModeSqueezer(modes.b1, modes.b2, gamma.r(), std::max(l, floor))};
}

FrameVacuumCheck check_frame_vacuum(const BogoliubovFrame& frame, const PureState& minkowski) {
  return FrameVacuumCheck{frame.a1.apply(minkowski.amplitudes).norm(), frame.a2.apply(minkowski.amplitudes).norm()};
}

CollectiveBFrame collective_B_frame(const SqueezeParam& gamma, const ModeRegister& reg, const ChainModes& modes,
                                    std::optional<int> working_cutoff) {
  const double g = gamma.gamma();
  const int floor = std::max(reg.cutoff(modes.sigma1), reg.cutoff(modes.sigma2));
  const int l = working_cutoff.value_or(frame_working_cutoff(2.0 * g / (1.0 + g * g), floor));
  return CollectiveBFrame{gamma,
                          modes.sigma1,
                          modes.sigma2,
                          mixed(reg, modes.sigma1, modes.sigma2, g, g),
                          mixed(reg, modes.sigma2, modes.sigma1, g, g),
                          TwoModeSqueezer(modes.sigma1, modes.sigma2, -gamma.r(), std::max(l, floor))};
}

FockOperator frame_inverse_first(const BogoliubovFrame& f) {
  const double g = f.gamma.gamma();
  return (f.a1 + f.a2.adjoint() * cplx(g)) * cplx(1.0 / std::sqrt(1.0 - g * g));
}

FockOperator frame_inverse_second(const BogoliubovFrame& f) {
  const double g = f.gamma.gamma();
  return (f.a2 + f.a1.adjoint() * cplx(g)) * cplx(1.0 / std::sqrt(1.0 - g * g));
}

}  // namespace rsim

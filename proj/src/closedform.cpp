#include "rsim/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace rsim {

namespace {

const cplx I(0.0, 1.0);

ClosedFormResult finish(PureState s, std::string tag) {
  s.leakage = std::max(0.0, 1.0 - s.amplitudes.squaredNorm());
  const double leak = s.leakage;
  return ClosedFormResult{std::move(s), std::move(tag), leak};
}

DensityMatrix thermal(double q, double p0, int cutoff, const std::string& label) {
  if (cutoff < 1) throw std::invalid_argument("thermal marginal needs cutoff >= 1");
  const ModeRegister reg({label}, {cutoff});
  Mat rho = Mat::Zero(cutoff + 1, cutoff + 1);
  double p = p0;
  double total = 0.0;
  for (int m = 0; m <= cutoff; ++m) {
    rho(m, m) = p;
    total += p;
    p *= q;
  }
  return DensityMatrix{reg, rho, std::max(0.0, 1.0 - total)};
}

}  // namespace

FockOperator creation_product(const ModeRegister& reg, const std::vector<std::string>& labels) {
  FockOperator out = identity_operator(reg);
  for (const auto& l : labels) out = out * creation(reg, l);
  return out;
}

namespace {

LadderPolynomial operator+(LadderPolynomial a, const LadderPolynomial& b) {
  for (const auto& t : b.terms()) a.add(t.coef, t.factors);
  return a;
}

}  // namespace

ClosedFormResult psi_single_chain(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                                  const ChainModes& modes) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  const LadderPolynomial x = creation_monomial(gg * c, {modes.b2, modes.b1}) +
                             creation_monomial(-I * gg * s, {modes.b2, modes.sigma});
  PureState psi = apply_exp_series(x, vacuum_state(reg));
  psi.amplitudes *= std::sqrt(1.0 - gg * gg);
  return finish(std::move(psi), "single-chain: squeezed exponential on the Rindler vacuum");
}

ClosedFormResult psi_single_chain_from_minkowski(const SqueezeParam& gamma, double g, double tau,
                                                 const ModeRegister& reg, const ChainModes& modes) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  const LadderPolynomial x = creation_monomial(gg * (c - 1.0), {modes.b2, modes.b1}) +
                             creation_monomial(-I * gg * s, {modes.b2, modes.sigma});
  PureState psi = apply_exp_series(x, minkowski_vacuum(gamma, reg, modes));
  return finish(std::move(psi), "single-chain: exponential acting on the Minkowski vacuum");
}

ClosedFormResult psi_two_chain(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                               const ChainModes& modes) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  // g (c b1 - i s s1)(c b2 - i s s2), daggers implied
  const LadderPolynomial x = creation_monomial(gg * c * c, {modes.b1, modes.b2}) +
                             creation_monomial(-I * gg * c * s, {modes.b1, modes.sigma2}) +
                             creation_monomial(-I * gg * s * c, {modes.sigma1, modes.b2}) +
                             creation_monomial(-gg * s * s, {modes.sigma1, modes.sigma2});
  PureState psi = apply_exp_series(x, vacuum_state(reg));
  psi.amplitudes *= std::sqrt(1.0 - gg * gg);
  return finish(std::move(psi), "two-chain: product exponential on the Rindler vacuum");
}

ClosedFormResult psi_two_chain_from_minkowski(const SqueezeParam& gamma, double g, double tau,
                                              const ModeRegister& reg, const ChainModes& modes) {
  const double gg = gamma.gamma();
  const double c2 = std::cos(2.0 * g * tau), s2 = std::sin(2.0 * g * tau);
  const cplx pair = 0.5 * gg * (c2 - 1.0);
  const cplx cross = -I * 0.5 * gg * s2;
  const LadderPolynomial x = creation_monomial(pair, {modes.b1, modes.b2}) +
                             creation_monomial(pair, {modes.sigma1, modes.sigma2}) +
                             creation_monomial(cross, {modes.b2, modes.sigma1}) +
                             creation_monomial(cross, {modes.b1, modes.sigma2});
  PureState psi = apply_exp_series(x, minkowski_vacuum(gamma, reg, modes));
  return finish(std::move(psi), "two-chain: exponential acting on the Minkowski vacuum");
}

ClosedFormResult psi_unruh_minkowski(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                                     const BogoliubovFrame& frame, const ChainModes& modes) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  const double den = 1.0 - gg * gg * c;
  const double pref = (1.0 - gg * gg) / den;
  const cplx c_sigma = -I * gg * std::sqrt(1.0 - gg * gg) * s / den;
  const double c_pair = -gg * (1.0 - c) / den;
  const auto pair = frame.pair();
  PureState psi = realize_from_bare(reg, {pair}, [&](const ModeRegister& padded) {
    Vec v = apply_exp_series(creation_monomial(c_pair, {pair.first, pair.second}), padded,
                             vacuum_state(padded).amplitudes);
    v = apply_exp_series(creation_monomial(c_sigma, {pair.second, modes.sigma}), padded, v);
    return Vec(v * pref);
  });
  return finish(std::move(psi), "unruh-minkowski: frame-operator exponentials on the Minkowski vacuum");
}

ClosedFormResult psi_duality(const SqueezeParam& gamma, double g, double tau, const ModeRegister& reg,
                             const FramePair& a_frame, const FramePair& b_frame) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  PureState psi = realize_from_bare(reg, {a_frame, b_frame}, [&](const ModeRegister& padded) {
    const LadderPolynomial x = creation_monomial(gg * c * c, {b_frame.first, b_frame.second}) +
                               creation_monomial(-I * gg * c * s, {b_frame.first, a_frame.second}) +
                               creation_monomial(-I * gg * s * c, {a_frame.first, b_frame.second}) +
                               creation_monomial(-gg * s * s, {a_frame.first, a_frame.second});
    Vec v = apply_exp_series(x, padded, vacuum_state(padded).amplitudes);
    return Vec(v * std::sqrt(1.0 - gg * gg));
  });
  return finish(std::move(psi), "duality: frame exponential on the frame vacua");
}

DensityMatrix rho_b1_thermal(const SqueezeParam& gamma, double g, double tau, int cutoff, const std::string& label) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  const double den = 1.0 - gg * gg * s * s;
  return thermal(gg * gg * c * c / den, (1.0 - gg * gg) / den, cutoff, label);
}

DensityMatrix rho_sigma_thermal(const SqueezeParam& gamma, double g, double tau, int cutoff,
                                const std::string& label) {
  const double gg = gamma.gamma();
  const double c = std::cos(g * tau), s = std::sin(g * tau);
  const double den = 1.0 - gg * gg * c * c;
  return thermal(gg * gg * s * s / den, (1.0 - gg * gg) / den, cutoff, label);
}

}  // namespace rsim

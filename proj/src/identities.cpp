#include "rsim/identities.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "rsim/closedform.hpp"

namespace rsim {

namespace {

const cplx I(0.0, 1.0);
constexpr double kEps = std::numeric_limits<double>::epsilon();

IdentityReport make_report(std::string name, int cutoff, double residual, std::string kind, std::string domain,
                           double operand_norm, double roundoff) {
  IdentityReport r;
  r.name = std::move(name);
  r.cutoff = cutoff;
  r.residual_norm = residual;
  r.norm_kind = std::move(kind);
  r.domain = std::move(domain);
  r.operand_norm = operand_norm;
  r.roundoff_estimate = roundoff;
  r.bound = kIdentityBound;
  r.passed = std::isfinite(residual) && residual < r.bound;
  return r;
}

// Dense e^{X} for nilpotent X by its finite series.
Mat nilpotent_exp(const Mat& x) {
  Mat sum = Mat::Identity(x.rows(), x.cols());
  Mat term = sum;
  for (int k = 1; k <= x.rows(); ++k) {
    term = (x * term) / static_cast<double>(k);
    if (term.cwiseAbs().maxCoeff() == 0.0) break;
    sum += term;
  }
  return sum;
}

// Dense e^{Y} for anti-Hermitian Y through the spectrum of iY.
Mat anti_hermitian_exp(const Mat& y) {
  const Mat h = I * y;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXcd phase(es.eigenvalues().size());
  for (Index i = 0; i < phase.size(); ++i) phase[i] = std::exp(-I * es.eigenvalues()[i]);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

PureState five_point_derivative(const std::function<PureState(double)>& f, double t, double h) {
  PureState p2 = f(t + 2 * h), p1 = f(t + h), m1 = f(t - h), m2 = f(t - 2 * h);
  PureState d = p1;
  d.amplitudes = (-p2.amplitudes + 8.0 * p1.amplitudes - 8.0 * m1.amplitudes + m2.amplitudes) / (12.0 * h);
  return d;
}

}  // namespace

IdentityReport check_shift_identity(double gamma, int cutoff, int which) {
  if (!(std::abs(gamma) < 1.0)) throw std::domain_error("shift identity needs |gamma| < 1");
  if (which != 1 && which != 2) throw std::invalid_argument("shift identity: which must be 1 or 2");
  const ModeRegister reg({"b1", "b2"}, {cutoff, cutoff});
  const std::string lower = which == 1 ? "b1" : "b2";
  const std::string raise = which == 1 ? "b2" : "b1";
  const Mat x = (creation(reg, "b1") * creation(reg, "b2")).dense() * gamma;
  const Mat e = nilpotent_exp(x);
  const Mat b = annihilation(reg, lower).dense();
  const Mat bd = creation(reg, raise).dense();
  const Mat r = b * e - e * b - gamma * bd * e;
  const auto in = interior_indices(reg, 2);
  const double en = operator_two_norm(restrict_matrix(e, in, in));
  const double res = operator_two_norm(restrict_matrix(r, in, in));
  return make_report(which == 1 ? "shift identity (b1)" : "shift identity (b2)", cutoff, res, "operator",
                     "interior rows and columns", en,
                     kEps * en * std::sqrt(static_cast<double>(cutoff)) * static_cast<double>(reg.dimension()));
}

std::vector<IdentityReport> check_conjugation_identities(cplx s, int cutoff) {
  std::vector<IdentityReport> out;
  const double mod = std::abs(s);
  const cplx ph = mod > 0.0 ? s / mod : cplx(0.0);
  const double cs = std::cos(mod), sn = std::sin(mod);
  for (int chain = 1; chain <= 2; ++chain) {
    const std::string sig = "sigma" + std::to_string(chain);
    const std::string bb = "b" + std::to_string(chain);
    const ModeRegister reg({sig, bb}, {cutoff, cutoff});
    const Mat sd = creation(reg, sig).dense();
    const Mat bd = creation(reg, bb).dense();
    const Mat y = s * sd * bd.adjoint() - std::conj(s) * sd.adjoint() * bd;
    const Mat e = anti_hermitian_exp(y);
    const Mat r_sigma = e * sd - (cs * sd - std::conj(ph) * sn * bd) * e;
    const Mat r_b = e * bd - (cs * bd + ph * sn * sd) * e;
    std::vector<Index> rows(static_cast<std::size_t>(reg.dimension()));
    for (Index i = 0; i < reg.dimension(); ++i) rows[i] = i;
    const auto cols = excitation_indices(reg, {sig, bb}, cutoff - 2);
    const double en = operator_two_norm(restrict_matrix(e, rows, cols));
    const double ro = kEps * std::sqrt(static_cast<double>(cutoff)) * static_cast<double>(reg.dimension());
    const std::string dom = "all rows; columns with n_sigma + n_b <= cutoff - 2";
    out.push_back(make_report("conjugation " + sig + "^dag (chain " + std::to_string(chain) + ")", cutoff,
                              operator_two_norm(restrict_matrix(r_sigma, rows, cols)), "operator", dom, en, ro));
    out.push_back(make_report("conjugation " + bb + "^dag (chain " + std::to_string(chain) + ")", cutoff,
                              operator_two_norm(restrict_matrix(r_b, rows, cols)), "operator", dom, en, ro));
  }
  return out;
}

IdentityReport check_squeeze_rebasing(cplx a, double gamma, int cutoff) {
  const SqueezeParam sp = SqueezeParam::from_gamma(gamma);
  const cplx den = 1.0 + a * gamma - gamma * gamma;
  if (std::abs(den) < 1e-14) throw SingularInput("squeeze rebasing: 1 + A gamma - gamma^2 vanishes");
  if (!(std::abs(gamma - a) < 1.0)) {
    throw std::domain_error("squeeze rebasing needs |gamma - A| < 1 for a normalizable state");
  }
  const cplx c = -a / den;
  if (!(std::abs(c) < 1.0)) throw std::domain_error("squeeze rebasing: frame coefficient not normalizable");

  const ModeRegister reg({"b1", "b2"}, {cutoff, cutoff});
  const PureState lhs = apply_exp_series(creation_monomial(-a, {"b1", "b2"}), minkowski_vacuum(sp, reg));
  const int l = frame_working_cutoff(std::max(std::abs(c), 2.0 * std::abs(gamma) / (1.0 + gamma * gamma)), cutoff);
  const BogoliubovFrame frame = bogoliubov_frame(sp, reg, {}, l);
  const FramePair pair = frame.pair();
  const PureState rhs = realize_from_bare(reg, {pair}, [&](const ModeRegister& padded) {
    Vec v = apply_exp_series(creation_monomial(c, {"b1", "b2"}), padded, vacuum_state(padded).amplitudes);
    return Vec(v * ((1.0 - gamma * gamma) / den));
  });
  const auto in = interior_indices(reg, 2);
  const Vec diff = restrict_vector(lhs.amplitudes - rhs.amplitudes, in);
  const double ln = lhs.amplitudes.norm();
  return make_report("squeeze rebasing", cutoff, diff.norm(), "vector", "interior rows", ln,
                     kEps * ln * static_cast<double>(l));
}

IdentityReport check_exp_reordering(cplx alpha, cplx beta, int cutoff) {
  const ModeRegister reg({"a1", "a2", "sigma"}, {cutoff, cutoff, cutoff});
  LadderPolynomial lower_raise;
  lower_raise.add(alpha, {{"sigma", true}, {"a1", false}});
  const LadderPolynomial pair = creation_monomial(beta, {"a1", "a2"});
  const LadderPolynomial cross = creation_monomial(alpha * beta, {"a2", "sigma"});
  const auto in = interior_indices(reg, 2);
  double worst = 0.0, scale = 0.0;
  for (Index idx = 0; idx < reg.dimension(); ++idx) {
    const auto occ = reg.occupations(idx);
    if (occ[0] + occ[1] + occ[2] > 2) continue;
    const PureState probe = basis_state(reg, occ);
    const PureState lhs = apply_exp_series(lower_raise, apply_exp_series(pair, probe));
    const PureState rhs = apply_exp_series(cross, apply_exp_series(pair, apply_exp_series(lower_raise, probe)));
    worst = std::max(worst, restrict_vector(lhs.amplitudes - rhs.amplitudes, in).norm());
    scale = std::max(scale, lhs.amplitudes.norm());
  }
  return make_report("exponential reordering", cutoff, worst, "vector", "interior rows, probes with <= 2 quanta",
                     scale, kEps * scale * static_cast<double>(cutoff));
}

IdentityReport check_single_chain_state_equation(double gamma, double g, double tau, int cutoff) {
  const SqueezeParam sp = SqueezeParam::from_gamma(gamma);
  const ModeRegister reg({"sigma", "b1", "b2"}, {cutoff, cutoff, cutoff});
  auto f = [&](double t) { return psi_single_chain(sp, g, t, reg).state; };
  const double h = 1e-3;
  const PureState d = five_point_derivative(f, tau, h);
  const PureState psi = f(tau);
  // i dpsi = -g gamma b2^dag (i sin b1^dag - cos sigma^dag) psi
  LadderPolynomial gen;
  gen.add(-g * gamma * I * std::sin(g * tau), {{"b2", true}, {"b1", true}});
  gen.add(g * gamma * std::cos(g * tau), {{"b2", true}, {"sigma", true}});
  const Vec rhs = gen.to_operator(reg).apply(psi.amplitudes);
  const auto in = interior_indices(reg, 2);
  const double res = restrict_vector(I * d.amplitudes - rhs, in).norm();
  return make_report("single-chain state equation", cutoff, res, "vector", "interior rows", rhs.norm(),
                     kEps / h * psi.amplitudes.norm());
}

IdentityReport check_two_chain_state_equation(double gamma, double g, double tau, int cutoff) {
  const SqueezeParam sp = SqueezeParam::from_gamma(gamma);
  const ModeRegister reg({"sigma1", "b1", "sigma2", "b2"}, {cutoff, cutoff, cutoff, cutoff});
  auto f = [&](double t) { return psi_two_chain(sp, g, t, reg).state; };
  const double h = 1e-3;
  const PureState d = five_point_derivative(f, tau, h);
  const PureState psi = f(tau);
  const double s2 = std::sin(2 * g * tau), c2 = std::cos(2 * g * tau);
  LadderPolynomial gen;
  gen.add(-g * gamma * s2, {{"b1", true}, {"b2", true}});
  gen.add(-g * gamma * s2, {{"sigma1", true}, {"sigma2", true}});
  gen.add(-I * g * gamma * c2, {{"b2", true}, {"sigma1", true}});
  gen.add(-I * g * gamma * c2, {{"b1", true}, {"sigma2", true}});
  const Vec rhs = gen.to_operator(reg).apply(psi.amplitudes);
  const auto in = interior_indices(reg, 2);
  const double res = restrict_vector(d.amplitudes - rhs, in).norm();
  return make_report("two-chain state equation", cutoff, res, "vector", "interior rows", rhs.norm(),
                     kEps / h * psi.amplitudes.norm());
}

cplx riccati_closed_form(cplx alpha, cplx beta, cplx lambda, double t) {
  if (lambda == cplx(0.0)) {
    if (beta == cplx(0.0)) return -alpha * t;
    return -alpha * (1.0 - std::exp(-2.0 * beta * t)) / (2.0 * beta);
  }
  const cplx mu2 = alpha * lambda - beta * beta;
  if (std::abs(mu2) <= 1e-14 * std::max({std::abs(alpha * lambda), std::abs(beta * beta), 1e-300})) {
    return -alpha * t / (1.0 + beta * t);
  }
  const cplx mu = std::sqrt(mu2);
  const cplx c = std::atan(-beta / mu);
  return (-mu * std::tan(mu * t + c) - beta) / lambda;
}

RiccatiCheck check_riccati(cplx alpha, cplx beta, cplx lambda, double t, int steps) {
  auto rhs = [&](cplx f) { return -(alpha + 2.0 * beta * f + lambda * f * f); };
  cplx f = 0.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const cplx k1 = rhs(f);
    const cplx k2 = rhs(f + 0.5 * h * k1);
    const cplx k3 = rhs(f + 0.5 * h * k2);
    const cplx k4 = rhs(f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const cplx cf = riccati_closed_form(alpha, beta, lambda, t);
  return RiccatiCheck{cf, f, std::abs(cf - f)};
}

DensityMatrix binomial_trace_oracle(const SqueezeParam& gamma, double g, double tau, int cutoff,
                                    double max_leakage) {
  const double gg = gamma.gamma();
  const double g2 = gg * gg;
  if (cutoff < 1) throw std::invalid_argument("binomial oracle needs cutoff >= 1");
  const double worst_tail = std::pow(g2, cutoff + 1);
  if (worst_tail > max_leakage) {
    throw InfeasibleCutoff("binomial oracle: cutoff " + std::to_string(cutoff) + " too small for gamma tail",
                           static_cast<std::size_t>(tail_policy_cutoff(gg, max_leakage) + 1));
  }
  const double c2 = std::pow(std::cos(g * tau), 2), s2 = std::pow(std::sin(g * tau), 2);
  std::vector<double> p(static_cast<std::size_t>(cutoff + 1), 0.0);
  // Shell n carries weight (1-g^2) g^{2n}; stop once the remaining shells are below double resolution.
  double shell = 1.0 - g2;
  for (int n = 0; shell > 0.0; ++n) {
    // (c b1^dag - i s sigma^dag)^n |00> = sum_k C(n,k) c^{n-k} (-i s)^k sqrt((n-k)! k!) |n-k, k>;
    // tracing sigma leaves |amplitude|^2 / n! = C(n,k) c^{2(n-k)} s^{2k} on b1 level n-k.
    for (int k = 0; k <= n; ++k) {
      const int m = n - k;
      if (m > cutoff) continue;
      double w;
      if (s2 == 0.0) {
        w = k == 0 ? 1.0 : 0.0;
      } else if (c2 == 0.0) {
        w = k == n ? 1.0 : 0.0;
      } else {
        w = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m + 1.0) + m * std::log(c2) +
                     k * std::log(s2));
      }
      p[m] += shell * w;
    }
    if (g2 == 0.0) break;
    shell *= g2;
    if (shell < 1e-20 * (1.0 - g2)) break;
  }
  const ModeRegister reg({"b1"}, {cutoff});
  Mat rho = Mat::Zero(cutoff + 1, cutoff + 1);
  double total = 0.0;
  for (int m = 0; m <= cutoff; ++m) {
    rho(m, m) = p[m];
    total += p[m];
  }
  return DensityMatrix{reg, rho, std::max(0.0, 1.0 - total)};
}

double geometric_closure_residual(double gamma, int m) {
  if (!(std::abs(gamma) < 1.0)) throw std::domain_error("closure needs |gamma| < 1");
  if (m < 0) throw std::invalid_argument("closure needs m >= 0");
  const double g2 = gamma * gamma;
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  double term = std::pow(g2, m) * fact;  // n = m
  double sum = term;
  for (int n = m; n < 100000; ++n) {
    term *= g2 * static_cast<double>(n + 1) / static_cast<double>(n + 1 - m);
    sum += term;
    if (term < 1e-18 * sum && g2 * (n + 2.0) / (n + 2.0 - m) < 1.0) break;
  }
  const double exact = std::pow(g2, m) * fact / std::pow(1.0 - g2, m + 1);
  if (exact == 0.0) return std::abs(sum);
  return std::abs(sum - exact) / exact;
}

std::vector<IdentityReport> run_identity_suite(int cutoff) {
  std::vector<IdentityReport> out;
  out.push_back(check_shift_identity(0.5, cutoff, 1));
  out.push_back(check_shift_identity(0.5, cutoff, 2));
  for (auto& r : check_conjugation_identities(cplx(0.0, -0.7), cutoff)) out.push_back(r);
  const double gam = 0.3, gt = 1.0;
  out.push_back(check_squeeze_rebasing(gam * (1.0 - std::cos(gt)), gam, cutoff));
  out.push_back(check_exp_reordering(cplx(0.0, 0.4), -0.3, cutoff));
  out.push_back(check_single_chain_state_equation(0.5, 1.0, 0.7, cutoff));
  out.push_back(check_two_chain_state_equation(0.5, 1.0, 0.7, cutoff));

  // Scalar checks: the Riccati solution behind squeeze rebasing, in its
  // degenerate and generic branches.
  const double a = gam * (1.0 - std::cos(gt));
  const double k = 1.0 / (1.0 - gam * gam);
  const RiccatiCheck deg = check_riccati(a * k, a * gam * k, a * gam * gam * k, 1.0);
  const double f1 = -a / (1.0 + a * gam - gam * gam);
  out.push_back(make_report("riccati degenerate branch f(1)", cutoff,
                            std::max(deg.residual, std::abs(deg.closed_form - f1)), "scalar", "n/a",
                            std::abs(f1), kEps));
  const RiccatiCheck gen = check_riccati(0.3, 0.1, 0.2, 1.0);
  out.push_back(make_report("riccati tangent branch", cutoff, gen.residual, "scalar", "n/a",
                            std::abs(gen.closed_form), kEps));
  // Approach the degenerate branch through the tangent formula.
  const cplx near = riccati_closed_form(a * k, a * gam * k, a * gam * gam * k + 1e-9, 1.0);
  out.push_back(make_report("riccati tangent-to-degenerate limit", cutoff, std::abs(near - f1), "scalar", "n/a",
                            std::abs(f1), 1e-9));
  return out;
}

std::vector<MonotoneReport> check_monotone(const std::vector<int>& cutoffs, double floor) {
  std::map<std::string, MonotoneReport> by_name;
  std::vector<std::string> order;
  for (int c : cutoffs) {
    for (const auto& r : run_identity_suite(c)) {
      auto [it, inserted] = by_name.try_emplace(r.name);
      if (inserted) {
        order.push_back(r.name);
        it->second.name = r.name;
      }
      it->second.cutoffs.push_back(c);
      it->second.residuals.push_back(r.residual_norm);
    }
  }
  std::vector<MonotoneReport> out;
  for (const auto& name : order) {
    MonotoneReport m = by_name[name];
    m.passed = true;
    for (std::size_t i = 1; i < m.residuals.size(); ++i) {
      if (!(m.residuals[i] <= 2.0 * m.residuals[i - 1] || m.residuals[i] <= floor)) m.passed = false;
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace rsim

#include "rsim/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include "rsim/classical.hpp"
#include "rsim/closedform.hpp"
#include "rsim/dynamics.hpp"
#include "rsim/identities.hpp"
#include "rsim/rindler.hpp"

namespace rsim {

using nlohmann::json;

namespace {

const std::vector<std::pair<ScenarioKind, std::string>> kKindNames = {
    {ScenarioKind::SingleChain, "single-chain"}, {ScenarioKind::UnruhMinkowski, "unruh-minkowski"},
    {ScenarioKind::TwoChain, "two-chain"},       {ScenarioKind::Duality, "duality"},
    {ScenarioKind::CavityToy, "cavity-toy"},     {ScenarioKind::Identities, "identities"},
    {ScenarioKind::Classical, "classical"},      {ScenarioKind::Coupling, "coupling"},
};

bool needs_squeeze(ScenarioKind k) {
  return k == ScenarioKind::SingleChain || k == ScenarioKind::UnruhMinkowski || k == ScenarioKind::TwoChain ||
         k == ScenarioKind::Duality || k == ScenarioKind::CavityToy;
}

// ---- config parsing -------------------------------------------------------

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
  }
}

double num(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw std::invalid_argument(where + "." + key + ": expected an integer");
  return v.get<int>();
}

template <class T>
std::vector<T> list(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw std::invalid_argument(where + "." + key + ": expected an array");
  std::vector<T> out;
  for (const auto& e : v) {
    if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer())) {
      throw std::invalid_argument(where + "." + key + ": expected numbers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

void maybe(const json& j, const std::string& key, const std::string& where, double& out) {
  if (j.contains(key)) out = num(j, key, where);
}
void maybe(const json& j, const std::string& key, const std::string& where, int& out) {
  if (j.contains(key)) out = integer(j, key, where);
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(what + " must be positive");
}

TauGridSpec parse_grid(const json& j) {
  const std::string w = "tau_grid";
  reject_unknown(j, {"points", "periods", "start", "stop", "values"}, w);
  TauGridSpec t;
  if (j.contains("values")) {
    if (j.size() != 1) throw std::invalid_argument("tau_grid: 'values' excludes other keys");
    t.values = list<double>(j, "values", w);
    if (t.values.empty()) throw std::invalid_argument("tau_grid.values must not be empty");
    return t;
  }
  maybe(j, "points", w, t.points);
  if (t.points < 1) throw std::invalid_argument("tau_grid.points must be >= 1");
  if (j.contains("start") || j.contains("stop")) {
    if (!j.contains("start") || !j.contains("stop") || j.contains("periods")) {
      throw std::invalid_argument("tau_grid: give start and stop together, without periods");
    }
    t.start = num(j, "start", w);
    t.stop = num(j, "stop", w);
  } else {
    maybe(j, "periods", w, t.periods);
    positive(t.periods, "tau_grid.periods");
  }
  return t;
}

Tolerances parse_tolerances(const json& j) {
  const std::string w = "tolerances";
  reject_unknown(j, {"overlap", "frame_overlap", "numbers", "marginal", "oracle", "entropy", "pair_correlation",
                     "identity", "classical_frequency", "classical_transfer", "classical_oracle", "peak_dominance",
                     "coupling_dominance"},
                 w);
  Tolerances t;
  maybe(j, "overlap", w, t.overlap);
  maybe(j, "frame_overlap", w, t.frame_overlap);
  maybe(j, "numbers", w, t.numbers);
  maybe(j, "marginal", w, t.marginal);
  maybe(j, "oracle", w, t.oracle);
  maybe(j, "entropy", w, t.entropy);
  maybe(j, "pair_correlation", w, t.pair_correlation);
  maybe(j, "identity", w, t.identity);
  maybe(j, "classical_frequency", w, t.classical_frequency);
  maybe(j, "classical_transfer", w, t.classical_transfer);
  maybe(j, "classical_oracle", w, t.classical_oracle);
  maybe(j, "peak_dominance", w, t.peak_dominance);
  maybe(j, "coupling_dominance", w, t.coupling_dominance);
  for (double v : {t.overlap, t.frame_overlap, t.numbers, t.marginal, t.oracle, t.entropy, t.pair_correlation,
                   t.identity, t.classical_frequency, t.classical_transfer, t.classical_oracle, t.peak_dominance,
                   t.coupling_dominance}) {
    positive(v, "every tolerance");
  }
  return t;
}

ClassicalSettings parse_classical(const json& j) {
  const std::string w = "classical";
  reject_unknown(j, {"omega", "c", "k", "epsilon", "kmin", "kmax", "points", "dt", "spectrum_time"}, w);
  ClassicalSettings s;
  maybe(j, "omega", w, s.omega);
  maybe(j, "c", w, s.c);
  maybe(j, "k", w, s.k);
  maybe(j, "epsilon", w, s.epsilon);
  maybe(j, "kmin", w, s.kmin);
  maybe(j, "kmax", w, s.kmax);
  maybe(j, "points", w, s.points);
  maybe(j, "dt", w, s.dt);
  maybe(j, "spectrum_time", w, s.spectrum_time);
  positive(s.omega, "classical.omega");
  positive(s.c, "classical.c");
  positive(s.dt, "classical.dt");
  positive(s.spectrum_time, "classical.spectrum_time");
  if (!(s.epsilon > 0.0)) throw std::invalid_argument("classical.epsilon must be positive for the scenario checks");
  if (s.points < 2 || !(s.kmax > s.kmin)) throw std::invalid_argument("classical: need kmax > kmin and points >= 2");
  return s;
}

CouplingSettings parse_coupling(const json& j) {
  const std::string w = "coupling";
  reject_unknown(j, {"a", "c", "spacing", "chain_sizes", "omega_grid", "k_grid"}, w);
  CouplingSettings s;
  maybe(j, "a", w, s.a);
  maybe(j, "c", w, s.c);
  maybe(j, "spacing", w, s.spacing);
  if (j.contains("chain_sizes")) s.chain_sizes = list<int>(j, "chain_sizes", w);
  if (j.contains("omega_grid")) s.omega_grid = list<double>(j, "omega_grid", w);
  if (j.contains("k_grid")) s.k_grid = list<double>(j, "k_grid", w);
  positive(s.a, "coupling.a");
  positive(s.c, "coupling.c");
  positive(s.spacing, "coupling.spacing");
  if (s.chain_sizes.empty() || s.omega_grid.empty()) throw std::invalid_argument("coupling: grids must be non-empty");
  for (int m : s.chain_sizes) {
    if (m < 1) throw std::invalid_argument("coupling.chain_sizes entries must be >= 1");
  }
  for (double o : s.omega_grid) positive(o, "coupling.omega_grid entries");
  return s;
}

// ---- assertions ------------------------------------------------------------

void check_le(ScenarioReport& r, std::string name, double measured, double tol) {
  r.assertions.push_back({std::move(name), measured, tol, "<=", std::isfinite(measured) && measured <= tol});
}
void check_ge(ScenarioReport& r, std::string name, double measured, double tol) {
  r.assertions.push_back({std::move(name), measured, tol, ">=", std::isfinite(measured) && measured >= tol});
}

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

void require_dimension(double dim, const ScenarioConfig& cfg, const std::string& what) {
  if (dim > static_cast<double>(cfg.dimension_budget)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " needs dimension %.6g, over the budget of %zu", dim, cfg.dimension_budget);
    throw InfeasibleCutoff(what + buf,
                           dim > 1.8e19 ? std::size_t(-1) : static_cast<std::size_t>(dim));
  }
}

int base_cutoff(const ScenarioConfig& cfg) {
  const double g = cfg.squeeze->gamma();
  if (cfg.cutoff) {
    if (*cfg.cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    return *cfg.cutoff;
  }
  const double g2 = g * g;
  // Refuse before the policy loop walks to huge n for gamma near 1.
  if (g2 > 0.0) {
    const double n = std::log(cfg.tail_tol * (1.0 - g2)) / std::log(g2);
    if (n > 1e6) throw InfeasibleCutoff("gamma too close to 1 for any cutoff", std::size_t(-1));
  }
  return tail_policy_cutoff(g, cfg.tail_tol);
}

bool near_quarter(double phase) { return std::abs(std::cos(phase)) < 1e-12; }
bool near_half(double phase) { return std::abs(std::sin(phase)) < 1e-12 && std::cos(phase) < 0.0; }

SeriesRow base_row(double tau) {
  SeriesRow row;
  row.tau = tau;
  return row;
}

// ---- quantum scenarios -----------------------------------------------------

void run_single_chain(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const SqueezeParam sp = *cfg.squeeze;
  const double gam = sp.gamma();
  const int n = base_cutoff(cfg);
  require_dimension(std::pow(n + 1.0, 3), cfg, "single-chain register");
  const ModeRegister reg({"sigma", "b1", "b2"}, {n, n, n});
  rep.parameters["cutoff"] = n;
  rep.parameters["dimension"] = reg.dimension();

  const PureState psi0 = minkowski_vacuum(sp, reg);
  const Propagator prop(h_single_chain(cfg.g, reg));
  const FockOperator ns = number_operator(reg, "sigma"), nb = number_operator(reg, "b1");
  const auto taus = cfg.tau_grid.resolve(cfg.g, false);
  const Tolerances& tol = cfg.tolerances;

  double ov_excess = -1.0, ns_excess = -1.0, nb_excess = -1.0, mb_excess = -1.0, ms_excess = -1.0;
  double oracle_gap = 0.0, schmidt_excess = -1.0;
  double peak = -1.0, peak_leak = 0.0;
  std::optional<double> vac_excess;
  for (double tau : taus) {
    const PureState ev = prop.evolve(psi0, tau);
    const ClosedFormResult cf = psi_single_chain(sp, cfg.g, tau, reg);
    const double leak = ev.leakage + cf.leakage;
    rep.leakage_budget = std::max(rep.leakage_budget, leak);
    SeriesRow row = base_row(tau);
    row.overlap = std::abs(overlap(cf.state, ev));
    row.n_sigma = expectation(ev, ns).real();
    row.n_b1 = expectation(ev, nb).real();
    const DensityMatrix field = partial_trace(ev, {"b1", "b2"});
    const DensityMatrix chain = partial_trace(ev, {"sigma"});
    row.entropy_field = von_neumann_entropy(field);
    row.entropy_chains = von_neumann_entropy(chain);
    row.leakage = leak;
    rep.series.push_back(row);

    const HeisenbergNumbers hn = heisenberg_numbers(sp, cfg.g, tau);
    ov_excess = std::max(ov_excess, 1.0 - row.overlap - leak);
    ns_excess = std::max(ns_excess, std::abs(row.n_sigma - hn.n_sigma) - leak);
    nb_excess = std::max(nb_excess, std::abs(row.n_b1 - hn.n_b1) - leak);
    schmidt_excess = std::max(schmidt_excess, std::abs(row.entropy_field - row.entropy_chains) - leak);
    if (row.n_sigma > peak) {
      peak = row.n_sigma;
      peak_leak = leak;
    }

    const DensityMatrix rb = partial_trace(ev, {"b1"});
    const DensityMatrix tb = rho_b1_thermal(sp, cfg.g, tau, n);
    const DensityMatrix ts = rho_sigma_thermal(sp, cfg.g, tau, n);
    mb_excess = std::max(mb_excess, max_abs_diff(rb.rho, tb.rho) - leak);
    ms_excess = std::max(ms_excess, max_abs_diff(chain.rho, ts.rho) - leak);
    const DensityMatrix bo = binomial_trace_oracle(sp, cfg.g, tau, n, std::max(1e-6, std::pow(gam, 2.0 * (n + 1))));
    oracle_gap = std::max(oracle_gap, max_abs_diff(bo.rho, tb.rho));
    if (near_quarter(cfg.g * tau)) {
      vac_excess = std::max(vac_excess.value_or(-1.0), std::abs(rb.rho(0, 0).real() - 1.0) - leak);
    }
  }
  check_le(rep, "closed form vs evolution: 1 - |overlap| - leakage", ov_excess, tol.overlap);
  check_le(rep, "<n_sigma> vs g^2/(1-g^2) sin^2: |diff| - leakage", ns_excess, tol.numbers);
  check_le(rep, "<n_b1> vs g^2/(1-g^2) cos^2: |diff| - leakage", nb_excess, tol.numbers);
  const double occ = gam * gam / (1.0 - gam * gam);
  if (vac_excess) {
    check_le(rep, "peak <n_sigma> vs g^2/(1-g^2): |diff| - leakage", std::abs(peak - occ) - peak_leak, tol.numbers);
    check_le(rep, "b1 ground-state probability at g tau = pi/2: |p0 - 1| - leakage", *vac_excess, tol.marginal);
  }
  check_le(rep, "rho_b1 vs thermal form: max |diff| - leakage", mb_excess, tol.marginal);
  check_le(rep, "rho_sigma vs thermal form: max |diff| - leakage", ms_excess, tol.marginal);
  check_le(rep, "binomial trace oracle vs thermal form: max |diff|", oracle_gap, tol.oracle);
  check_le(rep, "field and chain entropies of the pure state: |diff| - leakage", schmidt_excess, tol.entropy);
}

void run_unruh_minkowski(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const SqueezeParam sp = *cfg.squeeze;
  const double gam = sp.gamma();
  const int n = base_cutoff(cfg);
  const double amp = 2.0 * std::abs(gam) / (1.0 + gam * gam);
  const int l = frame_working_cutoff(amp, n, cfg.tail_tol);
  require_dimension(std::pow(l + 1.0, 2) * (n + 1.0), cfg, "unruh-minkowski padded register");
  const ModeRegister reg({"sigma", "b1", "b2"}, {n, n, n});
  rep.parameters["cutoff"] = n;
  rep.parameters["working_cutoff"] = l;
  rep.parameters["dimension"] = reg.dimension();

  const BogoliubovFrame frame = bogoliubov_frame(sp, reg, {}, l);
  const FockOperator ns = number_operator(reg, "sigma"), nb = number_operator(reg, "b1");
  const auto taus = cfg.tau_grid.resolve(cfg.g, false);
  const Tolerances& tol = cfg.tolerances;
  double ov_excess = -1.0;
  std::optional<double> pair_rel;
  for (double tau : taus) {
    const ClosedFormResult um = psi_unruh_minkowski(sp, cfg.g, tau, reg, frame);
    const ClosedFormResult sc = psi_single_chain(sp, cfg.g, tau, reg);
    const double leak = um.leakage + sc.leakage;
    rep.leakage_budget = std::max(rep.leakage_budget, leak);
    SeriesRow row = base_row(tau);
    row.overlap = std::abs(overlap(um.state, sc.state));
    row.n_sigma = expectation(um.state, ns).real();
    row.n_b1 = expectation(um.state, nb).real();
    row.entropy_field = von_neumann_entropy(partial_trace(um.state, {"b1", "b2"}));
    row.entropy_chains = von_neumann_entropy(partial_trace(um.state, {"sigma"}));
    row.leakage = leak;
    rep.series.push_back(row);
    ov_excess = std::max(ov_excess, 1.0 - row.overlap - leak);
    if (near_half(cfg.g * tau)) {
      const FockOperator corr = frame.a1.adjoint() * frame.a2.adjoint() * frame.a2 * frame.a1;
      const double measured = expectation(um.state, corr).real();
      const double lam = -2.0 * gam / (1.0 + gam * gam);
      const double l2 = lam * lam;
      const double expect = l2 * (1.0 + l2) / ((1.0 - l2) * (1.0 - l2));
      const double rel = expect > 0.0 ? std::abs(measured - expect) / expect : std::abs(measured);
      pair_rel = std::max(pair_rel.value_or(0.0), rel);
      rep.details["pair_correlation"] = {{"tau", tau}, {"measured", measured}, {"expected", expect}};
    }
  }
  check_le(rep, "frame state vs single-chain state: 1 - |overlap| - leakage", ov_excess, tol.frame_overlap);
  if (pair_rel) check_le(rep, "pair correlation at g tau = pi: relative error", *pair_rel, tol.pair_correlation);
}

void run_two_chain(const ScenarioConfig& cfg, ScenarioReport& rep, const ChainModes& modes) {
  const SqueezeParam sp = *cfg.squeeze;
  const int n = base_cutoff(cfg);
  require_dimension(std::pow(n + 1.0, 4), cfg, "two-chain register");
  const ModeRegister reg({modes.sigma1, modes.b1, modes.sigma2, modes.b2}, {n, n, n, n});
  rep.parameters["cutoff"] = n;
  rep.parameters["dimension"] = reg.dimension();
  rep.parameters["modes"] = reg.labels();

  const PureState psi0 = minkowski_vacuum(sp, reg, modes);
  std::vector<Propagator> props;
  for (const auto& h : h_two_chain_terms(cfg.g, reg, modes)) props.emplace_back(h);
  const FockOperator ns = number_operator(reg, modes.sigma1), nb = number_operator(reg, modes.b1);
  const auto taus = cfg.tau_grid.resolve(cfg.g, true);
  const Tolerances& tol = cfg.tolerances;

  const double s_b1_initial = von_neumann_entropy(partial_trace(psi0, {modes.b1}));
  const double s_field_initial = von_neumann_entropy(partial_trace(psi0, {modes.b1, modes.b2}));
  double ov_excess = -1.0, ns_excess = -1.0, nb_excess = -1.0;
  std::optional<double> fid_excess, single_excess, pair_excess, pure_excess;
  for (double tau : taus) {
    const PureState ev = evolve(props, psi0, tau);
    const ClosedFormResult cf = psi_two_chain(sp, cfg.g, tau, reg, modes);
    const double leak = ev.leakage + cf.leakage;
    rep.leakage_budget = std::max(rep.leakage_budget, leak);
    SeriesRow row = base_row(tau);
    row.overlap = std::abs(overlap(cf.state, ev));
    row.n_sigma = expectation(ev, ns).real();
    row.n_b1 = expectation(ev, nb).real();
    const DensityMatrix field = partial_trace(ev, {modes.b1, modes.b2});
    const DensityMatrix chains = partial_trace(ev, {modes.sigma1, modes.sigma2});
    row.entropy_field = von_neumann_entropy(field);
    row.entropy_chains = von_neumann_entropy(chains);
    row.leakage = leak;
    rep.series.push_back(row);
    const HeisenbergNumbers hn = heisenberg_numbers(sp, cfg.g, tau);
    ov_excess = std::max(ov_excess, 1.0 - row.overlap - leak);
    ns_excess = std::max(ns_excess, std::abs(row.n_sigma - hn.n_sigma) - leak);
    nb_excess = std::max(nb_excess, std::abs(row.n_b1 - hn.n_b1) - leak);
    if (near_quarter(cfg.g * tau)) {
      const double f = fidelity(vacuum_state(field.reg), field);
      fid_excess = std::max(fid_excess.value_or(-1.0), 1.0 - f - leak);
      const double s1 = von_neumann_entropy(partial_trace(ev, {modes.sigma1}));
      single_excess = std::max(single_excess.value_or(-1.0), std::abs(s1 - s_b1_initial) - leak);
      pair_excess = std::max(pair_excess.value_or(-1.0), std::abs(row.entropy_chains - s_field_initial) - leak);
      pure_excess = std::max(pure_excess.value_or(-1.0), row.entropy_field - leak);
    }
  }
  check_le(rep, "closed form vs evolution: 1 - |overlap| - leakage", ov_excess, tol.overlap);
  check_le(rep, "<n_sigma1> vs g^2/(1-g^2) sin^2: |diff| - leakage", ns_excess, tol.numbers);
  check_le(rep, "<n_b1> vs g^2/(1-g^2) cos^2: |diff| - leakage", nb_excess, tol.numbers);
  if (fid_excess) {
    check_le(rep, "field marginal vs Rindler vacuum at g tau = pi/2: 1 - F - leakage", *fid_excess, tol.marginal);
    check_le(rep, "S(sigma1) at pi/2 vs S(b1) at 0: |diff| - leakage", *single_excess, tol.entropy);
    check_le(rep, "S(sigma1 sigma2) at pi/2 vs S(b1 b2) at 0: |diff| - leakage", *pair_excess, tol.entropy);
    check_le(rep, "S(b1 b2) at pi/2 - leakage", *pure_excess, tol.entropy);
  }
}

void run_duality(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const SqueezeParam sp = *cfg.squeeze;
  const int n = base_cutoff(cfg);
  const int l = n + (n + 3) / 4;
  require_dimension(std::pow(l + 1.0, 4), cfg, "duality padded register");
  const ChainModes modes;
  const ModeRegister reg({modes.sigma1, modes.b1, modes.sigma2, modes.b2}, {n, n, n, n});
  rep.parameters["cutoff"] = n;
  rep.parameters["working_cutoff"] = l;
  rep.parameters["dimension"] = reg.dimension();

  const FramePair a_frame = bogoliubov_frame(sp, reg, modes, l).pair();
  const FramePair b_frame = collective_B_frame(sp, reg, modes, l).pair();
  const FockOperator ns = number_operator(reg, modes.sigma1), nb = number_operator(reg, modes.b1);
  const auto taus = cfg.tau_grid.resolve(cfg.g, true);
  double ov_excess = -1.0;
  for (double tau : taus) {
    const ClosedFormResult d = psi_duality(sp, cfg.g, tau, reg, a_frame, b_frame);
    const ClosedFormResult t = psi_two_chain(sp, cfg.g, tau, reg, modes);
    const double leak = d.leakage + t.leakage;
    rep.leakage_budget = std::max(rep.leakage_budget, leak);
    SeriesRow row = base_row(tau);
    row.overlap = std::abs(overlap(d.state, t.state));
    row.n_sigma = expectation(d.state, ns).real();
    row.n_b1 = expectation(d.state, nb).real();
    row.entropy_field = von_neumann_entropy(partial_trace(d.state, {modes.b1, modes.b2}));
    row.entropy_chains = von_neumann_entropy(partial_trace(d.state, {modes.sigma1, modes.sigma2}));
    row.leakage = leak;
    rep.series.push_back(row);
    ov_excess = std::max(ov_excess, 1.0 - row.overlap - leak);
  }
  check_le(rep, "frame-product state vs two-chain state: 1 - |overlap| - leakage", ov_excess,
           cfg.tolerances.frame_overlap);
}

// ---- identities ------------------------------------------------------------

void run_identities(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const Tolerances& tol = cfg.tolerances;
  std::string csv = "name,cutoff,residual,norm,domain,bound,passed\n";
  json rows = json::array();
  char buf[64];
  for (const auto& r : run_identity_suite(cfg.identity_cutoff)) {
    check_le(rep, r.name + " at cutoff " + std::to_string(r.cutoff), r.residual_norm, tol.identity);
  }
  const auto mono = check_monotone(cfg.identity_cutoffs);
  for (const auto& m : mono) {
    double worst = 0.0;
    for (std::size_t i = 1; i < m.residuals.size(); ++i) {
      if (m.residuals[i] <= 1e-13) continue;
      worst = std::max(worst, m.residuals[i] / std::max(m.residuals[i - 1], 1e-300));
    }
    check_le(rep, m.name + ": growth factor between cutoffs above the 1e-13 floor", worst, 2.0);
    for (std::size_t i = 0; i < m.cutoffs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m.residuals[i]);
      csv += "\"" + m.name + "\"," + std::to_string(m.cutoffs[i]) + "," + buf + ",,,,\n";
      rows.push_back({{"name", m.name}, {"cutoff", m.cutoffs[i]}, {"residual", m.residuals[i]}});
    }
  }
  // Scalar checks.
  double closure = 0.0;
  for (int m = 0; m <= 5; ++m) closure = std::max(closure, geometric_closure_residual(0.5, m));
  check_le(rep, "geometric closure sum, gamma = 0.5, m <= 5: relative error", closure, 1e-12);
  double oracle = 0.0;
  for (double gam : {0.1, 0.3, 0.5, 0.7}) {
    const SqueezeParam sp = SqueezeParam::from_gamma(gam);
    const int n = tail_policy_cutoff(gam);
    for (double gt : {0.0, 0.4, M_PI / 2, 2.0}) {
      oracle = std::max(oracle, max_abs_diff(binomial_trace_oracle(sp, 1.0, gt, n).rho,
                                             rho_b1_thermal(sp, 1.0, gt, n).rho));
    }
  }
  check_le(rep, "binomial trace oracle vs thermal form: max |diff|", oracle, tol.oracle);
  rep.details["residuals"] = rows;
  rep.table_csv = csv;
}

// ---- classical -------------------------------------------------------------

void run_classical(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const ClassicalSettings& s = cfg.classical;
  const Tolerances& tol = cfg.tolerances;
  const ClassicalModeParams p{s.omega, s.k, s.c, s.epsilon};
  const Dispersion d = dispersion(p);
  const ModeTrace long_run = ode_oracle(p, s.spectrum_time, s.dt);
  const auto peaks = spectral_peaks(long_run, 2.0 * std::max(s.omega, s.c * std::abs(s.k)) + s.epsilon);
  double freq_err = std::numeric_limits<double>::infinity();
  if (peaks.size() == 2) freq_err = std::max(std::abs(peaks[0] - d.nu_plus), std::abs(peaks[1] - d.nu_minus));
  check_le(rep, "normal-mode frequencies vs oracle spectral peaks: max |diff|", freq_err, tol.classical_frequency);
  rep.details["dispersion"] = {{"nu_plus", d.nu_plus}, {"nu_minus", d.nu_minus}, {"rabi_classical", d.nu_plus - d.nu_minus},
                               {"spectral_peaks", peaks}};

  // closed form against the oracle over two Rabi periods
  const double rabi = d.nu_plus - d.nu_minus;
  double cf_err = 0.0, energy = 0.0;
  const double e0 = classical_energy(p, long_run.phi[0], long_run.dphi[0], long_run.psi[0], long_run.dpsi[0]);
  for (std::size_t i = 0; i < long_run.tau.size(); ++i) {
    energy = std::max(energy, std::abs(classical_energy(p, long_run.phi[i], long_run.dphi[i], long_run.psi[i],
                                                        long_run.dpsi[i]) - e0) / e0);
    if (long_run.tau[i] > 4.0 * M_PI / rabi) continue;
    const ModeAmplitudes m = mode_solution(p, long_run.tau[i]);
    cf_err = std::max({cf_err, std::abs(m.phi - long_run.phi[i]), std::abs(m.psi - long_run.psi[i])});
  }
  check_le(rep, "closed form vs oracle over two Rabi periods: max |diff|", cf_err, tol.classical_oracle);
  check_le(rep, "oracle energy drift, relative", energy, tol.classical_oracle);

  // resonant transfer |psi|^2 = sin^2(eps tau/2)
  const ClassicalModeParams res{s.omega, s.omega / s.c, s.c, s.epsilon};
  const double period = 2.0 * M_PI / rabi_classical(res);
  const ModeTrace rt = ode_oracle(res, period, s.dt);
  double tr_cf = 0.0, tr_ode = 0.0;
  for (std::size_t i = 0; i < rt.tau.size(); ++i) {
    const double target = std::pow(std::sin(0.5 * s.epsilon * rt.tau[i]), 2);
    tr_cf = std::max(tr_cf, std::abs(std::norm(mode_solution(res, rt.tau[i]).psi) - target));
    tr_ode = std::max(tr_ode, std::abs(std::norm(rt.psi[i]) - target));
  }
  check_le(rep, "resonant |psi|^2 vs sin^2(eps tau/2), closed form", tr_cf, tol.classical_transfer);
  check_le(rep, "resonant |psi|^2 vs sin^2(eps tau/2), oracle", tr_ode, tol.classical_transfer);

  // amplitude scan over k
  const auto ks = linear_grid(s.kmin, s.kmax, s.points);
  const auto rows = amplitude_scan(s.omega, s.epsilon, ks, s.c);
  std::size_t arg = 0;
  int maxima = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].max_psi2 > rows[arg].max_psi2) arg = i;
    const bool left = i == 0 || rows[i].max_psi2 > rows[i - 1].max_psi2;
    const bool right = i + 1 == rows.size() || rows[i].max_psi2 > rows[i + 1].max_psi2;
    if (left && right) ++maxima;
  }
  const double step = (s.kmax - s.kmin) / (s.points - 1) * s.c / s.omega;
  check_le(rep, "amplitude peak position |kc/omega - 1|", std::abs(rows[arg].k * s.c / s.omega - 1.0), 0.5 * step);
  check_le(rep, "amplitude local maxima over the k grid", maxima, 1.0);
  const double far = max_psi_squared({s.omega, 1.5 * s.omega / s.c, s.c, s.epsilon});
  check_ge(rep, "resonant amplitude / amplitude at kc/omega = 1.5", rows[arg].max_psi2 / far, tol.peak_dominance);
  rep.details["far_detuned"] = {{"closed_form", far},
                                {"approximation", 4.0 * std::pow(s.epsilon * 1.5 * s.omega, 2) /
                                                      std::pow(s.omega * s.omega - 2.25 * s.omega * s.omega, 2)}};
  rep.table_csv = scan_csv(rows, s.omega, s.c);
}

// ---- coupling --------------------------------------------------------------

void run_coupling(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const CouplingSettings& s = cfg.coupling;
  std::vector<int> sizes = s.chain_sizes;
  std::sort(sizes.begin(), sizes.end());
  std::string csv = "chain_size,dominance\n";
  json per = json::array();
  std::vector<double> dom;
  double resonance = 0.0;
  char buf[96];
  for (int m : sizes) {
    const ChainGeometry geom = uniform_chain(m, s.spacing, s.a, s.c);
    const SelectivityReport r = coupling_selectivity_report(geom, s.omega_grid, s.k_grid);
    dom.push_back(r.dominance);
    for (double on : r.on_resonance) resonance = std::max(resonance, std::abs(on - std::sqrt(m)) / std::sqrt(m));
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", m, r.dominance);
    csv += buf;
    per.push_back({{"chain_size", m}, {"dominance", r.dominance}, {"ks", r.ks}, {"omegas", r.omegas}, {"csv", r.to_csv()}});
    if (m >= 64) {
      check_ge(rep, "dominance of the M = " + std::to_string(m) + " chain", r.dominance, cfg.tolerances.coupling_dominance);
    }
  }
  check_le(rep, "on-resonance |S| vs sqrt(M): relative error", resonance, 1e-12);
  if (dom.size() > 1) {
    double growth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < dom.size(); ++i) growth = std::min(growth, dom[i] / dom[i - 1]);
    check_ge(rep, "dominance growth between successive chain sizes (min ratio)", growth, 1.0 + 1e-12);
  }
  rep.details["chains"] = per;
  rep.table_csv = csv;
}

}  // namespace

// ---- public ----------------------------------------------------------------

std::string to_string(ScenarioKind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  throw std::invalid_argument("unknown scenario kind");
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::vector<double> TauGridSpec::resolve(double g, bool two_chain) const {
  if (!values.empty()) return values;
  if (start) return linear_grid(*start, *stop, points);
  if (g == 0.0) throw std::invalid_argument("tau grid in Rabi periods needs nonzero g");
  const double period = (two_chain ? M_PI : 2.0 * M_PI) / std::abs(g);
  return linear_grid(0.0, periods * period, points);
}

ScenarioConfig parse_config(const json& j, const std::string& fallback_name) {
  reject_unknown(j,
                 {"schema_version", "name", "scenario", "gamma", "omega", "g", "tau_grid", "cutoff", "tail_tol",
                  "tolerances", "classical", "coupling", "identity_cutoffs", "identity_cutoff", "dimension_budget"},
                 "config");
  ScenarioConfig c;
  if (!j.contains("schema_version")) throw std::invalid_argument("config: missing schema_version");
  c.schema_version = integer(j, "schema_version", "config");
  if (c.schema_version != kSchemaVersion) {
    throw std::invalid_argument("config: unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (!j.contains("scenario") || !j.at("scenario").is_string()) throw std::invalid_argument("config: missing scenario");
  c.scenario = scenario_kind_from_string(j.at("scenario").get<std::string>());
  c.name = fallback_name;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw std::invalid_argument("config.name: expected a string");
    c.name = j.at("name").get<std::string>();
  }
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw std::invalid_argument("config.name must be a plain non-empty file stem");
  }
  const bool has_g = j.contains("gamma"), has_o = j.contains("omega");
  if (has_g && has_o) throw std::invalid_argument("config: give exactly one of gamma and omega");
  if (has_g) c.squeeze = SqueezeParam::from_gamma(num(j, "gamma", "config"));
  if (has_o) c.squeeze = SqueezeParam::from_omega(num(j, "omega", "config"));
  if (needs_squeeze(c.scenario) && !c.squeeze) {
    throw std::invalid_argument("config: scenario " + to_string(c.scenario) + " needs gamma or omega");
  }
  maybe(j, "g", "config", c.g);
  if (!std::isfinite(c.g)) throw std::invalid_argument("config.g must be finite");
  if (j.contains("tau_grid")) c.tau_grid = parse_grid(j.at("tau_grid"));
  if (j.contains("cutoff")) {
    c.cutoff = integer(j, "cutoff", "config");
    if (*c.cutoff < 1) throw std::invalid_argument("config.cutoff must be >= 1");
  }
  maybe(j, "tail_tol", "config", c.tail_tol);
  positive(c.tail_tol, "config.tail_tol");
  if (j.contains("tolerances")) c.tolerances = parse_tolerances(j.at("tolerances"));
  if (j.contains("classical")) c.classical = parse_classical(j.at("classical"));
  if (j.contains("coupling")) c.coupling = parse_coupling(j.at("coupling"));
  if (j.contains("identity_cutoffs")) c.identity_cutoffs = list<int>(j, "identity_cutoffs", "config");
  maybe(j, "identity_cutoff", "config", c.identity_cutoff);
  for (int v : c.identity_cutoffs) {
    if (v < 3) throw std::invalid_argument("config.identity_cutoffs entries must be >= 3");
  }
  if (c.identity_cutoff < 3) throw std::invalid_argument("config.identity_cutoff must be >= 3");
  if (j.contains("dimension_budget")) {
    const json& v = j.at("dimension_budget");
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
      throw std::invalid_argument("config.dimension_budget: expected a positive integer");
    }
    c.dimension_budget = v.get<std::size_t>();
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).stem().string());
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["scenario"] = to_string(c.scenario);
  if (c.squeeze) {
    j["gamma"] = c.squeeze->gamma();
    if (c.squeeze->omega_rindler()) j["omega"] = *c.squeeze->omega_rindler();
  }
  j["g"] = c.g;
  json grid;
  if (!c.tau_grid.values.empty()) {
    grid["values"] = c.tau_grid.values;
  } else if (c.tau_grid.start) {
    grid = {{"start", *c.tau_grid.start}, {"stop", *c.tau_grid.stop}, {"points", c.tau_grid.points}};
  } else {
    grid = {{"points", c.tau_grid.points}, {"periods", c.tau_grid.periods}};
  }
  j["tau_grid"] = grid;
  if (c.cutoff) j["cutoff"] = *c.cutoff;
  j["tail_tol"] = c.tail_tol;
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"overlap", t.overlap},
                     {"frame_overlap", t.frame_overlap},
                     {"numbers", t.numbers},
                     {"marginal", t.marginal},
                     {"oracle", t.oracle},
                     {"entropy", t.entropy},
                     {"pair_correlation", t.pair_correlation},
                     {"identity", t.identity},
                     {"classical_frequency", t.classical_frequency},
                     {"classical_transfer", t.classical_transfer},
                     {"classical_oracle", t.classical_oracle},
                     {"peak_dominance", t.peak_dominance},
                     {"coupling_dominance", t.coupling_dominance}};
  if (c.scenario == ScenarioKind::Classical) {
    const auto& s = c.classical;
    j["classical"] = {{"omega", s.omega}, {"c", s.c},       {"k", s.k},        {"epsilon", s.epsilon},
                      {"kmin", s.kmin},   {"kmax", s.kmax}, {"points", s.points}, {"dt", s.dt},
                      {"spectrum_time", s.spectrum_time}};
  }
  if (c.scenario == ScenarioKind::Coupling) {
    const auto& s = c.coupling;
    j["coupling"] = {{"a", s.a},
                     {"c", s.c},
                     {"spacing", s.spacing},
                     {"chain_sizes", s.chain_sizes},
                     {"omega_grid", s.omega_grid},
                     {"k_grid", s.k_grid}};
  }
  if (c.scenario == ScenarioKind::Identities) {
    j["identity_cutoffs"] = c.identity_cutoffs;
    j["identity_cutoff"] = c.identity_cutoff;
  }
  j["dimension_budget"] = c.dimension_budget;
  return j;
}

bool ScenarioReport::passed() const {
  if (refusal || error || assertions.empty()) return false;
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  ScenarioReport rep;
  rep.name = cfg.name;
  rep.scenario = cfg.scenario;
  rep.parameters = config_to_json(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.scenario) {
      case ScenarioKind::SingleChain:
        run_single_chain(cfg, rep);
        break;
      case ScenarioKind::UnruhMinkowski:
        run_unruh_minkowski(cfg, rep);
        break;
      case ScenarioKind::TwoChain:
        run_two_chain(cfg, rep, ChainModes{});
        break;
      case ScenarioKind::CavityToy: {
        // Two cavity modes, each coupled to its own emitter: the two-chain model under other names.
        ChainModes m;
        m.sigma1 = "emitter1";
        m.sigma2 = "emitter2";
        m.b1 = "cavity1";
        m.b2 = "cavity2";
        run_two_chain(cfg, rep, m);
        break;
      }
      case ScenarioKind::Duality:
        run_duality(cfg, rep);
        break;
      case ScenarioKind::Identities:
        run_identities(cfg, rep);
        break;
      case ScenarioKind::Classical:
        run_classical(cfg, rep);
        break;
      case ScenarioKind::Coupling:
        run_coupling(cfg, rep);
        break;
    }
  } catch (const InfeasibleCutoff& e) {
    rep.refusal = e.what();
    rep.required_dimension = e.required_dimension();
    rep.series.clear();
    rep.assertions.clear();
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RINDLER_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
    warn("ignoring RINDLER_SIM_THREADS='" + std::string(env) + "': expected a positive integer");
  }
  return hw;
}

std::vector<ScenarioReport> sweep(const std::vector<ScenarioConfig>& configs, unsigned threads) {
  std::vector<ScenarioReport> out(configs.size());
  if (configs.empty()) return out;
  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) out[i] = run_scenario(configs[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::vector<std::string> config_files_in(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument(dir + " is not a directory");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rsim

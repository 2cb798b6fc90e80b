#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsim/classical.hpp"
#include "rsim/dynamics.hpp"
#include "rsim/identities.hpp"
#include "rsim/report_io.hpp"
#include "rsim/rindler.hpp"
#include "rsim/scenarios.hpp"

namespace {

const char* kFooter = R"(Outputs
  run/sweep write <name>.json and <name>.csv per scenario.
  Time-series CSV columns (single-chain, unruh-minkowski, two-chain, cavity-toy, duality):
    tau             evolution time
    overlap         |<reference|state>| between the two routes compared
    n_sigma         <n> of the (first) chain mode
    n_b1            <n> of the right-wedge field mode
    entropy_field   von Neumann entropy of the field marginal
    entropy_chains  von Neumann entropy of the chain marginal
    leakage         truncation weight budgeted into every tolerance
  identities CSV: name,cutoff,residual,...   classical CSV: k,kc_over_omega,nu_plus,nu_minus,rabi,max_psi2
  coupling CSV: chain_size,dominance; coupling-report prints the |S| matrix (rows Omega, columns k).
Exit status is 0 only when every assertion passes. RINDLER_SIM_THREADS caps sweep parallelism.)";

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Fock-space simulator for accelerated oscillator chains"};
  app.footer(kFooter);
  app.require_subcommand(1);

  std::string config, dir, out_dir = ".";
  bool no_csv = false, no_json = false, timing = false;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Directory for report files");
  run->add_flag("--no-csv", no_csv, "Skip the CSV file");
  run->add_flag("--no-json", no_json, "Skip the JSON report");
  run->add_flag("--include-timing", timing, "Record wall-clock time in the JSON report");

  auto* sw = app.add_subcommand("sweep", "Run every *.json config in a directory");
  sw->add_option("dir", dir, "Config directory")->required()->check(CLI::ExistingDirectory);
  sw->add_option("--out-dir", out_dir, "Directory for report files");
  sw->add_option("--threads", threads, "Parallel runs (default RINDLER_SIM_THREADS or core count)");
  sw->add_flag("--include-timing", timing, "Record wall-clock time in the JSON reports");

  std::vector<int> cutoffs{6, 8, 10, 12};
  int id_cutoff = 10;
  std::string id_json;
  auto* vi = app.add_subcommand("verify-identities", "Operator identity residuals on interior subspaces");
  vi->add_option("--cutoffs", cutoffs, "Cutoffs for the monotonicity check")->delimiter(',');
  vi->add_option("--cutoff", id_cutoff, "Cutoff for the residual bound check");
  vi->add_option("--json", id_json, "Write the reports as a JSON array");

  double omega = 1.0, epsilon = 0.1, kmin = 0.0, kmax = 2.0, c = 1.0;
  int points = 81;
  std::string out;
  auto* cs = app.add_subcommand("classical-scan", "Rabi amplitude and frequency versus k");
  cs->add_option("--omega", omega, "Oscillator frequency")->check(CLI::PositiveNumber);
  cs->add_option("--epsilon", epsilon, "Coupling")->check(CLI::NonNegativeNumber);
  cs->add_option("--kmin", kmin, "Smallest wavenumber");
  cs->add_option("--kmax", kmax, "Largest wavenumber");
  cs->add_option("--points", points, "Grid points")->check(CLI::PositiveNumber);
  cs->add_option("--c", c, "Wave speed")->check(CLI::PositiveNumber);
  cs->add_option("--out", out, "CSV file (default stdout)");

  int chain = 64;
  double spacing = 1.0, accel = 1.0;
  std::vector<double> omegas{0.5, 1.0, 1.5, 2.0}, ks;
  auto* cr = app.add_subcommand("coupling-report", "|S(k, Omega)| for a uniform chain");
  cr->add_option("--chain-size", chain, "Oscillators")->check(CLI::PositiveNumber);
  cr->add_option("--spacing", spacing, "Spacing in zbar")->check(CLI::PositiveNumber);
  cr->add_option("--a", accel, "Acceleration")->check(CLI::PositiveNumber);
  cr->add_option("--c", c, "Speed of light")->check(CLI::PositiveNumber);
  cr->add_option("--omegas", omegas, "Rindler frequencies")->delimiter(',');
  cr->add_option("--ks", ks, "Wavenumbers (default: the resonant ones)")->delimiter(',');
  cr->add_option("--out", out, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rsim::ScenarioReport rep;
      try {
        rep = rsim::run_scenario(rsim::load_config(config));
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      rsim::write_report_files(rep, out_dir, !no_json, !no_csv, timing);
      std::cout << rsim::summary_table({rep});
      for (const auto& a : rep.assertions) {
        std::printf("  [%s] %s: %s %s %s\n", a.passed ? "ok" : "FAIL", a.name.c_str(),
                    rsim::format_double(a.measured).c_str(), a.relation.c_str(),
                    rsim::format_double(a.tolerance).c_str());
      }
      return rep.passed() ? 0 : 1;
    }
    if (sw->parsed()) {
      std::vector<rsim::ScenarioConfig> cfgs;
      std::vector<rsim::ScenarioReport> bad;
      for (const auto& path : rsim::config_files_in(dir)) {
        try {
          cfgs.push_back(rsim::load_config(path));
        } catch (const std::exception& e) {
          rsim::ScenarioReport r;
          r.name = std::filesystem::path(path).stem().string();
          r.error = std::string("config error: ") + e.what();
          bad.push_back(r);
        }
      }
      auto reports = rsim::sweep(cfgs, threads);
      for (auto& r : bad) reports.push_back(r);
      bool ok = true;
      for (const auto& r : reports) {
        rsim::write_report_files(r, out_dir, true, true, timing);
        ok = ok && r.passed();
      }
      std::cout << rsim::summary_table(reports);
      return ok ? 0 : 1;
    }
    if (vi->parsed()) {
      const auto reports = rsim::run_identity_suite(id_cutoff);
      bool ok = true;
      std::printf("%-44s %6s %12s %9s %s\n", "identity", "cutoff", "residual", "bound", "status");
      for (const auto& r : reports) {
        std::printf("%-44s %6d %12.3e %9.1e %s\n", r.name.c_str(), r.cutoff, r.residual_norm, r.bound,
                    r.passed ? "pass" : "FAIL");
        ok = ok && r.passed;
      }
      for (const auto& m : rsim::check_monotone(cutoffs)) {
        std::printf("%-44s %s\n", ("monotone: " + m.name).c_str(), m.passed ? "pass" : "FAIL");
        ok = ok && m.passed;
      }
      if (!id_json.empty()) emit(rsim::identity_reports_to_json(reports).dump(2) + "\n", id_json);
      return ok ? 0 : 1;
    }
    if (cs->parsed()) {
      const auto rows = rsim::amplitude_scan(omega, epsilon, rsim::linear_grid(kmin, kmax, points), c);
      emit(rsim::scan_csv(rows, omega, c), out);
      return 0;
    }
    if (cr->parsed()) {
      const auto geom = rsim::uniform_chain(chain, spacing, accel, c);
      const auto rep = rsim::coupling_selectivity_report(geom, omegas, ks);
      emit(rep.to_csv(), out);
      std::fprintf(stderr, "dominance %.6g\n", rep.dominance);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

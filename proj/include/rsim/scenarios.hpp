#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsim/states.hpp"

namespace rsim {

enum class ScenarioKind { SingleChain, UnruhMinkowski, TwoChain, Duality, CavityToy, Identities, Classical, Coupling };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

constexpr int kSchemaVersion = 1;

// Either {points, periods}: `points` samples over `periods` Rabi periods, or
// {start, stop, points}, or an explicit list of values. Times are in units of tau.
struct TauGridSpec {
  int points = 65;
  double periods = 1.0;
  std::optional<double> start, stop;
  std::vector<double> values;

  std::vector<double> resolve(double g, bool two_chain) const;
};

struct Tolerances {
  double overlap = 1e-8;
  double frame_overlap = 1e-7;
  double numbers = 1e-8;
  double marginal = 1e-8;
  double oracle = 1e-10;
  double entropy = 1e-8;
  double pair_correlation = 1e-6;  // relative
  double identity = 1e-8;
  double classical_frequency = 1e-4;
  double classical_transfer = 1e-3;
  double classical_oracle = 1e-6;
  double peak_dominance = 15.0;
  double coupling_dominance = 10.0;
};

struct ClassicalSettings {
  double omega = 1.0;
  double c = 1.0;
  double k = 1.0;
  double epsilon = 0.1;
  double kmin = 0.0;
  double kmax = 2.0;
  int points = 81;
  double dt = 0.01;
  double spectrum_time = 600.0;
};

struct CouplingSettings {
  double a = 1.0;
  double c = 1.0;
  double spacing = 1.0;
  std::vector<int> chain_sizes{16, 64, 256};
  std::vector<double> omega_grid{0.5, 1.0, 1.5, 2.0};
  std::vector<double> k_grid;  // empty: resonant wavenumbers of omega_grid
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  ScenarioKind scenario = ScenarioKind::SingleChain;
  std::optional<SqueezeParam> squeeze;
  double g = 1.0;
  TauGridSpec tau_grid;
  std::optional<int> cutoff;
  double tail_tol = 1e-12;
  Tolerances tolerances;
  ClassicalSettings classical;
  CouplingSettings coupling;
  std::vector<int> identity_cutoffs{6, 8, 10, 12};
  int identity_cutoff = 10;
  std::size_t dimension_budget = 8'000'000;
};

// Throws std::invalid_argument on unknown keys, wrong types, missing or
// doubly-specified squeezing, or non-positive tolerances.
ScenarioConfig parse_config(const nlohmann::json& j, const std::string& fallback_name = "scenario");
ScenarioConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

struct Assertion {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=" or ">=" : measured relation tolerance must hold
  bool passed = false;
};

struct SeriesRow {
  double tau = 0.0;
  double overlap = 0.0;
  double n_sigma = 0.0;
  double n_b1 = 0.0;
  double entropy_field = 0.0;
  double entropy_chains = 0.0;
  double leakage = 0.0;
};

struct ScenarioReport {
  std::string name;
  ScenarioKind scenario = ScenarioKind::SingleChain;
  nlohmann::json parameters;
  std::vector<SeriesRow> series;
  std::vector<Assertion> assertions;
  double leakage_budget = 0.0;
  std::optional<std::string> refusal;
  std::optional<std::size_t> required_dimension;
  std::optional<std::string> error;
  // Scenario-specific tables: identity residuals, scan rows, |S| matrices.
  nlohmann::json details = nlohmann::json::object();
  std::string table_csv;  // non-time-series scenarios put their table here
  double wall_clock_seconds = 0.0;

  bool passed() const;
};

ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Runs independently, up to `threads` at a time (0: RINDLER_SIM_THREADS or the
// hardware count). Errors stay in their own report. Order follows the input.
std::vector<ScenarioReport> sweep(const std::vector<ScenarioConfig>& configs, unsigned threads = 0);
unsigned default_thread_count();

// Config file paths in a directory, sorted.
std::vector<std::string> config_files_in(const std::string& dir);

}  // namespace rsim

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rsim/fock.hpp"
#include "rsim/identities.hpp"
#include "rsim/scenarios.hpp"

namespace rsim {

// %.17g: enough digits to round-trip a double.
std::string format_double(double v);

// {modes, cutoffs}
nlohmann::json register_to_json(const ModeRegister& reg);
ModeRegister register_from_json(const nlohmann::json& j);

// {register, data: [[re, im], ...] in canonical basis order, leakage}
nlohmann::json state_to_json(const PureState& psi);
PureState state_from_json(const nlohmann::json& j);

// Matrices use the same layout with data flattened row-major.
nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const FockOperator& op);
FockOperator operator_from_json(const nlohmann::json& j);

nlohmann::json identity_report_to_json(const IdentityReport& r);
nlohmann::json identity_reports_to_json(const std::vector<IdentityReport>& rs);

// Wall-clock time is left out unless asked for, so identical runs give identical bytes.
nlohmann::json report_to_json(const ScenarioReport& r, bool include_timing = false);
std::string report_json_text(const ScenarioReport& r, bool include_timing = false);

// Time-series scenarios: tau,overlap,n_sigma,n_b1,entropy_field,entropy_chains,leakage.
// Others: their own table.
std::string report_csv(const ScenarioReport& r);
extern const char* const kSeriesCsvHeader;

// <dir>/<name>.json and <dir>/<name>.csv; returns the paths written.
std::vector<std::string> write_report_files(const ScenarioReport& r, const std::string& dir,
                                            bool write_json = true, bool write_csv = true,
                                            bool include_timing = false);

// Summary table of a batch, one line per report.
std::string summary_table(const std::vector<ScenarioReport>& reports);

}  // namespace rsim

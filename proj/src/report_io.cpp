#include "rsim/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rsim {

using nlohmann::json;

const char* const kSeriesCsvHeader = "tau,overlap,n_sigma,n_b1,entropy_field,entropy_chains,leakage";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json complex_list(const cplx* data, Index n) {
  json out = json::array();
  for (Index i = 0; i < n; ++i) out.push_back({data[i].real(), data[i].imag()});
  return out;
}

std::vector<cplx> read_complex_list(const json& j, Index expected) {
  if (!j.is_array() || static_cast<Index>(j.size()) != expected) {
    throw std::invalid_argument("serialized data has the wrong length");
  }
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw std::invalid_argument("serialized entries must be [re, im] pairs");
    }
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

Mat read_matrix(const json& j, Index dim) {
  const auto flat = read_complex_list(j.at("data"), dim * dim);
  Mat m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) m(r, c) = flat[static_cast<std::size_t>(r * dim + c)];
  }
  return m;
}

json matrix_data(const Mat& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return out;
}

// JSON has no NaN or infinity; keep such values readable as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

json register_to_json(const ModeRegister& reg) { return {{"modes", reg.labels()}, {"cutoffs", reg.cutoffs()}}; }

ModeRegister register_from_json(const json& j) {
  return ModeRegister(j.at("modes").get<std::vector<std::string>>(), j.at("cutoffs").get<std::vector<int>>());
}

json state_to_json(const PureState& psi) {
  return {{"register", register_to_json(psi.reg)},
          {"data", complex_list(psi.amplitudes.data(), psi.amplitudes.size())},
          {"leakage", psi.leakage}};
}

PureState state_from_json(const json& j) {
  PureState s;
  s.reg = register_from_json(j.at("register"));
  const auto d = read_complex_list(j.at("data"), s.reg.dimension());
  s.amplitudes = Eigen::Map<const Vec>(d.data(), static_cast<Index>(d.size()));
  s.leakage = j.value("leakage", 0.0);
  return s;
}

json density_to_json(const DensityMatrix& rho) {
  return {{"register", register_to_json(rho.reg)}, {"data", matrix_data(rho.rho)}, {"leakage", rho.leakage}};
}

DensityMatrix density_from_json(const json& j) {
  DensityMatrix d;
  d.reg = register_from_json(j.at("register"));
  d.rho = read_matrix(j, d.reg.dimension());
  d.leakage = j.value("leakage", 0.0);
  return d;
}

json operator_to_json(const FockOperator& op) {
  return {{"register", register_to_json(op.reg())}, {"data", matrix_data(op.dense())}};
}

FockOperator operator_from_json(const json& j) {
  const ModeRegister reg = register_from_json(j.at("register"));
  const Mat m = read_matrix(j, reg.dimension());
  return FockOperator(reg, m.sparseView(0.0, 0.0));
}

json identity_report_to_json(const IdentityReport& r) {
  return {{"name", r.name},
          {"cutoff", r.cutoff},
          {"residual_norm", number(r.residual_norm)},
          {"norm_kind", r.norm_kind},
          {"domain", r.domain},
          {"interior_levels_excluded", r.interior_levels_excluded},
          {"operand_norm", number(r.operand_norm)},
          {"roundoff_estimate", number(r.roundoff_estimate)},
          {"bound", r.bound},
          {"passed", r.passed}};
}

json identity_reports_to_json(const std::vector<IdentityReport>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(identity_report_to_json(r));
  return out;
}

json report_to_json(const ScenarioReport& r, bool include_timing) {
  json j;
  j["name"] = r.name;
  j["scenario"] = to_string(r.scenario);
  j["passed"] = r.passed();
  j["parameters"] = r.parameters;
  j["leakage_budget"] = number(r.leakage_budget);
  if (r.refusal) {
    j["refusal"] = *r.refusal;
    j["required_dimension"] = *r.required_dimension;
  }
  if (r.error) j["error"] = *r.error;
  json as = json::array();
  for (const auto& a : r.assertions) {
    as.push_back({{"name", a.name},
                  {"measured", number(a.measured)},
                  {"relation", a.relation},
                  {"tolerance", a.tolerance},
                  {"passed", a.passed}});
  }
  j["assertions"] = as;
  json series = json::array();
  for (const auto& s : r.series) {
    series.push_back({number(s.tau), number(s.overlap), number(s.n_sigma), number(s.n_b1), number(s.entropy_field),
                      number(s.entropy_chains), number(s.leakage)});
  }
  j["series_columns"] = {"tau", "overlap", "n_sigma", "n_b1", "entropy_field", "entropy_chains", "leakage"};
  j["series"] = series;
  j["details"] = r.details;
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

std::string report_json_text(const ScenarioReport& r, bool include_timing) {
  return report_to_json(r, include_timing).dump(2) + "\n";
}

std::string report_csv(const ScenarioReport& r) {
  if (!r.table_csv.empty()) return r.table_csv;
  std::string out = std::string(kSeriesCsvHeader) + "\n";
  for (const auto& s : r.series) {
    out += format_double(s.tau) + "," + format_double(s.overlap) + "," + format_double(s.n_sigma) + "," +
           format_double(s.n_b1) + "," + format_double(s.entropy_field) + "," + format_double(s.entropy_chains) +
           "," + format_double(s.leakage) + "\n";
  }
  return out;
}

std::vector<std::string> write_report_files(const ScenarioReport& r, const std::string& dir, bool write_json,
                                            bool write_csv, bool include_timing) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  auto put = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    paths.push_back(p.string());
  };
  if (write_json) put(fs::path(dir) / (r.name + ".json"), report_json_text(r, include_timing));
  if (write_csv) put(fs::path(dir) / (r.name + ".csv"), report_csv(r));
  return paths;
}

std::string summary_table(const std::vector<ScenarioReport>& reports) {
  std::string out;
  char buf[512];
  for (const auto& r : reports) {
    std::size_t ok = 0;
    for (const auto& a : r.assertions) ok += a.passed ? 1 : 0;
    std::string status = r.passed() ? "PASS" : "FAIL";
    std::string note;
    if (r.refusal) note = " refused: " + *r.refusal;
    if (r.error) note = " error: " + *r.error;
    std::snprintf(buf, sizeof buf, "%-4s %-28s %-16s %zu/%zu assertions%s\n", status.c_str(), r.name.c_str(),
                  to_string(r.scenario).c_str(), ok, r.assertions.size(), note.c_str());
    out += buf;
  }
  return out;
}

}  // namespace rsim

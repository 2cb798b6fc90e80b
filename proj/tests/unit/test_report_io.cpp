#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rsim/closedform.hpp"
#include "rsim/report_io.hpp"

using namespace rsim;
using nlohmann::json;

TEST_SUITE("report-io") {

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("state round trip is exact") {
  const ModeRegister reg({"sigma", "b1", "b2"}, {3, 4, 4});
  const ClosedFormResult cf = psi_single_chain(SqueezeParam::from_gamma(0.4), 1.0, 0.37, reg);
  const PureState back = state_from_json(json::parse(state_to_json(cf.state).dump()));
  CHECK(back.reg.labels() == reg.labels());
  CHECK(back.reg.cutoffs() == reg.cutoffs());
  CHECK(back.leakage == cf.state.leakage);
  CHECK((back.amplitudes.array() == cf.state.amplitudes.array()).all());
}

TEST_CASE("density and operator round trips") {
  const ModeRegister reg({"a", "b"}, {2, 3});
  const FockOperator op = creation(reg, "a") * annihilation(reg, "b") * cplx(0.3, -1.1);
  const FockOperator op2 = operator_from_json(json::parse(operator_to_json(op).dump()));
  CHECK((op2.dense().array() == op.dense().array()).all());
  const DensityMatrix rho = rho_b1_thermal(SqueezeParam::from_gamma(0.5), 1.0, 0.2, 6);
  const DensityMatrix r2 = density_from_json(json::parse(density_to_json(rho).dump()));
  CHECK((r2.rho.array() == rho.rho.array()).all());
  CHECK(r2.leakage == rho.leakage);
  json bad = state_to_json(PureState{reg, Vec::Zero(reg.dimension()), 0.0});
  bad["data"].erase(0);
  CHECK_THROWS(state_from_json(bad));
}

TEST_CASE("report files") {
  ScenarioReport r;
  r.name = "demo";
  r.series.push_back({0.0, 1.0, 0.0, 0.1, 0.2, 0.2, 1e-15});
  r.assertions.push_back({"overlap", 1e-12, 1e-8, "<=", true});
  r.wall_clock_seconds = 1.5;
  const std::string csv = report_csv(r);
  CHECK(csv.rfind(std::string(kSeriesCsvHeader) + "\n", 0) == 0);
  CHECK(std::string(kSeriesCsvHeader) == "tau,overlap,n_sigma,n_b1,entropy_field,entropy_chains,leakage");
  const json j = json::parse(report_json_text(r));
  CHECK(j["passed"] == true);
  CHECK(!j.contains("wall_clock_seconds"));
  CHECK(report_to_json(r, true).contains("wall_clock_seconds"));

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rsim_report_files";
  fs::remove_all(dir);
  const auto paths = write_report_files(r, dir.string());
  REQUIRE(paths.size() == 2);
  std::ifstream in(dir / "demo.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == report_json_text(r));
  CHECK(summary_table({r}).find("demo") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("non-finite values survive as strings") {
  ScenarioReport r;
  r.name = "nf";
  r.assertions.push_back({"x", std::numeric_limits<double>::infinity(), 1.0, "<=", false});
  CHECK(json::parse(report_json_text(r)).contains("assertions"));
}

}  // TEST_SUITE

// End-to-end tests for the command-line front end: exit codes, report shape,
// byte determinism, the inline twist grammar, and input rejection.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thodge/cli.hpp"

using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int c = thodge::run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

json parsed(const CliRun& r) { return json::parse(r.out); }

int dim_of(const json& table, int p, int q) {
  for (const auto& row : table["dims"])
    if (row["p"] == p && row["q"] == q) return row["dim"];
  return -1;
}

std::string check_status(const json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return c["status"];
  return "(missing)";
}

bool all_checks_pass(const json& report) {
  for (const auto& c : report["checks"])
    if (c["status"] != "pass") return false;
  return !report["checks"].empty();
}

}  // namespace

TEST_CASE("validate accepts bundled models by name, with or without .json") {
  for (const std::string name : {"torus_n2", "kodaira_thurston", "kodaira_thurston.json",
                                 "hopf_surface", "torus_n1", "torus_n3"}) {
    const CliRun r = run({"validate", "--model", name});
    CAPTURE(name);
    CHECK(r.code == 0);
    const json j = parsed(r);
    CHECK(j["command"] == "validate");
    CHECK(check_status(j, "model_validation") == "pass");
    CHECK(j["results"]["issues"].empty());
  }
}

TEST_CASE("validate rejects unknown names and malformed files with exit 2") {
  CHECK(run({"validate", "--model", "no_such_model"}).code == 2);

  const std::string path = "/tmp/thodge_cli_bad_model.json";
  {
    std::ofstream f(path);
    f << R"({"name":"bad","n":1,"d_holo":[],"d_anti":[],"theta_examples":{"x":[["1/0",["0"],["1"]]]}})";
  }
  const CliRun r = run({"validate", "--model", path});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(!r.err.empty());
  std::remove(path.c_str());
}

TEST_CASE("hodge: untwisted torus table is binomial and chi vanishes") {
  const CliRun r = run({"hodge", "--model", "torus_n2"});
  REQUIRE(r.code == 0);
  const json j = parsed(r);
  const json& t = j["results"]["table"];
  const int expected[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(dim_of(t, p, q) == expected[p][q]);
  for (const auto& c : j["results"]["chi"]["coeffs"]) CHECK(c == 0);
  CHECK(j["results"]["special_values"]["arithmetic_genus"] == 0);
  CHECK(j["results"]["special_values"]["euler_number"] == 0);
}

TEST_CASE("hodge: twisted torus table vanishes identically") {
  const CliRun r = run({"hodge", "--model", "torus_n2", "--theta", "phi_bar_1"});
  REQUIRE(r.code == 0);
  const json t = parsed(r)["results"]["table"];
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(dim_of(t, p, q) == 0);
}

TEST_CASE("hodge: bundled surface model has the four expected units") {
  const CliRun r = run({"hodge", "--model", "hopf_surface"});
  REQUIRE(r.code == 0);
  const json t = parsed(r)["results"]["table"];
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const bool unit = (p == 0 && q == 0) || (p == 0 && q == 1) || (p == 2 && q == 1) ||
                        (p == 2 && q == 2);
      CHECK(dim_of(t, p, q) == (unit ? 1 : 0));
    }
}

TEST_CASE("hodge: single holomorphic degree reports that strip and its euler sum") {
  const CliRun r = run({"hodge", "--model", "torus_n2", "--p", "1"});
  REQUIRE(r.code == 0);
  const json j = parsed(r);
  const json& t = j["results"]["table"];
  CHECK(dim_of(t, 1, 0) == 2);
  CHECK(dim_of(t, 1, 1) == 4);
  CHECK(dim_of(t, 1, 2) == 2);
  CHECK(j["results"]["euler_p"] == 0);
  CHECK(run({"hodge", "--model", "torus_n2", "--p", "7"}).code == 2);
  CHECK(run({"hodge", "--model", "torus_n2", "--p", "x"}).code == 2);
}

TEST_CASE("hodge: numeric mode reports determinate verdicts and matches exact dims") {
  const CliRun r = run({"hodge", "--model", "kodaira_thurston", "--theta", "phi_bar_1",
                        "--mode", "numeric"});
  REQUIRE(r.code == 0);
  const json j = parsed(r);
  CHECK(check_status(j, "numeric_ranks_determinate") == "pass");
  for (const auto& v : j["results"]["verdicts"]) CHECK(v["determinate"] == true);

  const CliRun exact = run({"hodge", "--model", "kodaira_thurston", "--theta", "phi_bar_1"});
  const json te = parsed(exact)["results"]["table"];
  const json tn = j["results"]["table"];
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(dim_of(tn, p, q) == dim_of(te, p, q));

  CHECK(run({"hodge", "--model", "torus_n2", "--mode", "numeric", "--p", "1"}).code == 2);
}

TEST_CASE("hodge: unknown theta label exits 2 and names the available labels") {
  const CliRun r = run({"hodge", "--model", "torus_n2", "--theta", "nope"});
  CHECK(r.code == 2);
  CHECK(r.err.find("phi_bar_1") != std::string::npos);
}

TEST_CASE("hodge: csv layout starts with the table grid") {
  const CliRun r = run({"hodge", "--model", "torus_n2", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("p\\q,0,1,2\n", 0) == 0);
  CHECK(r.out.find("chi,0") != std::string::npos);
  CHECK(r.out.find("euler_number,0\n") != std::string::npos);
}

TEST_CASE("reports are byte deterministic; timing appears only on request") {
  const std::vector<std::string> args = {"hodge", "--model", "kodaira_thurston", "--theta",
                                         "phi_bar_1"};
  const CliRun a = run(args);
  const CliRun b = run(args);
  CHECK(a.out == b.out);
  CHECK(parsed(a).contains("timing_ms") == false);

  std::vector<std::string> timed = args;
  timed.push_back("--timing");
  const json jt = parsed(run(timed));
  REQUIRE(jt.contains("timing_ms"));
  CHECK(jt["timing_ms"].get<double>() >= 0.0);
}

TEST_CASE("--out writes the report to a file and leaves stdout empty") {
  const std::string path = "/tmp/thodge_cli_report.json";
  const CliRun r = run({"validate", "--model", "torus_n1", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  REQUIRE(f.good());
  json j;
  f >> j;
  CHECK(check_status(j, "model_validation") == "pass");
  std::remove(path.c_str());

  CHECK(run({"validate", "--model", "torus_n1", "--out", "/nonexistent_dir_xyz/r.json"}).code ==
        1);
}

TEST_CASE("verify 1.1: twisted vanishing and binomial untwisted dims on tori") {
  for (const std::string n : {"1", "2", "3"}) {
    const CliRun r = run({"verify", "--which", "1.1", "--torus-n", n});
    CAPTURE(n);
    CHECK(r.code == 0);
    CHECK(all_checks_pass(parsed(r)));
  }
  CHECK(run({"verify", "--which", "1.1", "--torus-n", "4"}).code == 2);
}

TEST_CASE("verify 3.3/3.4: randomized integral identities stay under tolerance") {
  for (const std::string which : {"3.3", "3.4"}) {
    const CliRun r = run({"verify", "--which", which, "--theta", "2+cos", "--trials", "8"});
    CAPTURE(which);
    REQUIRE(r.code == 0);
    const json j = parsed(r);
    CHECK(all_checks_pass(j));
    CHECK(j["results"]["max_residual"].get<double>() <= 1e-9);
    CHECK(j["results"]["residuals"].size() == 8);
  }
}

TEST_CASE("verify 3.3: ascii expression and explicit form produce identical csv reports") {
  const CliRun a =
      run({"verify", "--which", "3.3", "--theta", "2+cos", "--trials", "4", "--format", "csv"});
  const CliRun b = run({"verify", "--which", "3.3", "--theta", "2+cos(2*pi*x_1)", "--trials", "4",
                        "--format", "csv"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("check,status,detail\n", 0) == 0);
}

TEST_CASE("verify 3.5: certified kernel element satisfies the weighted-norm identity") {
  const CliRun r = run({"verify", "--which", "3.5", "--theta", "2", "--t",
                        "1.5707963267948966"});
  REQUIRE(r.code == 0);
  const json j = parsed(r);
  CHECK(check_status(j, "near_kernel_present") == "pass");
  CHECK(check_status(j, "kernel_element_certified") == "pass");
  CHECK(check_status(j, "weighted_norm_identity") == "pass");
  const double w = j["results"]["identity"]["weighted_norm"].get<double>();
  CHECK(w == doctest::Approx(std::numbers::pi_v<double> * std::numbers::pi_v<double>)
                 .epsilon(1e-9));
}

TEST_CASE("verify 3.5: an empty truncated kernel is a finding, not a failure") {
  const CliRun r = run({"verify", "--which", "3.5", "--theta", "2", "--t", "1"});
  CHECK(r.code == 0);
  const json j = parsed(r);
  CHECK(j["results"]["vacuous"] == true);
  CHECK(check_status(j, "near_kernel_present") == "indeterminate");
}

TEST_CASE("verify 3.6: degree-zero twisted cohomology vanishes on both models") {
  for (const std::string m : {"torus_n2", "kodaira_thurston"}) {
    const CliRun r = run({"verify", "--which", "3.6", "--model", m});
    CAPTURE(m);
    CHECK(r.code == 0);
    const json j = parsed(r);
    CHECK(j["results"]["h00"] == 0);
    CHECK(all_checks_pass(j));
  }
}

TEST_CASE("verify A.1: flat model passes; non-flat model is refused as invalid input") {
  const CliRun ok = run({"verify", "--which", "A.1", "--model", "torus_n2"});
  REQUIRE(ok.code == 0);
  const json j = parsed(ok);
  CHECK(j["results"]["commutator_max"] == 0.0);
  CHECK(all_checks_pass(j));
  for (const auto& row : j["results"]["decomposition"]) CHECK(row["reconstructed"] == true);

  const CliRun kt = run({"verify", "--which", "A.1", "--model", "kodaira_thurston"});
  CHECK(kt.code == 2);
  CHECK(kt.err.find("flat") != std::string::npos);
}

TEST_CASE("verify A.2: per-degree alternating sums vanish") {
  for (const std::string n : {"torus_n2", "torus_n3"}) {
    const CliRun r = run({"verify", "--which", "A.2", "--model", n});
    CAPTURE(n);
    REQUIRE(r.code == 0);
    const json j = parsed(r);
    for (const auto& c : j["results"]["chi_p"]) CHECK(c == 0);
    CHECK(all_checks_pass(j));
  }
}

TEST_CASE("verify A.4: transverse bookkeeping reproduces the bundled surface table") {
  const CliRun r = run({"verify", "--which", "A.4"});
  REQUIRE(r.code == 0);
  CHECK(all_checks_pass(parsed(r)));
}

TEST_CASE("verify index: operator index is constant in t and matches both tables") {
  const CliRun kt = run({"verify", "--which", "index", "--model", "kodaira_thurston", "--theta",
                         "phi_bar_1", "--t", "0,1,5"});
  REQUIRE(kt.code == 0);
  CHECK(all_checks_pass(parsed(kt)));

  const CliRun frac = run({"verify", "--which", "index", "--model", "torus_n2", "--theta",
                           "phi_bar_1", "--t", "0,1/2,5"});
  CHECK(frac.code == 0);
  CHECK(all_checks_pass(parsed(frac)));

  CHECK(run({"verify", "--which", "index", "--model", "torus_n2", "--theta", "phi_bar_1", "--t",
             "1/0"})
            .code == 2);
  CHECK(run({"verify", "--which", "index", "--model", "torus_n2", "--theta", "phi_bar_1", "--t",
             "0.5"})
            .code == 2);
}

TEST_CASE("verify rejects unknown ids and missing required inputs with exit 2") {
  CHECK(run({"verify", "--which", "bogus"}).code == 2);
  CHECK(run({"verify", "--which", "3.3"}).code == 2);           // no theta expression
  CHECK(run({"verify", "--which", "3.6"}).code == 2);           // no model
  CHECK(run({"verify", "--which", "3.3", "--theta", "2+cos", "--cutoff", "0"}).code == 2);
  CHECK(run({"verify", "--which", "3.3", "--theta", "2+cos", "--dzbar", "3"}).code == 2);
}

TEST_CASE("scan: finds the witness, reports both cutoffs, and emits the csv grid") {
  const CliRun r = run({"scan", "--theta", "2+cos", "--t-grid", "0.5,1", "--cutoff", "3"});
  REQUIRE(r.code == 0);
  const json j = parsed(r);
  CHECK(j["results"]["cutoff"] == 3);
  CHECK(j["results"]["refined_cutoff"] == 5);
  CHECK(j["results"]["c1"] == 1.0);
  CHECK(j["results"]["witness_index"] == 0);
  CHECK(j["results"]["witness_t"] == 0.5);
  CHECK(j["results"]["points"].size() == 2);
  for (const auto& pt : j["results"]["points"]) {
    CHECK(pt["stable"] == true);
    CHECK(pt["sigma_min_even"].get<double>() > 1e-6);
    CHECK(pt["sigma_min_odd"].get<double>() > 1e-6);
  }
  CHECK(check_status(j, "nowhere_vanishing_certificate") == "pass");
  CHECK(check_status(j, "kernel_vanishing_witness") == "pass");

  const CliRun c = run({"scan", "--theta", "2+cos", "--t-grid", "0.5,1", "--cutoff", "3",
                        "--format", "csv"});
  REQUIRE(c.code == 0);
  std::istringstream lines(c.out);
  std::string l0, l1, l2, l3;
  std::getline(lines, l0);
  std::getline(lines, l1);
  std::getline(lines, l2);
  std::getline(lines, l3);
  CHECK(l0 == "t,sigma_min_even,sigma_min_odd");
  CHECK(l1.rfind("0.5,", 0) == 0);
  CHECK(l2.rfind("1,", 0) == 0);
  CHECK(l3 == "witness,0.5");
}

TEST_CASE("scan: a twist without a positive lower bound fails the certificate with exit 2") {
  const CliRun r = run({"scan", "--theta", "cos", "--t-grid", "1"});
  CHECK(r.code == 2);
  const json j = parsed(r);
  CHECK(check_status(j, "nowhere_vanishing_certificate") == "fail");
  CHECK(j["results"]["c1"].get<double>() == doctest::Approx(-1.0));
}

TEST_CASE("scan: grammar covers sin, explicit frequencies, exponents, and rejects junk") {
  const CliRun s = run({"scan", "--theta", "2+sin(2*pi*x_1)", "--t-grid", "0.5", "--cutoff", "3"});
  CHECK(s.code == 0);
  CHECK(parsed(s)["results"]["c1"] == 1.0);

  const CliRun k2 = run({"scan", "--theta", "3-cos(2*pi*2*x_1)", "--t-grid", "0.5", "--cutoff",
                         "3"});
  CHECK(k2.code == 0);
  CHECK(parsed(k2)["results"]["c1"] == 2.0);

  const CliRun ex = run({"scan", "--theta", "1e+1+cos", "--t-grid", "0.5", "--cutoff", "3"});
  CHECK(ex.code == 0);
  CHECK(parsed(ex)["results"]["c1"] == 9.0);

  CHECK(run({"scan", "--theta", "2+tan", "--t-grid", "1"}).code == 2);
  CHECK(run({"scan", "--theta", "2+cos(2*pi*x_9)", "--t-grid", "1"}).code == 2);
  CHECK(run({"scan", "--theta", "2+cos(3*pi*x_1)", "--t-grid", "1"}).code == 2);
  CHECK(run({"scan", "--theta", "2+cos", "--t-grid", "1,abc"}).code == 2);
  CHECK(run({"scan", "--theta", "2+cos", "--t-grid", "1", "--cutoff", "0"}).code == 2);
}

TEST_CASE("scan: byte-identical reports under different thread caps") {
  const std::vector<std::string> args = {"scan", "--theta", "2+cos", "--t-grid", "0.5,1",
                                         "--cutoff", "3"};
  setenv("TWISTED_HODGE_THREADS", "1", 1);
  const CliRun one = run(args);
  setenv("TWISTED_HODGE_THREADS", "4", 1);
  const CliRun four = run(args);
  unsetenv("TWISTED_HODGE_THREADS");
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("top level: help prints usage, a missing subcommand is invalid input") {
  const CliRun h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

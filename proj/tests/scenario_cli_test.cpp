#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "iofm/scenario.hpp"
#include "iofm/simrun.hpp"
#include "support.hpp"

using namespace iofm;
using namespace iofm::test;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(IOFM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string temp_dir() {
  static int counter = 0;
  std::string dir = std::filesystem::temp_directory_path() /
                    ("iofm-test-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& body) {
  std::string path = temp_dir() + "/scenario.json";
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string scenarios_dir() { return IOFM_SCENARIO_DIR; }

} // namespace

TEST_CASE("bundled scenarios load and validate") {
  struct Expected {
    const char* file;
    topology::TopologyClass cls;
  } cases[] = {
      {"fig1-mixed.json", topology::TopologyClass::mixed},
      {"integratum-hierarchy.json", topology::TopologyClass::hierarchy},
      {"geant-heterarchy.json", topology::TopologyClass::heterarchy},
  };
  for (const Expected& c : cases) {
    scenario::Scenario sc = scenario::load_scenario(scenarios_dir() + "/" + c.file);
    CHECK(scenario::validate_scenario(sc).empty());
    CHECK(sc.network.topology_class() == c.cls);
    CHECK(sc.seed_present);
  }
}

TEST_CASE("scenario serialization round-trips through the loader") {
  std::mt19937_64 rng(404);
  GeneratedScenario g = gen_localization_scenario(rng);
  std::string path = write_temp(scenario::scenario_to_json(g.sc).dump(2));
  scenario::Scenario back = scenario::load_scenario(path);
  CHECK(scenario::validate_scenario(back).empty());
  // both runs produce identical artifacts
  simrun::SimResult a = simrun::run_scenario(g.sc);
  simrun::SimResult b = simrun::run_scenario(back);
  CHECK(a.registry_json == b.registry_json);
  CHECK(a.trace_lines == b.trace_lines);
  CHECK(a.audit_lines == b.audit_lines);
}

TEST_CASE("cli validate accepts the bundled mixed scenario") {
  CliResult r = run_cli("validate " + scenarios_dir() + "/fig1-mixed.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("valid") != std::string::npos);
}

TEST_CASE("cli validate rejects dangling references with a named violation") {
  scenario::Scenario sc = scenario::load_scenario(scenarios_dir() + "/fig1-mixed.json");
  ojson j = scenario::scenario_to_json(sc);
  j["injections"][0]["component"] = "c-no-such";
  CliResult r = run_cli("validate " + write_temp(j.dump()));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("dangling-reference") != std::string::npos);
  CHECK(r.output.find("c-no-such") != std::string::npos);
}

TEST_CASE("cli validate reports a parse error for an empty file") {
  CliResult r = run_cli("validate " + write_temp(""));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("parse-error") != std::string::npos);
}

TEST_CASE("a missing seed is a validation failure") {
  scenario::Scenario sc = scenario::load_scenario(scenarios_dir() + "/fig1-mixed.json");
  ojson j = scenario::scenario_to_json(sc);
  j.erase("seed");
  CliResult r = run_cli("validate " + write_temp(j.dump()));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("missing-seed") != std::string::npos);
}

TEST_CASE("cli run writes the four artifacts and finds the coalition fault") {
  std::string out = temp_dir();
  CliResult r = run_cli("run " + scenarios_dir() + "/fig1-mixed.json --out " + out);
  REQUIRE(r.exit_code == 0);
  for (const char* f : {"registry.json", "trace.jsonl", "audit.jsonl", "outcomes.json"})
    CHECK(std::filesystem::exists(out + "/" + f));
  ojson outcomes = ojson::parse(slurp(out + "/outcomes.json"));
  bool p4 = false;
  for (const ojson& f : outcomes["faults"])
    if (f["result"] == "isolated" && f["domain"] == "P4" && f["component"] == "c-p4-core")
      p4 = true;
  CHECK(p4);
}

TEST_CASE("cli reruns are byte-identical") {
  std::string a = temp_dir(), b = temp_dir();
  REQUIRE(run_cli("run " + scenarios_dir() + "/fig1-mixed.json --out " + a).exit_code == 0);
  REQUIRE(run_cli("run " + scenarios_dir() + "/fig1-mixed.json --out " + b).exit_code == 0);
  for (const char* f : {"registry.json", "trace.jsonl", "audit.jsonl", "outcomes.json"})
    CHECK(slurp(a + "/" + f) == slurp(b + "/" + f));
}

TEST_CASE("seed overrides change nothing at zero loss") {
  std::string a = temp_dir(), b = temp_dir();
  REQUIRE(run_cli("run " + scenarios_dir() + "/fig1-mixed.json --seed 1 --out " + a).exit_code ==
          0);
  REQUIRE(run_cli("run " + scenarios_dir() + "/fig1-mixed.json --seed 2 --out " + b).exit_code ==
          0);
  ojson fa = ojson::parse(slurp(a + "/outcomes.json"));
  ojson fb = ojson::parse(slurp(b + "/outcomes.json"));
  CHECK(fa["faults"] == fb["faults"]);
}

TEST_CASE("cli report renders trend plot data with the projected breach") {
  // one domain, two alarms per tick over ticks 1..3, threshold 10
  NetBuilder nb;
  nb.domain("D", 6);
  nb.service("svc", "D", DeliveryMode::hierarchical, {}, {}, {"CUST"});
  scenario::Scenario sc = base_scenario(nb.build(), 17, 20);
  sc.gfcm = orgmodel::GfcmPolicy{orgmodel::GfcmMode::root, DomainId{"D"}};
  sc.thresholds.r03_threshold = 10.0;
  int k = 0;
  for (Tick t = 1; t <= 3; ++t)
    for (int i = 0; i < 2; ++i)
      sc.actions.push_back(report_action(
          t, "D", component_symptom("c-D-" + std::to_string(k), "dev-" + std::to_string(k++)),
          std::nullopt));
  sc.actions.push_back(simple_action(
      5, "report-request", ojson{{"requester", "D"}, {"kind", "trend"}, {"from", 1}, {"to", 3}}));

  std::string path = write_temp(scenario::scenario_to_json(sc).dump());
  std::string out = temp_dir();
  REQUIRE(run_cli("run " + path + " --out " + out).exit_code == 0);

  CliResult csv = run_cli("report " + out + " --kind trend --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.output.find("domain,slope,intercept,projectedBreachTick,threshold") !=
        std::string::npos);
  CHECK(csv.output.find("D,2.0,") != std::string::npos);
  CHECK(csv.output.find(",5,") != std::string::npos);
  CHECK(std::filesystem::exists(out + "/report-trend.csv"));

  CliResult js = run_cli("report " + out + " --kind trend --format json");
  CHECK(js.exit_code == 0);
  CHECK(std::filesystem::exists(out + "/report-trend.json"));
}

TEST_CASE("cli report handles runs without SLAs gracefully") {
  NetBuilder nb;
  nb.domain("D");
  nb.service("svc", "D", DeliveryMode::hierarchical, {}, {}, {"CUST"});
  scenario::Scenario sc = base_scenario(nb.build(), 29, 10);
  sc.gfcm = orgmodel::GfcmPolicy{orgmodel::GfcmMode::root, DomainId{"D"}};
  std::string path = write_temp(scenario::scenario_to_json(sc).dump());
  std::string out = temp_dir();
  REQUIRE(run_cli("run " + path + " --out " + out).exit_code == 0);
  CliResult r = run_cli("report " + out + " --kind qos --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("service,metric,measured,bound,violated") != std::string::npos);
}

TEST_CASE("cli report marks statistics from a partially silent run as incomplete") {
  NetBuilder nb;
  for (int i = 0; i < 3; ++i) nb.domain("D" + std::to_string(i));
  nb.part("s0", "D0", {nb.comp("D0", 0)});
  nb.part("s1", "D1", {nb.comp("D1", 0)});
  nb.service("chain", "D0", DeliveryMode::heterarchical, {"s0", "s1"}, {}, {"X"});
  scenario::Scenario sc = base_scenario(nb.build(), 31, 60);
  sc.gfcm = orgmodel::GfcmPolicy{orgmodel::GfcmMode::per_fault, std::nullopt};
  for (int i = 1; i < 3; ++i)
    sc.grants.push_back({"D0", "D" + std::to_string(i), orgmodel::Capability::report_data});
  simnet::LinkParams lost{1, 1.0, 0.0};
  sc.link_overrides.emplace_back("D0", "D2", lost);
  sc.link_overrides.emplace_back("D2", "D0", lost);
  sc.actions.push_back(simple_action(
      20, "report-request",
      ojson{{"requester", "D0"}, {"kind", "statistics"}, {"from", 0}, {"to", 19}}));

  std::string path = write_temp(scenario::scenario_to_json(sc).dump());
  std::string out = temp_dir();
  REQUIRE(run_cli("run " + path + " --out " + out).exit_code == 0);
  CliResult r = run_cli("report " + out + " --kind statistics --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find(",true\n") != std::string::npos);  // incomplete column
  CHECK(r.output.find("D2,") != std::string::npos);      // the silent domain still has a row
}

TEST_CASE("cli matrix prints the per-class capability columns") {
  CliResult mixed = run_cli("matrix " + scenarios_dir() + "/fig1-mixed.json");
  CHECK(mixed.exit_code == 0);
  CHECK(mixed.output.find("topology class: mixed") != std::string::npos);
  CHECK(mixed.output.find("L02  supported") != std::string::npos);

  CliResult hier = run_cli("matrix " + scenarios_dir() + "/integratum-hierarchy.json");
  CHECK(hier.output.find("topology class: hierarchy") != std::string::npos);
  CHECK(hier.output.find("L02  not supported") != std::string::npos);
  CHECK(hier.output.find("M02  not supported") != std::string::npos);
  CHECK(hier.output.find("F01  not supported") != std::string::npos);
  CHECK(hier.output.find("F02  not supported") != std::string::npos);
  CHECK(hier.output.find("L03  supported") != std::string::npos);

  CliResult het = run_cli("matrix " + scenarios_dir() + "/geant-heterarchy.json");
  CHECK(het.output.find("topology class: heterarchy") != std::string::npos);
  CHECK(het.output.find("L03  not supported") != std::string::npos);
  CHECK(het.output.find("L02  supported") != std::string::npos);
}

TEST_CASE("cli matrix confirms full coverage after the mixed full-suite run") {
  std::string out = temp_dir();
  REQUIRE(run_cli("run " + scenarios_dir() + "/fig1-mixed.json --out " + out).exit_code == 0);
  CliResult r = run_cli("matrix " + scenarios_dir() + "/fig1-mixed.json --results " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("matrix covered (0 unexpected cells)") != std::string::npos);
}

TEST_CASE("a run without injections covers no isolation-phase cells") {
  scenario::Scenario sc = scenario::load_scenario(scenarios_dir() + "/fig1-mixed.json");
  ojson j = scenario::scenario_to_json(sc);
  j["injections"] = ojson::array();
  j["actions"] = ojson::array();
  std::string path = write_temp(j.dump());
  std::string out = temp_dir();
  REQUIRE(run_cli("run " + path + " --out " + out).exit_code == 0);
  ojson outcomes = ojson::parse(slurp(out + "/outcomes.json"));
  CHECK(outcomes["coverage"].empty());
  CliResult r = run_cli("matrix " + path + " --results " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Isolation[x]") == std::string::npos);
}

TEST_CASE("unwritable output directories are runtime errors") {
  CliResult r = run_cli("run " + scenarios_dir() + "/fig1-mixed.json --out /proc/iofm-nope");
  CHECK(r.exit_code == 2);
}

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "iofm/engine.hpp"
#include "iofm/scenario.hpp"

namespace iofm::simrun {

// Everything a run produces. The serialized artifacts are byte-deterministic
// functions of (scenario, seed): registry.json, trace.jsonl, audit.jsonl and
// outcomes.json.
struct SimResult {
  std::string registry_json;
  std::vector<std::string> trace_lines;
  std::vector<std::string> audit_lines;
  std::string outcomes_json;

  std::map<FaultId, engine::LocalizationOutcome> outcomes;
  std::vector<engine::UseCaseExecution> use_case_log;
  std::set<std::pair<std::string, std::string>> coverage;
  simnet::TransportCounters counters;
  double wall_ms{0};
};

// Validates the scenario (throwing Errc::validation_failed before any event
// executes) and runs it to the horizon.
SimResult run_scenario(const scenario::Scenario& sc);

// A run loop that keeps the engine alive for inspection after the run.
struct LiveRun {
  std::unique_ptr<simnet::SimNet> sim;
  std::unique_ptr<engine::Engine> engine;
  SimResult result;
};

LiveRun run_scenario_live(const scenario::Scenario& sc);

void write_result(const SimResult& r, const std::string& dir);

std::vector<engine::AuditEvent> parse_audit_lines(const std::vector<std::string>& lines);

} // namespace iofm::simrun

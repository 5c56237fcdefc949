#pragma once

#include <map>
#include <string>
#include <vector>

#include "iofm/adapter.hpp"
#include "iofm/orgmodel.hpp"
#include "iofm/protocol.hpp"
#include "iofm/simnet.hpp"
#include "iofm/topology.hpp"

namespace iofm::scenario {

struct ScenarioAction {
  Tick tick{0};
  std::string type;
  ojson params;
};

struct MaintenanceTask {
  DomainId domain;
  ComponentId component;
  Tick start{0};
  Tick duration{0};
  std::string note;
};

struct KnownErrorSeed {
  DomainId domain; // whose known-error database holds the entry
  faultmodel::Symptom symptom;
  DomainId cause_domain;
  ComponentId cause_component;
};

struct Thresholds {
  Tick t_isolate{50};
  Tick dedup_window{10};
  Tick monitor_timeout{8};
  Tick repair_ticks{10};
  Tick max_age{20};
  double r03_threshold{100.0};
};

// Declarative simulation input: one JSON document describing the topology,
// role and access policy, adapters, link model, injected events, scripted
// actions, SLAs and thresholds. The seed is mandatory so that a run is a
// pure function of the file.
struct Scenario {
  std::string name;
  std::uint64_t seed{0};
  bool seed_present{false};
  Tick horizon{0};
  bool auto_detect{false};

  topology::ProviderNetwork network;

  orgmodel::GfcmPolicy gfcm;
  std::vector<orgmodel::Grant> grants;

  std::vector<faultmodel::DomainFormatAdapter> adapters;

  simnet::LinkParams link_defaults;
  std::vector<std::tuple<DomainId, DomainId, simnet::LinkParams>> link_overrides;

  std::vector<simnet::Injection> injections;
  std::vector<ScenarioAction> actions;
  std::vector<protocol::Subscription> subscriptions;
  std::vector<MaintenanceTask> maintenance;
  std::vector<KnownErrorSeed> known_errors;
  std::map<ServiceId, faultmodel::SlaSpec> slas;

  Thresholds thresholds;
};

Scenario scenario_from_json(const ojson& j);
Scenario load_scenario(const std::string& path); // throws Errc::parse_error / io_error
ojson scenario_to_json(const Scenario& s);

// Full cross-reference validation: topology invariants, policy sanity,
// injections/actions/slas/known-errors referencing existing entities,
// positive horizon, mandatory seed.
topology::ValidationReport validate_scenario(const Scenario& s);

simnet::LinkModel make_link_model(const Scenario& s);

} // namespace iofm::scenario

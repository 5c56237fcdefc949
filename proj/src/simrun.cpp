#include "iofm/simrun.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "iofm/log.hpp"

namespace iofm::simrun {

using engine::Engine;
using scenario::Scenario;
using scenario::ScenarioAction;

namespace {

FaultId resolve_fault(const Engine& eng, const ojson& params) {
  if (params.contains("faultId")) return params["faultId"].get<std::string>();
  if (params.contains("faultRef")) {
    const ojson& ref = params["faultRef"];
    std::optional<FaultId> f;
    if (ref.contains("service")) f = eng.find_fault_by_service(ref["service"].get<std::string>());
    else if (ref.contains("origin")) f = eng.find_fault_by_origin(ref["origin"].get<std::string>());
    if (f) return *f;
  }
  raise(Errc::invalid_reference, "action resolves no fault");
}

faultmodel::LocalDocument document_from_json(const ojson& j) {
  faultmodel::LocalDocument doc;
  for (const auto& [key, value] : j.items())
    doc[key] = value.is_string() ? value.get<std::string>() : value.dump();
  return doc;
}

void execute_action(Engine& eng, const ScenarioAction& a, Tick tick) {
  const ojson& p = a.params;
  try {
    if (a.type == "report") {
      std::optional<ServiceId> suspected;
      if (p.contains("suspectedService"))
        suspected = p["suspectedService"].get<std::string>();
      orgmodel::RoleKind reporter =
          orgmodel::role_from_name(p.value("reporter", std::string{"DFM"}));
      eng.report_alarm(p.at("domain").get<std::string>(),
                       faultmodel::symptom_from_json(p.at("symptom")), suspected, reporter, tick);
    } else if (a.type == "customer-report") {
      eng.open_fault_report(p.at("customer").get<std::string>(),
                            p.at("service").get<std::string>(),
                            faultmodel::symptom_from_json(p.at("symptom")), tick);
    } else if (a.type == "local-report") {
      eng.report_local_document(p.at("domain").get<std::string>(),
                                p.at("format").get<std::string>(),
                                document_from_json(p.at("document")), tick);
    } else if (a.type == "localize-specific") {
      eng.localize_specific_domain(resolve_fault(eng, p), p.at("target").get<std::string>(), tick);
    } else if (a.type == "progress-query") {
      std::optional<DomainId> target;
      if (p.contains("target") && p["target"] != "all")
        target = p["target"].get<std::string>();
      eng.progress_query(p.at("requester").get<std::string>(),
                         p.value("scope", std::string{"resolution"}), target, tick);
    } else if (a.type == "monitor") {
      const std::string requester = p.at("requester").get<std::string>();
      const std::string scope = p.value("scope", std::string{"overall"});
      if (scope == "overall")
        eng.monitor_overall(requester, tick);
      else if (scope == "domain")
        eng.monitor_domain(requester, p.at("domain").get<std::string>(), tick);
      else if (scope == "service")
        eng.monitor_service(requester, p.at("service").get<std::string>(), tick);
      else
        raise(Errc::misuse, "unknown monitor scope '" + scope + "'");
    } else if (a.type == "report-request") {
      const std::string requester = p.at("requester").get<std::string>();
      const std::string kind = p.at("kind").get<std::string>();
      Tick from = p.value("from", Tick{0});
      Tick to = p.value("to", tick);
      if (kind == "statistics")
        eng.report_statistics(requester, from, to, tick);
      else if (kind == "qos")
        eng.report_qos(requester, tick);
      else if (kind == "trend")
        eng.report_trend(requester, from, to, tick);
      else
        raise(Errc::misuse, "unknown report kind '" + kind + "'");
    } else if (a.type == "fp-check") {
      eng.false_positive_check(p.at("requester").get<std::string>(), resolve_fault(eng, p), tick);
    } else if (a.type == "fp-remove") {
      eng.false_positive_remove(p.at("actor").get<std::string>(), resolve_fault(eng, p), tick);
    } else if (a.type == "data-change") {
      eng.request_data_change(p.at("actor").get<std::string>(), resolve_fault(eng, p),
                              engine::patch_from_json(p.at("patch")), tick);
    } else if (a.type == "export") {
      eng.export_plot_data(tick);
    } else if (a.type == "subscribe") {
      eng.subscribe(p.at("subscriber").get<std::string>(), p.at("publisher").get<std::string>(),
                    p.at("topic").get<std::string>(), tick);
    } else {
      raise(Errc::misuse, "unknown action type '" + a.type + "'");
    }
  } catch (const Error& e) {
    eng.record_rejection(a.type, tick, errc_name(e.code()), ojson{{"what", e.what()}});
  }
}

ojson outcomes_to_json(const Scenario& sc, const Engine& eng,
                       const simnet::TransportCounters& counters,
                       const std::map<DomainId, std::uint64_t>& sent_by_domain) {
  ojson j;
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["horizon"] = sc.horizon;

  ojson cj;
  cj["sent"] = counters.sent;
  cj["delivered"] = counters.delivered;
  cj["dropped"] = counters.dropped;
  cj["corrupted"] = counters.corrupted;
  j["counters"] = std::move(cj);

  ojson sent = ojson::object();
  for (const auto& [d, n] : sent_by_domain) sent[d] = n;
  j["sentByDomain"] = std::move(sent);

  ojson faults = ojson::array();
  for (const auto& [fid, out] : eng.outcomes()) {
    ojson f;
    f["faultId"] = fid;
    f["result"] = engine::outcome_result_name(out.result);
    if (out.result == engine::LocalizationOutcome::Result::isolated) {
      f["domain"] = out.domain;
      f["component"] = out.component;
    }
    f["elapsedTicks"] = out.elapsed_ticks;
    f["messageCount"] = out.message_count;
    const faultmodel::FaultRecord* rec = eng.registry().find(fid);
    if (rec != nullptr) {
      f["state"] = faultmodel::state_name(rec->state);
      f["isFalsePositive"] = faultmodel::fp_mark_name(rec->false_positive);
    }
    faults.push_back(std::move(f));
  }
  j["faults"] = std::move(faults);

  ojson ucs = ojson::array();
  for (const engine::UseCaseExecution& e : eng.use_case_log()) {
    ojson u;
    u["useCase"] = e.use_case;
    u["tick"] = e.tick;
    u["status"] = e.status;
    u["detail"] = e.detail;
    ucs.push_back(std::move(u));
  }
  j["useCases"] = std::move(ucs);

  ojson cov = ojson::array();
  for (const auto& [uc, phase] : eng.observed_coverage()) {
    ojson c;
    c["useCase"] = uc;
    c["phase"] = phase;
    cov.push_back(std::move(c));
  }
  j["coverage"] = std::move(cov);

  j["plotData"] = eng.plot_data();
  return j;
}

} // namespace

LiveRun run_scenario_live(const Scenario& sc) {
  topology::ValidationReport violations = scenario::validate_scenario(sc);
  if (!violations.empty()) {
    std::string what = "scenario invalid:";
    for (const topology::Violation& v : violations) what += " [" + v.code + "] " + v.detail + ";";
    raise(Errc::validation_failed, what);
  }

  auto t0 = std::chrono::steady_clock::now();

  simnet::InjectionRegistry injections;
  for (const simnet::Injection& i : sc.injections) injections.add(i);

  LiveRun run;
  run.sim = std::make_unique<simnet::SimNet>(sc.network, scenario::make_link_model(sc),
                                             std::move(injections));
  run.sim->schedule_injections();
  run.engine = std::make_unique<Engine>(sc, *run.sim);

  std::map<Tick, std::vector<const ScenarioAction*>> actions_by_tick;
  for (const ScenarioAction& a : sc.actions) actions_by_tick[a.tick].push_back(&a);
  for (const auto& [tick, list] : actions_by_tick)
    run.sim->schedule_timer(tick, simnet::TimerToken{"driver", std::to_string(tick), ""});

  simnet::SimNet& sim = *run.sim;
  Engine& eng = *run.engine;
  while (sim.pending() && sim.next_tick() <= sc.horizon) {
    simnet::SimEvent ev = sim.step();
    switch (ev.kind) {
      case simnet::SimEventKind::deliver:
        if (ev.outcome == simnet::DeliveryOutcome::delivered)
          eng.on_deliver(*ev.envelope, ev.tick);
        else if (ev.outcome == simnet::DeliveryOutcome::corrupted)
          eng.on_corrupted(*ev.envelope, ev.tick);
        break;
      case simnet::SimEventKind::inject_fault:
        eng.on_injected_fault(ev.component, ev.tick);
        break;
      case simnet::SimEventKind::inject_false_alarm:
        eng.on_injected_false_alarm(ev.domain, *ev.symptom, ev.tick);
        break;
      case simnet::SimEventKind::repair:
        eng.on_component_repaired(ev.component, ev.tick);
        break;
      case simnet::SimEventKind::timer:
        if (ev.token.kind == "driver") {
          auto it = actions_by_tick.find(ev.tick);
          if (it != actions_by_tick.end())
            for (const ScenarioAction* a : it->second) execute_action(eng, *a, ev.tick);
        } else {
          eng.on_timer(ev.token, ev.tick);
        }
        break;
    }
  }
  eng.finalize(sc.horizon);

  std::map<DomainId, std::uint64_t> sent_by_domain;
  for (const topology::Domain& d : sc.network.domains()) {
    std::uint64_t n = sim.sent_by(d.id);
    if (n > 0) sent_by_domain[d.id] = n;
  }

  run.result.registry_json = eng.registry().canonical_json();
  run.result.trace_lines = sim.trace_lines();
  for (const engine::AuditEvent& e : eng.registry().audit())
    run.result.audit_lines.push_back(engine::audit_event_to_json(e).dump());
  run.result.outcomes_json = outcomes_to_json(sc, eng, sim.counters(), sent_by_domain).dump();
  run.result.outcomes = eng.outcomes();
  run.result.use_case_log = eng.use_case_log();
  run.result.coverage = eng.observed_coverage();
  run.result.counters = sim.counters();
  run.result.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return run;
}

SimResult run_scenario(const Scenario& sc) { return run_scenario_live(sc).result; }

void write_result(const SimResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(Errc::io_error, "cannot create output directory '" + dir + "'");

  auto write_file = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write '" + dir + "/" + name + "'");
    out << body;
  };
  auto write_lines = [&](const std::string& name, const std::vector<std::string>& lines) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write '" + dir + "/" + name + "'");
    for (const std::string& line : lines) out << line << '\n';
  };
  write_file("registry.json", r.registry_json);
  write_lines("trace.jsonl", r.trace_lines);
  write_lines("audit.jsonl", r.audit_lines);
  write_file("outcomes.json", r.outcomes_json);
  log::info("results written to " + dir);
}

std::vector<engine::AuditEvent> parse_audit_lines(const std::vector<std::string>& lines) {
  std::vector<engine::AuditEvent> out;
  for (const std::string& line : lines) {
    if (line.empty()) continue;
    out.push_back(engine::audit_event_from_json(ojson::parse(line)));
  }
  return out;
}

} // namespace iofm::simrun

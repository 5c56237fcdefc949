#include "iofm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace iofm::engine {

using faultmodel::FalsePositiveMark;
using faultmodel::FaultRecord;
using faultmodel::LifecyclePhase;
using faultmodel::LifecycleState;
using faultmodel::Symptom;
using orgmodel::Capability;
using orgmodel::RoleBinding;
using orgmodel::RoleKind;
using protocol::Envelope;
using protocol::MessageKind;

const char* use_case_name(UseCase u) {
  switch (u) {
    case UseCase::L01: return "L01";
    case UseCase::L02: return "L02";
    case UseCase::L03: return "L03";
    case UseCase::P01: return "P01";
    case UseCase::P02: return "P02";
    case UseCase::M01: return "M01";
    case UseCase::M02: return "M02";
    case UseCase::M03: return "M03";
    case UseCase::R01: return "R01";
    case UseCase::R02: return "R02";
    case UseCase::R03: return "R03";
    case UseCase::F01: return "F01";
    case UseCase::F02: return "F02";
  }
  return "?";
}

UseCase use_case_from_name(const std::string& name) {
  for (UseCase u : all_use_cases())
    if (name == use_case_name(u)) return u;
  raise(Errc::parse_error, "unknown use case '" + name + "'");
}

CapabilityMatrix capability_matrix(const topology::ProviderNetwork& net) {
  CapabilityMatrix m;
  m.topo_class = net.topology_class();
  for (UseCase u : all_use_cases()) m.supported[u] = true;
  switch (m.topo_class) {
    case topology::TopologyClass::hierarchy:
      m.supported[UseCase::L02] = false;
      m.supported[UseCase::M02] = false;
      m.supported[UseCase::F01] = false;
      m.supported[UseCase::F02] = false;
      break;
    case topology::TopologyClass::heterarchy:
      m.supported[UseCase::L03] = false;
      break;
    case topology::TopologyClass::mixed:
      break;
  }
  return m;
}

const std::vector<std::pair<std::string, std::vector<LifecyclePhase>>>& phase_rows() {
  using P = LifecyclePhase;
  static const std::vector<std::pair<std::string, std::vector<P>>> rows = {
      {"L01", {P::Detection, P::Isolation}},
      {"L02", {P::Detection, P::ForecastPrevention}},
      {"L03", {P::Detection, P::Isolation}},
      {"P01", {P::Repair}},
      {"P02", {P::Repair}},
      {"M01", {P::Detection, P::Isolation, P::Repair, P::ForecastPrevention}},
      {"M02", {P::Detection, P::Isolation, P::Repair, P::ForecastPrevention}},
      {"M03", {P::Detection, P::Isolation, P::Repair, P::ForecastPrevention}},
      {"R01", {P::Detection, P::ForecastPrevention}},
      {"R02", {P::Detection, P::ForecastPrevention}},
      {"R03", {P::ForecastPrevention}},
      {"F01", {P::Isolation, P::ForecastPrevention}},
      {"F02", {P::Repair, P::ForecastPrevention}},
      {"FM-01", {P::Detection, P::Isolation, P::ForecastPrevention}},
      {"FM-02", {P::Isolation, P::Repair, P::ForecastPrevention}},
  };
  return rows;
}

const char* outcome_result_name(LocalizationOutcome::Result r) {
  switch (r) {
    case LocalizationOutcome::Result::pending: return "pending";
    case LocalizationOutcome::Result::isolated: return "isolated";
    case LocalizationOutcome::Result::escalated: return "escalated";
    case LocalizationOutcome::Result::false_positive: return "false-positive";
  }
  return "?";
}

LinearFit linear_fit(std::span<const std::pair<double, double>> points) {
  LinearFit fit;
  const double n = static_cast<double>(points.size());
  if (points.empty()) return fit;
  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) {
    fit.slope = 0.0;
    fit.intercept = sy / n;
    return fit;
  }
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

// ---------------------------------------------------------------------------
// view / report serialization helpers (payload bodies and outcomes.json)
// ---------------------------------------------------------------------------

namespace {

ojson progress_entry_to_json(const ProgressEntry& e) {
  ojson j;
  j["domain"] = e.domain;
  j["responded"] = e.responded;
  j["denied"] = e.denied;
  j["asOf"] = e.as_of;
  j["stale"] = e.stale;
  ojson items = ojson::array();
  for (const ProgressItem& it : e.items) {
    ojson i;
    i["faultId"] = it.fault_id;
    i["state"] = faultmodel::state_name(it.state);
    i["lastTick"] = it.last_tick;
    items.push_back(std::move(i));
  }
  j["items"] = std::move(items);
  ojson maint = ojson::array();
  for (const MaintenanceStatus& m : e.maintenance) {
    ojson i;
    i["component"] = m.component;
    i["start"] = m.start;
    i["duration"] = m.duration;
    i["status"] = m.status;
    maint.push_back(std::move(i));
  }
  j["maintenance"] = std::move(maint);
  return j;
}

ProgressEntry progress_entry_from_json(const ojson& j) {
  ProgressEntry e;
  e.domain = j.at("domain").get<std::string>();
  e.responded = j.value("responded", false);
  e.denied = j.value("denied", false);
  e.as_of = j.value("asOf", Tick{0});
  e.stale = j.value("stale", false);
  for (const ojson& i : j.at("items"))
    e.items.push_back(ProgressItem{i.at("faultId").get<std::string>(),
                                   faultmodel::state_from_name(i.at("state").get<std::string>()),
                                   i.at("lastTick").get<Tick>()});
  for (const ojson& m : j.at("maintenance"))
    e.maintenance.push_back(MaintenanceStatus{m.at("component").get<std::string>(),
                                              m.at("start").get<Tick>(), m.at("duration").get<Tick>(),
                                              m.at("status").get<std::string>()});
  return e;
}

ojson stat_row_to_json(const StatisticsRow& r) {
  ojson j;
  j["domain"] = r.domain;
  j["faultCount"] = r.fault_count;
  j["meanTimeToIsolate"] = r.mean_tt_isolate ? ojson(*r.mean_tt_isolate) : ojson(nullptr);
  j["meanTimeToRepair"] = r.mean_tt_repair ? ojson(*r.mean_tt_repair) : ojson(nullptr);
  j["messagesSent"] = r.messages_sent;
  j["responded"] = r.responded;
  return j;
}

StatisticsRow stat_row_from_json(const ojson& j) {
  StatisticsRow r;
  r.domain = j.at("domain").get<std::string>();
  r.fault_count = j.at("faultCount").get<std::uint64_t>();
  if (!j.at("meanTimeToIsolate").is_null()) r.mean_tt_isolate = j["meanTimeToIsolate"].get<double>();
  if (!j.at("meanTimeToRepair").is_null()) r.mean_tt_repair = j["meanTimeToRepair"].get<double>();
  r.messages_sent = j.at("messagesSent").get<std::uint64_t>();
  r.responded = j.value("responded", true);
  return r;
}

std::string pad_id(const char* prefix, std::uint64_t n) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%s%04llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

} // namespace

ojson statistics_to_json(const StatisticsReport& r) {
  ojson j;
  j["from"] = r.from;
  j["to"] = r.to;
  j["incomplete"] = r.incomplete;
  ojson rows = ojson::array();
  for (const StatisticsRow& row : r.rows) rows.push_back(stat_row_to_json(row));
  j["rows"] = std::move(rows);
  return j;
}

ojson qos_to_json(const QosReport& r) {
  ojson j;
  j["at"] = r.at;
  ojson rows = ojson::array();
  for (const QosRow& row : r.rows) {
    ojson x;
    x["service"] = row.service;
    x["metric"] = row.metric;
    x["measured"] = row.measured;
    x["bound"] = row.bound;
    x["violated"] = row.violated;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

ojson trend_to_json(const TrendReport& r) {
  ojson j;
  j["from"] = r.from;
  j["to"] = r.to;
  j["threshold"] = r.threshold;
  ojson rows = ojson::array();
  for (const TrendRow& row : r.rows) {
    ojson x;
    x["domain"] = row.domain;
    x["slope"] = row.slope;
    x["intercept"] = row.intercept;
    x["projectedBreachTick"] = row.breach_tick ? ojson(*row.breach_tick) : ojson(nullptr);
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(const scenario::Scenario& sc, simnet::SimHost& host)
    : sc_(sc),
      net_(sc.network),
      host_(host),
      cfg_(sc.thresholds),
      policy_(sc.grants),
      gfcm_policy_(sc.gfcm),
      caps_(capability_matrix(sc.network)) {
  roles_.staff(net_);
  if (gfcm_policy_.mode == orgmodel::GfcmMode::root)
    roles_.preset_root(orgmodel::RoleTable::resolve_root(net_, gfcm_policy_));
  for (const scenario::KnownErrorSeed& ke : sc.known_errors)
    known_errors_[ke.domain][ke.symptom.signature()] = {ke.cause_domain, ke.cause_component};
  for (const protocol::Subscription& s : sc.subscriptions) subs_.add(s);
  plot_data_ = ojson(nullptr);
}

const FaultRecord& Engine::must_record(const FaultId& fault) const {
  const FaultRecord* rec = registry_.find(fault);
  if (rec == nullptr) raise(Errc::invalid_reference, "unknown fault '" + fault + "'");
  return *rec;
}

void Engine::tag_phase(const std::string& row, LifecyclePhase phase, Tick tick) {
  ojson data;
  data["useCase"] = row;
  data["phase"] = faultmodel::phase_name(phase);
  registry_.note("usecase-phase", tick, std::move(data));
}

void Engine::tag_row(const std::string& row, Tick tick) {
  for (const auto& [name, phases] : phase_rows()) {
    if (name != row) continue;
    for (LifecyclePhase p : phases) tag_phase(row, p, tick);
    return;
  }
}

void Engine::log_use_case(const std::string& uc, Tick tick, const std::string& status,
                          ojson detail) {
  use_case_log_.push_back(UseCaseExecution{uc, tick, status, std::move(detail)});
}

void Engine::require_capability(UseCase uc) const {
  if (!caps_.supported.at(uc))
    raise(Errc::capability_unsupported,
          std::string(use_case_name(uc)) + " is not supported on a " +
              topology::topology_class_name(caps_.topo_class) + " topology");
}

void Engine::require_report_access(const DomainId& requester,
                                   const std::set<DomainId>& targets) const {
  if (roles_.holds_gfcm(requester)) return;
  for (const DomainId& t : targets) {
    if (t == requester) continue;
    if (!policy_.has_grant(requester, t, Capability::report_data))
      raise(Errc::access_denied,
            "'" + requester + "' lacks report-data access to '" + t + "'");
  }
}

RoleBinding Engine::gfcm_binding(const FaultId& fault, Tick tick) const {
  std::optional<DomainId> gd = roles_.gfcm_domain(fault);
  if (!gd) raise(Errc::routing_error, "no acting GFCM for fault '" + fault + "'");
  RoleBinding b;
  b.role = RoleKind::GFCM;
  b.domain = *gd;
  b.since = tick;
  if (gfcm_policy_.mode == orgmodel::GfcmMode::per_fault) b.scope = fault;
  return b;
}

void Engine::count_fault_message(const ojson& payload) {
  std::string fid;
  if (payload.contains("faultId"))
    fid = payload["faultId"].get<std::string>();
  else if (payload.contains("event") && payload["event"].is_object() &&
           payload["event"].contains("faultId"))
    fid = payload["event"]["faultId"].get<std::string>();
  if (fid.empty()) return;
  auto it = outcomes_.find(fid);
  if (it != outcomes_.end() && it->second.result == LocalizationOutcome::Result::pending)
    it->second.message_count++;
}

MsgId Engine::send_envelope(MessageKind kind, const DomainId& sender, const DomainId& receiver,
                            ojson payload, Tick tick, std::optional<MsgId> correlation) {
  if (net_.find_domain(receiver) == nullptr)
    raise(Errc::routing_error, "unknown receiver domain '" + receiver + "'");
  MsgId id = pad_id("M-", ++msg_seq_);
  count_fault_message(payload);
  Envelope env = protocol::make_envelope(id, sender, receiver, tick, kind, std::move(payload),
                                         std::move(correlation));
  sent_by_domain_[sender]++;
  host_.send(std::move(env));
  return id;
}

void Engine::publish_fault_status(const FaultRecord& record, Tick tick) {
  std::vector<DomainId> subscribers = subs_.subscribers(record.origin_domain, "fault-status");
  if (subscribers.empty()) return;
  ojson event;
  event["faultId"] = record.fault_id;
  event["state"] = faultmodel::state_name(record.state);
  for (const DomainId& sub : subscribers) {
    if (sub == record.origin_domain) continue;
    ojson payload;
    payload["topic"] = "fault-status";
    payload["event"] = event;
    payload["asOf"] = tick;
    send_envelope(MessageKind::Notify, record.origin_domain, sub, std::move(payload), tick);
  }
}

void Engine::transition_record(const FaultId& fault, LifecycleState to, const RoleBinding& actor,
                               Tick tick) {
  registry_.apply_transition(fault, to, actor, tick);
  publish_fault_status(*registry_.find(fault), tick);
}

// ---------------------------------------------------------------------------
// detection entry points
// ---------------------------------------------------------------------------

FaultId Engine::open_or_attach(const DomainId& origin, RoleKind reporter,
                               std::optional<ServiceId> suspected, const Symptom& symptom,
                               Tick tick, const std::string& via) {
  const std::string key = suspected.value_or("") + "|" + symptom.signature();
  auto it = dedup_index_.find(key);
  if (it != dedup_index_.end()) {
    const FaultRecord* existing = registry_.find(it->second);
    if (existing != nullptr && existing->state != LifecycleState::Closed &&
        tick - existing->created_at <= cfg_.dedup_window) {
      RoleBinding actor{reporter, origin, std::nullopt, tick};
      registry_.apply_annotation(it->second, "duplicate-report via " + via, actor, tick);
      return it->second;
    }
  }

  FaultId id = pad_id("F-", ++fault_seq_);
  FaultRecord rec = faultmodel::open_record(id, origin, reporter, std::move(suspected), {symptom},
                                            tick);
  registry_.open(rec, tick);
  dedup_index_[key] = id;
  LocalizationOutcome out;
  out.fault_id = id;
  outcomes_[id] = out;
  publish_fault_status(rec, tick);
  start_l01(id, tick);
  return id;
}

FaultId Engine::open_fault_report(const CustomerId& customer, const ServiceId& service,
                                  const Symptom& symptom, Tick tick) {
  const topology::Service* svc = net_.find_service(service);
  if (svc == nullptr) raise(Errc::invalid_reference, "unknown service '" + service + "'");
  if (!net_.customer_uses(customer, service))
    raise(Errc::invalid_reference,
          "customer '" + customer + "' does not use service '" + service + "'");
  return open_or_attach(svc->owner, RoleKind::User, service, symptom, tick,
                        "customer:" + customer);
}

FaultId Engine::report_alarm(const DomainId& domain, const Symptom& symptom,
                             std::optional<ServiceId> suspected, RoleKind reporter, Tick tick) {
  if (net_.find_domain(domain) == nullptr)
    raise(Errc::invalid_reference, "unknown domain '" + domain + "'");
  if (suspected && net_.find_service(*suspected) == nullptr)
    raise(Errc::invalid_reference, "unknown service '" + *suspected + "'");
  return open_or_attach(domain, reporter, std::move(suspected), symptom, tick, "alarm");
}

FaultId Engine::report_local_document(const DomainId& domain, const std::string& format_id,
                                      const faultmodel::LocalDocument& doc, Tick tick) {
  const faultmodel::DomainFormatAdapter* adapter = find_adapter(format_id);
  if (adapter == nullptr)
    raise(Errc::invalid_reference, "no adapter for format '" + format_id + "'");
  faultmodel::InboundResult in = faultmodel::convert_inbound(*adapter, doc);
  ojson prov;
  prov["faultId"] = in.record.fault_id;
  prov["format"] = in.source_format;
  prov["domain"] = domain;
  registry_.note("inbound-conversion", tick, std::move(prov));
  if (in.record.symptoms.empty())
    raise(Errc::conversion_error, "local document carries no symptom");
  return open_or_attach(domain, in.record.reporter_role, in.record.suspected_service,
                        in.record.symptoms.front(), tick, "format:" + format_id);
}

const faultmodel::DomainFormatAdapter* Engine::find_adapter(const std::string& format_id) const {
  for (const faultmodel::DomainFormatAdapter& a : sc_.adapters)
    if (a.format_id == format_id) return &a;
  return nullptr;
}

// ---------------------------------------------------------------------------
// localization
// ---------------------------------------------------------------------------

std::optional<ComponentId> Engine::dfo_search(const DomainId& domain, const FaultRecord& record,
                                              Tick tick) {
  const topology::Domain* dom = net_.find_domain(domain);
  if (dom == nullptr) raise(Errc::invalid_reference, "unknown domain '" + domain + "'");

  std::set<ComponentId> owned(dom->components.begin(), dom->components.end());
  std::set<ComponentId> candidates;
  auto scan_service = [&](const ServiceId& sid) {
    const topology::Service* svc = net_.find_service(sid);
    if (svc == nullptr) return;
    for (const ComponentId& c : net_.closure_components(sid))
      if (owned.count(c) && host_.component_down(c)) candidates.insert(c);
  };
  for (const Symptom& s : record.symptoms) {
    if (s.scope == faultmodel::SymptomScope::component) {
      if (owned.count(s.target) && host_.component_down(s.target)) candidates.insert(s.target);
    } else {
      scan_service(s.target);
    }
  }
  if (candidates.empty() && record.suspected_service) scan_service(*record.suspected_service);

  ojson note;
  note["faultId"] = record.fault_id;
  note["domain"] = domain;
  note["candidates"] = candidates.size();
  registry_.note("dfo-search", tick, std::move(note));

  if (candidates.empty()) return std::nullopt;
  return *candidates.begin();
}

void Engine::start_l01(const FaultId& fault, Tick tick) {
  const FaultRecord& rec = must_record(fault);
  const DomainId origin = rec.origin_domain;
  RoleBinding dfm = roles_.dfm(origin);

  tag_phase("L01", LifecyclePhase::Detection, tick);
  log_use_case("L01", tick, "started", ojson{{"faultId", fault}, {"domain", origin}});
  transition_record(fault, LifecycleState::Localizing, dfm, tick);

  // known-error shortcut: the DFM isolates directly, without engaging the DFO
  auto ked = known_errors_.find(origin);
  if (ked != known_errors_.end()) {
    for (const Symptom& s : must_record(fault).symptoms) {
      auto hit = ked->second.find(s.signature());
      if (hit != ked->second.end()) {
        ojson note;
        note["faultId"] = fault;
        note["signature"] = s.signature();
        registry_.note("known-error-hit", tick, std::move(note));
        tag_phase("L01", LifecyclePhase::Isolation, tick);
        isolate_fault(fault, hit->second.first, hit->second.second, tick);
        return;
      }
    }
  }

  std::optional<ComponentId> found = dfo_search(origin, must_record(fault), tick);
  tag_phase("L01", LifecyclePhase::Isolation, tick);
  if (found) {
    isolate_fault(fault, origin, *found, tick);
    return;
  }

  // not resolvable locally: hand off along the delivery structure
  const FaultRecord& cur = must_record(fault);
  if (cur.suspected_service) {
    const topology::Service* svc = net_.find_service(*cur.suspected_service);
    if (svc != nullptr && svc->mode == topology::DeliveryMode::heterarchical) {
      start_l02(fault, tick);
      return;
    }
    if (svc != nullptr) {
      std::set<DomainId> involved = topology::involved_domains(net_, svc->id);
      involved.erase(origin);
      if (!involved.empty()) {
        start_l03_descent(fault, tick);
        return;
      }
    }
  }
  ojson note;
  note["faultId"] = fault;
  note["domain"] = origin;
  registry_.note("unmappable-alarm", tick, std::move(note));
  log_use_case("L01", tick, "unresolved", ojson{{"faultId", fault}});
}

void Engine::ensure_isolation_deadline(const FaultId& fault, Tick tick) {
  LocalizationTask& task = tasks_[fault];
  if (task.deadline_scheduled) return;
  task.deadline_scheduled = true;
  const FaultRecord& rec = must_record(fault);
  Tick deadline = std::max<Tick>(tick + 1, rec.created_at + cfg_.t_isolate);
  host_.schedule_timer(deadline, simnet::TimerToken{"isolate-deadline", fault, ""});
  if (task.use_case == UseCase::L02) {
    Tick round2 = std::max<Tick>(tick + 1, rec.created_at + cfg_.t_isolate / 2);
    host_.schedule_timer(std::min(round2, deadline), simnet::TimerToken{"l02-round2", fault, ""});
  }
}

void Engine::start_l02(const FaultId& fault, Tick tick) {
  require_capability(UseCase::L02);
  const FaultRecord& rec = must_record(fault);
  RoleBinding gfcm = roles_.assign_gfcm(net_, gfcm_policy_, rec, tick);

  LocalizationTask& task = tasks_[fault];
  task.use_case = UseCase::L02;
  task.started = tick;
  task.gfcm = gfcm.domain;
  ensure_isolation_deadline(fault, tick);

  log_use_case("L02", tick, "started", ojson{{"faultId", fault}, {"gfcm", gfcm.domain}});
  if (rec.origin_domain != gfcm.domain) {
    ojson payload;
    payload["faultId"] = fault;
    payload["useCase"] = "L02";
    send_envelope(MessageKind::FaultReport, rec.origin_domain, gfcm.domain, std::move(payload),
                  tick);
  } else {
    gfcm_receive_report(fault, UseCase::L02, std::nullopt, tick);
  }
}

void Engine::start_l03_descent(const FaultId& fault, Tick tick) {
  require_capability(UseCase::L03);
  const FaultRecord& rec = must_record(fault);
  RoleBinding gfcm = roles_.assign_gfcm(net_, gfcm_policy_, rec, tick);

  LocalizationTask& task = tasks_[fault];
  task.use_case = UseCase::L03;
  task.started = tick;
  task.gfcm = gfcm.domain;
  task.descent = descent_order(*rec.suspected_service, {rec.origin_domain});
  ensure_isolation_deadline(fault, tick);

  log_use_case("L03", tick, "started", ojson{{"faultId", fault}, {"gfcm", gfcm.domain}});
  if (rec.origin_domain != gfcm.domain) {
    ojson payload;
    payload["faultId"] = fault;
    payload["useCase"] = "L03";
    send_envelope(MessageKind::FaultReport, rec.origin_domain, gfcm.domain, std::move(payload),
                  tick);
  } else {
    gfcm_receive_report(fault, UseCase::L03, std::nullopt, tick);
  }
}

std::deque<DomainId> Engine::descent_order(const ServiceId& service,
                                           const std::set<DomainId>& skip) const {
  std::deque<DomainId> order;
  std::set<DomainId> seen(skip.begin(), skip.end());
  std::set<ServiceId> visited;
  std::deque<ServiceId> work{service};
  while (!work.empty()) {
    ServiceId cur = work.front();
    work.pop_front();
    if (!visited.insert(cur).second) continue;
    const topology::Service* svc = net_.find_service(cur);
    if (svc == nullptr) continue;
    if (seen.insert(svc->owner).second) order.push_back(svc->owner);
    for (const ServicePartId& pid : svc->parts) {
      const topology::ServicePart* p = net_.find_part(pid);
      if (p != nullptr && seen.insert(p->provider).second) order.push_back(p->provider);
    }
    for (const ServiceId& sub : svc->subcontracts) work.push_back(sub);
  }
  return order;
}

void Engine::gfcm_receive_report(const FaultId& fault, UseCase uc,
                                 const std::optional<DomainId>& target, Tick tick) {
  LocalizationTask& task = tasks_[fault];
  ojson note;
  note["faultId"] = fault;
  note["useCase"] = use_case_name(uc);
  registry_.note("gfcm-report-received", tick, std::move(note));

  if (uc == UseCase::L02) {
    tag_phase("L02", LifecyclePhase::Detection, tick);
    const FaultRecord& rec = must_record(fault);
    // the GFCM's own domain searches first, without an envelope
    task.queried.insert(task.gfcm);
    std::optional<ComponentId> local = dfo_search(task.gfcm, rec, tick);
    if (local) {
      isolate_fault(fault, task.gfcm, *local, tick);
      return;
    }
    std::set<DomainId> involved = topology::involved_domains(net_, *rec.suspected_service);
    for (const DomainId& d : involved) {
      if (d == task.gfcm) continue;
      ojson payload;
      payload["faultId"] = fault;
      MsgId id = send_envelope(MessageKind::LocalizationRequest, task.gfcm, d, std::move(payload),
                               tick);
      task.open_requests.insert(id);
      task.queried.insert(d);
      pending_correlation_[id] = {"loc", fault};
    }
    conclude_if_exhausted(fault, tick);
    return;
  }

  if (target) task.descent.push_back(*target);
  dispatch_next_l03(fault, tick);
}

void Engine::dispatch_next_l03(const FaultId& fault, Tick tick) {
  LocalizationTask& task = tasks_[fault];
  while (!task.descent.empty()) {
    DomainId d = task.descent.front();
    task.descent.pop_front();
    if (task.queried.count(d)) continue;
    task.queried.insert(d);
    tag_phase("L03", LifecyclePhase::Detection, tick);
    if (d == task.gfcm) {
      // the GFCM's own turn: a local search instead of an envelope
      std::optional<ComponentId> found = dfo_search(d, must_record(fault), tick);
      tag_phase("L03", LifecyclePhase::Isolation, tick);
      if (found) {
        isolate_fault(fault, d, *found, tick);
        return;
      }
      continue;
    }
    ojson payload;
    payload["faultId"] = fault;
    MsgId id = send_envelope(MessageKind::LocalizationRequest, task.gfcm, d, std::move(payload),
                             tick);
    task.open_requests.insert(id);
    pending_correlation_[id] = {"loc", fault};
    return; // targeted requests go out one at a time
  }
}

void Engine::localize_specific_domain(const FaultId& fault, const DomainId& target, Tick tick) {
  require_capability(UseCase::L03);
  const FaultRecord& rec = must_record(fault);
  if (!rec.suspected_service)
    raise(Errc::scope_error, "fault '" + fault + "' names no suspected service");
  std::set<DomainId> involved = topology::involved_domains(net_, *rec.suspected_service);
  if (!involved.count(target))
    raise(Errc::scope_error,
          "domain '" + target + "' is not involved in service '" + *rec.suspected_service + "'");

  auto existing = tasks_.find(fault);
  if (existing != tasks_.end() && existing->second.concluded)
    raise(Errc::precondition_failed, "localization of '" + fault + "' already concluded");

  if (rec.state == LifecycleState::Detected)
    transition_record(fault, LifecycleState::Localizing, roles_.dfm(rec.origin_domain), tick);

  RoleBinding gfcm = roles_.assign_gfcm(net_, gfcm_policy_, must_record(fault), tick);
  LocalizationTask& task = tasks_[fault];
  if (existing == tasks_.end()) task.use_case = UseCase::L03;
  task.started = existing == tasks_.end() ? tick : task.started;
  task.gfcm = gfcm.domain;
  task.queried.erase(target); // an explicit target may be re-queried
  task.descent.push_front(target);
  ensure_isolation_deadline(fault, tick);
  log_use_case("L03", tick, "started", ojson{{"faultId", fault}, {"target", target}});
  if (task.open_requests.empty()) dispatch_next_l03(fault, tick);
}

void Engine::do_l02_round2(const FaultId& fault, Tick tick) {
  auto it = tasks_.find(fault);
  if (it == tasks_.end()) return;
  LocalizationTask& task = it->second;
  if (task.concluded || task.round2_done || task.use_case != UseCase::L02) return;

  // widened re-broadcast: every staffed domain not yet queried
  task.round2_done = true;
  std::vector<DomainId> extra;
  for (const topology::Domain& d : net_.domains())
    if (!task.queried.count(d.id)) extra.push_back(d.id);
  std::sort(extra.begin(), extra.end());
  if (extra.empty()) return;
  ojson note;
  note["faultId"] = fault;
  note["widenedTo"] = extra.size();
  registry_.note("l02-widened", tick, std::move(note));
  for (const DomainId& d : extra) {
    ojson payload;
    payload["faultId"] = fault;
    MsgId id =
        send_envelope(MessageKind::LocalizationRequest, task.gfcm, d, std::move(payload), tick);
    task.open_requests.insert(id);
    task.queried.insert(d);
    pending_correlation_[id] = {"loc", fault};
  }
}

void Engine::conclude_if_exhausted(const FaultId& fault, Tick tick) {
  auto it = tasks_.find(fault);
  if (it == tasks_.end()) return;
  LocalizationTask& task = it->second;
  if (task.concluded || !task.open_requests.empty()) return;

  if (task.use_case == UseCase::L02) {
    if (!task.round2_done) {
      do_l02_round2(fault, tick);
      if (!task.open_requests.empty()) return;
    }
    escalate_fault(fault, tick);
  }
  // an exhausted L03 descent stays Localizing until the isolation deadline
}

void Engine::isolate_fault(const FaultId& fault, const DomainId& domain,
                           const ComponentId& component, Tick tick) {
  auto it = tasks_.find(fault);
  LocalizationTask* task = it == tasks_.end() ? nullptr : &it->second;
  if (task != nullptr && task->concluded) return;

  const Tick created = must_record(fault).created_at;
  transition_record(fault, LifecycleState::Isolated, roles_.dfo(domain), tick);
  if (task != nullptr) task->concluded = true;
  const FaultRecord& rec = must_record(fault);

  ojson note;
  note["faultId"] = fault;
  note["domain"] = domain;
  note["component"] = component;
  registry_.note("isolated", tick, std::move(note));

  UseCase uc = task != nullptr ? task->use_case : UseCase::L01;
  switch (uc) {
    case UseCase::L01:
      tag_phase("L01", LifecyclePhase::Isolation, tick);
      log_use_case("L01", tick, "completed",
                   ojson{{"faultId", fault}, {"domain", domain}, {"component", component}});
      break;
    case UseCase::L02: {
      tag_phase("L02", LifecyclePhase::ForecastPrevention, tick);
      // the resolution feeds the origin's known-error database
      if (!rec.symptoms.empty()) {
        known_errors_[rec.origin_domain][rec.symptoms.front().signature()] = {domain, component};
        ojson learned;
        learned["domain"] = rec.origin_domain;
        learned["signature"] = rec.symptoms.front().signature();
        learned["component"] = component;
        registry_.note("known-error-learned", tick, std::move(learned));
      }
      // the GFCM notifies every involved DFM of the conclusion
      if (rec.suspected_service) {
        ojson event;
        event["faultId"] = fault;
        event["state"] = "Isolated";
        event["domain"] = domain;
        event["component"] = component;
        for (const DomainId& d : topology::involved_domains(net_, *rec.suspected_service)) {
          if (d == task->gfcm) continue;
          ojson payload;
          payload["topic"] = "fault-status";
          payload["event"] = event;
          payload["asOf"] = tick;
          send_envelope(MessageKind::Notify, task->gfcm, d, std::move(payload), tick);
        }
      }
      log_use_case("L02", tick, "completed",
                   ojson{{"faultId", fault}, {"domain", domain}, {"component", component}});
      break;
    }
    case UseCase::L03:
      tag_phase("L03", LifecyclePhase::Isolation, tick);
      log_use_case("L03", tick, "completed",
                   ojson{{"faultId", fault}, {"domain", domain}, {"component", component}});
      break;
    default:
      break;
  }

  // freeze the localization outcome; later traffic about this fault (data
  // changes, progress queries) is not part of its localization cost
  LocalizationOutcome& out = outcomes_[fault];
  out.fault_id = fault;
  out.result = LocalizationOutcome::Result::isolated;
  out.domain = domain;
  out.component = component;
  out.elapsed_ticks = tick - created;

  host_.schedule_timer(tick + 1, simnet::TimerToken{"begin-repair", fault, ""});
}

void Engine::escalate_fault(const FaultId& fault, Tick tick) {
  auto it = tasks_.find(fault);
  if (it == tasks_.end() || it->second.concluded) return;
  LocalizationTask& task = it->second;
  const FaultRecord& rec = must_record(fault);
  if (rec.state != LifecycleState::Localizing) return;

  task.concluded = true;
  const Tick created = rec.created_at;
  const DomainId origin = rec.origin_domain;
  RoleBinding gfcm = gfcm_binding(fault, tick);
  transition_record(fault, LifecycleState::Escalated, gfcm, tick);

  ojson note;
  note["faultId"] = fault;
  note["gfcm"] = gfcm.domain;
  registry_.note("escalated", tick, std::move(note));

  // terminal escalation: customer management is informed via the origin DFM
  if (origin != gfcm.domain) {
    ojson payload;
    payload["faultId"] = fault;
    payload["reason"] = "isolation deadline exceeded";
    send_envelope(MessageKind::EscalationNotice, gfcm.domain, origin, std::move(payload), tick);
  }

  LocalizationOutcome& out = outcomes_[fault];
  out.fault_id = fault;
  out.result = LocalizationOutcome::Result::escalated;
  out.elapsed_ticks = tick - created;
  if (task.use_case == UseCase::L02) {
    tag_phase("L02", LifecyclePhase::ForecastPrevention, tick);
    log_use_case("L02", tick, "escalated", ojson{{"faultId", fault}});
  } else {
    log_use_case(use_case_name(task.use_case), tick, "escalated", ojson{{"faultId", fault}});
  }
}

// ---------------------------------------------------------------------------
// progress management
// ---------------------------------------------------------------------------

std::string Engine::new_view_id() { return pad_id("V-", ++view_seq_); }

std::string Engine::progress_query(const DomainId& requester, const std::string& scope,
                                   std::optional<DomainId> target, Tick tick) {
  if (scope != "resolution" && scope != "maintenance")
    raise(Errc::misuse, "unknown progress scope '" + scope + "'");
  if (net_.find_domain(requester) == nullptr)
    raise(Errc::invalid_reference, "unknown requester '" + requester + "'");
  if (target && net_.find_domain(*target) == nullptr)
    raise(Errc::invalid_reference, "unknown target '" + *target + "'");

  UseCase uc = scope == "resolution" ? UseCase::P01 : UseCase::P02;
  PendingView pv;
  pv.view_id = new_view_id();
  pv.use_case = uc;
  pv.requester = requester;
  pv.scope_kind = scope;
  pv.scope_id = target.value_or("all");
  pv.requested_at = tick;

  std::vector<DomainId> targets;
  if (target) {
    targets.push_back(*target);
  } else {
    for (const topology::Domain& d : net_.domains()) targets.push_back(d.id);
    std::sort(targets.begin(), targets.end());
  }

  log_use_case(use_case_name(uc), tick, "started",
               ojson{{"requester", requester}, {"scope", pv.scope_id}});

  for (const DomainId& d : targets) {
    if (!orgmodel::check_access(policy_, roles_, requester, d, Capability::query_progress)) {
      ProgressEntry e;
      e.domain = d;
      e.denied = true;
      pv.progress_entries[d] = std::move(e);
      continue;
    }
    if (d == requester) {
      pv.progress_entries[d] = local_progress_entry(d, scope, tick);
      continue;
    }
    ojson payload;
    payload["viewId"] = pv.view_id;
    payload["scope"] = scope;
    MsgId id = send_envelope(MessageKind::ProgressQuery, requester, d, std::move(payload), tick);
    pv.expected.insert(d);
    pending_correlation_[id] = {"view", pv.view_id};
  }

  std::string view_id = pv.view_id;
  pending_views_[view_id] = std::move(pv);
  if (pending_views_[view_id].expected.empty()) {
    try_assemble(view_id, tick, false);
  } else {
    host_.schedule_timer(tick + cfg_.monitor_timeout,
                         simnet::TimerToken{"view-deadline", view_id, ""});
  }
  return view_id;
}

ProgressEntry Engine::local_progress_entry(const DomainId& d, const std::string& scope,
                                           Tick tick) const {
  ProgressEntry e;
  e.domain = d;
  e.responded = true;
  e.as_of = tick;
  if (scope == "resolution") {
    std::set<FaultId> ids(registry_.by_domain(d).begin(), registry_.by_domain(d).end());
    for (const auto& [fid, out] : outcomes_)
      if (out.result == LocalizationOutcome::Result::isolated && out.domain == d) ids.insert(fid);
    for (const FaultId& fid : ids) {
      const FaultRecord* rec = registry_.find(fid);
      if (rec == nullptr) continue;
      e.items.push_back(ProgressItem{fid, rec->state, rec->updated_at});
    }
  } else {
    for (const scenario::MaintenanceTask& m : sc_.maintenance) {
      if (m.domain != d) continue;
      MaintenanceStatus st;
      st.component = m.component;
      st.start = m.start;
      st.duration = m.duration;
      st.status = tick < m.start ? "scheduled"
                  : tick < m.start + m.duration ? "in-progress"
                                                : "completed";
      e.maintenance.push_back(std::move(st));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// monitoring
// ---------------------------------------------------------------------------

MonitorEntry Engine::local_monitor_entry(const DomainId& d, Tick tick) const {
  MonitorEntry e;
  e.domain = d;
  e.alarms = host_.dms_alarms(d);
  e.responded = true;
  e.as_of = tick;
  return e;
}

std::string Engine::monitor_domain(const DomainId& requester, const DomainId& target, Tick tick) {
  require_capability(UseCase::M01);
  if (net_.find_domain(target) == nullptr)
    raise(Errc::invalid_reference, "unknown domain '" + target + "'");
  if (!orgmodel::check_access(policy_, roles_, requester, target, Capability::monitor))
    raise(Errc::access_denied,
          "'" + requester + "' may not monitor '" + target + "'");

  PendingView pv;
  pv.view_id = new_view_id();
  pv.use_case = UseCase::M01;
  pv.requester = requester;
  pv.scope_kind = "domain";
  pv.scope_id = target;
  pv.requested_at = tick;
  log_use_case("M01", tick, "started", ojson{{"requester", requester}, {"target", target}});

  if (target == requester) {
    pv.monitor_entries[target] = local_monitor_entry(target, tick);
  } else {
    ojson payload;
    payload["viewId"] = pv.view_id;
    MsgId id = send_envelope(MessageKind::MonitorQuery, requester, target, std::move(payload),
                             tick);
    pv.expected.insert(target);
    pending_correlation_[id] = {"view", pv.view_id};
  }
  std::string view_id = pv.view_id;
  pending_views_[view_id] = std::move(pv);
  if (pending_views_[view_id].expected.empty())
    try_assemble(view_id, tick, false);
  else
    host_.schedule_timer(tick + cfg_.monitor_timeout,
                         simnet::TimerToken{"view-deadline", view_id, ""});
  return view_id;
}

std::string Engine::monitor_overall(const DomainId& requester, Tick tick) {
  require_capability(UseCase::M02);
  std::vector<DomainId> targets;
  for (const topology::Domain& d : net_.domains()) targets.push_back(d.id);
  std::sort(targets.begin(), targets.end());
  if (!roles_.holds_gfcm(requester)) {
    for (const DomainId& d : targets)
      if (d != requester && !policy_.has_grant(requester, d, Capability::monitor))
        raise(Errc::access_denied, "'" + requester + "' lacks monitor access to '" + d + "'");
  }

  PendingView pv;
  pv.view_id = new_view_id();
  pv.use_case = UseCase::M02;
  pv.requester = requester;
  pv.scope_kind = "overall";
  pv.scope_id = "all";
  pv.requested_at = tick;
  log_use_case("M02", tick, "started", ojson{{"requester", requester}});

  for (const DomainId& d : targets) {
    if (d == requester) {
      pv.monitor_entries[d] = local_monitor_entry(d, tick);
      continue;
    }
    ojson payload;
    payload["viewId"] = pv.view_id;
    MsgId id = send_envelope(MessageKind::MonitorQuery, requester, d, std::move(payload), tick);
    pv.expected.insert(d);
    pending_correlation_[id] = {"view", pv.view_id};
  }
  std::string view_id = pv.view_id;
  pending_views_[view_id] = std::move(pv);
  if (pending_views_[view_id].expected.empty())
    try_assemble(view_id, tick, false);
  else
    host_.schedule_timer(tick + cfg_.monitor_timeout,
                         simnet::TimerToken{"view-deadline", view_id, ""});
  return view_id;
}

std::string Engine::monitor_service(const DomainId& requester, const ServiceId& service,
                                    Tick tick) {
  require_capability(UseCase::M03);
  if (net_.find_service(service) == nullptr)
    raise(Errc::invalid_reference, "unknown service '" + service + "'");
  std::set<DomainId> involved = topology::involved_domains(net_, service);
  for (const DomainId& d : involved)
    if (!orgmodel::check_access(policy_, roles_, requester, d, Capability::monitor))
      raise(Errc::access_denied, "'" + requester + "' may not monitor involved domain '" + d + "'");

  PendingView pv;
  pv.view_id = new_view_id();
  pv.use_case = UseCase::M03;
  pv.requester = requester;
  pv.scope_kind = "service";
  pv.scope_id = service;
  pv.requested_at = tick;
  log_use_case("M03", tick, "started", ojson{{"requester", requester}, {"service", service}});

  for (const DomainId& d : involved) {
    if (d == requester) {
      pv.monitor_entries[d] = local_monitor_entry(d, tick);
      continue;
    }
    ojson payload;
    payload["viewId"] = pv.view_id;
    MsgId id = send_envelope(MessageKind::MonitorQuery, requester, d, std::move(payload), tick);
    pv.expected.insert(d);
    pending_correlation_[id] = {"view", pv.view_id};
  }
  std::string view_id = pv.view_id;
  pending_views_[view_id] = std::move(pv);
  if (pending_views_[view_id].expected.empty())
    try_assemble(view_id, tick, false);
  else
    host_.schedule_timer(tick + cfg_.monitor_timeout,
                         simnet::TimerToken{"view-deadline", view_id, ""});
  return view_id;
}

// ---------------------------------------------------------------------------
// reporting
// ---------------------------------------------------------------------------

StatisticsRow Engine::local_statistics_row(const DomainId& d, Tick from, Tick to) const {
  StatisticsRow row;
  row.domain = d;
  double isolate_sum = 0, repair_sum = 0;
  std::uint64_t isolate_n = 0, repair_n = 0;
  for (const FaultId& fid : registry_.by_domain(d)) {
    const FaultRecord* rec = registry_.find(fid);
    if (rec == nullptr || rec->created_at < from || rec->created_at > to) continue;
    row.fault_count++;
    std::optional<Tick> isolated, repairing, resolved;
    for (const faultmodel::HistoryEvent& e : rec->history) {
      if (e.kind != faultmodel::HistoryKind::transition) continue;
      if (e.to == LifecycleState::Isolated && !isolated) isolated = e.tick;
      if (e.to == LifecycleState::Repairing && !repairing) repairing = e.tick;
      if (e.to == LifecycleState::Resolved && !resolved) resolved = e.tick;
    }
    if (isolated) {
      isolate_sum += static_cast<double>(*isolated - rec->created_at);
      isolate_n++;
    }
    if (isolated && resolved) {
      repair_sum += static_cast<double>(*resolved - *isolated);
      repair_n++;
    }
  }
  if (isolate_n > 0) row.mean_tt_isolate = isolate_sum / static_cast<double>(isolate_n);
  if (repair_n > 0) row.mean_tt_repair = repair_sum / static_cast<double>(repair_n);
  auto it = sent_by_domain_.find(d);
  row.messages_sent = it == sent_by_domain_.end() ? 0 : it->second;
  return row;
}

std::string Engine::report_statistics(const DomainId& requester, Tick from, Tick to, Tick tick) {
  if (from > to) raise(Errc::empty_input, "empty statistics window");
  std::set<DomainId> targets;
  for (const topology::Domain& d : net_.domains()) targets.insert(d.id);
  require_report_access(requester, targets);

  PendingView pv;
  pv.view_id = new_view_id();
  pv.use_case = UseCase::R01;
  pv.requester = requester;
  pv.scope_kind = "statistics";
  pv.scope_id = "all";
  pv.requested_at = tick;
  pv.from = from;
  pv.to = to;
  log_use_case("R01", tick, "started",
               ojson{{"requester", requester}, {"from", from}, {"to", to}});

  for (const DomainId& d : targets) {
    if (d == requester) {
      pv.stat_rows[d] = local_statistics_row(d, from, to);
      continue;
    }
    ojson payload;
    payload["viewId"] = pv.view_id;
    payload["from"] = from;
    payload["to"] = to;
    MsgId id = send_envelope(MessageKind::ReportRequest, requester, d, std::move(payload), tick);
    pv.expected.insert(d);
    pending_correlation_[id] = {"view", pv.view_id};
  }
  std::string view_id = pv.view_id;
  pending_views_[view_id] = std::move(pv);
  if (pending_views_[view_id].expected.empty())
    try_assemble(view_id, tick, false);
  else
    host_.schedule_timer(tick + cfg_.monitor_timeout,
                         simnet::TimerToken{"view-deadline", view_id, ""});
  return view_id;
}

faultmodel::MetricVector Engine::measure_service(const ServiceId& id) const {
  std::vector<faultmodel::MetricVector> vectors;
  std::set<ServiceId> visited;
  std::function<void(const ServiceId&)> collect = [&](const ServiceId& sid) {
    if (!visited.insert(sid).second) return;
    const topology::Service* svc = net_.find_service(sid);
    if (svc == nullptr) return;
    for (const ServicePartId& pid : svc->parts) {
      const topology::ServicePart* p = net_.find_part(pid);
      if (p != nullptr) vectors.push_back(host_.measured_part(*p));
    }
    for (const ServiceId& sub : svc->subcontracts) collect(sub);
  };
  collect(id);
  if (vectors.empty()) return faultmodel::MetricVector{};
  return faultmodel::aggregate_chain(vectors);
}

QosReport Engine::compute_qos(Tick tick) const {
  QosReport report;
  report.at = tick;
  for (const topology::Service& svc : net_.services()) {
    if (!svc.sla) continue;
    faultmodel::MetricVector m = measure_service(svc.id);
    auto add = [&](const char* metric, double measured, double bound, bool violated) {
      report.rows.push_back(QosRow{svc.id, metric, measured, bound, violated});
    };
    if (svc.sla->max_owd) add("owd", m.owd, *svc.sla->max_owd, m.owd > *svc.sla->max_owd);
    if (svc.sla->max_ipdv) add("ipdv", m.ipdv, *svc.sla->max_ipdv, m.ipdv > *svc.sla->max_ipdv);
    if (svc.sla->max_loss) add("loss", m.loss, *svc.sla->max_loss, m.loss > *svc.sla->max_loss);
    if (svc.sla->min_availability)
      add("availability", m.availability, *svc.sla->min_availability,
          m.availability < *svc.sla->min_availability);
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const QosRow& a, const QosRow& b) {
    return a.service != b.service ? a.service < b.service : a.metric < b.metric;
  });
  return report;
}

QosReport Engine::report_qos(const DomainId& requester, Tick tick) {
  std::set<DomainId> targets;
  for (const topology::Domain& d : net_.domains()) targets.insert(d.id);
  require_report_access(requester, targets);
  QosReport report = compute_qos(tick);
  qos_reports_.push_back(report);
  tag_row("R02", tick);
  log_use_case("R02", tick, "completed",
               ojson{{"requester", requester}, {"rows", report.rows.size()}});
  return report;
}

TrendReport Engine::compute_trend(Tick from, Tick to) const {
  TrendReport report;
  report.from = from;
  report.to = to;
  report.threshold = cfg_.r03_threshold;

  for (const topology::Domain& d : net_.domains()) {
    std::vector<Tick> created;
    for (const FaultId& fid : registry_.by_domain(d.id)) {
      const FaultRecord* rec = registry_.find(fid);
      if (rec != nullptr && rec->created_at <= to) created.push_back(rec->created_at);
    }
    if (created.empty()) continue;
    std::sort(created.begin(), created.end());
    std::vector<std::pair<double, double>> points;
    for (Tick t = from; t <= to; ++t) {
      auto upper = std::upper_bound(created.begin(), created.end(), t);
      points.emplace_back(static_cast<double>(t),
                          static_cast<double>(upper - created.begin()));
    }
    LinearFit fit = linear_fit(points);
    TrendRow row;
    row.domain = d.id;
    row.slope = fit.slope;
    row.intercept = fit.intercept;
    if (fit.slope > 1e-12) {
      double t = (report.threshold - fit.intercept) / fit.slope;
      row.breach_tick = std::max<Tick>(from, static_cast<Tick>(std::ceil(t - 1e-9)));
    } else if (fit.intercept >= report.threshold) {
      row.breach_tick = from;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

TrendReport Engine::report_trend(const DomainId& requester, Tick from, Tick to, Tick tick) {
  if (from > to) raise(Errc::empty_input, "empty trend window");
  std::set<DomainId> targets;
  for (const topology::Domain& d : net_.domains()) targets.insert(d.id);
  require_report_access(requester, targets);
  TrendReport report = compute_trend(from, to);
  trend_reports_.push_back(report);
  tag_row("R03", tick);
  log_use_case("R03", tick, "completed",
               ojson{{"requester", requester}, {"rows", report.rows.size()}});
  return report;
}

StatisticsReport Engine::offline_statistics(Tick from, Tick to) const {
  StatisticsReport rep;
  rep.from = from;
  rep.to = to;
  rep.assembled_at = to;
  for (const topology::Domain& d : net_.domains())
    rep.rows.push_back(local_statistics_row(d.id, from, to));
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const StatisticsRow& a, const StatisticsRow& b) { return a.domain < b.domain; });
  return rep;
}

// ---------------------------------------------------------------------------
// false positives
// ---------------------------------------------------------------------------

namespace {

bool ever_isolated(const FaultRecord& rec) {
  switch (rec.state) {
    case LifecycleState::Isolated:
    case LifecycleState::Repairing:
    case LifecycleState::Resolved:
      return true;
    case LifecycleState::Closed:
      for (const faultmodel::HistoryEvent& e : rec.history)
        if (e.kind == faultmodel::HistoryKind::transition && e.to == LifecycleState::Isolated)
          return true;
      return false;
    default:
      return false;
  }
}

} // namespace

void Engine::false_positive_check(const DomainId& requester, const FaultId& fault, Tick tick) {
  require_capability(UseCase::F01);
  const FaultRecord& rec = must_record(fault);
  if (rec.false_positive != FalsePositiveMark::unknown) {
    log_use_case("F01", tick, "cached",
                 ojson{{"faultId", fault}, {"verdict", faultmodel::fp_mark_name(rec.false_positive)}});
    return;
  }
  const DomainId responsible = rec.origin_domain;
  log_use_case("F01", tick, "started", ojson{{"faultId", fault}, {"requester", requester}});
  if (requester == responsible) {
    apply_fp_verdict(fault, tick);
    return;
  }
  ojson payload;
  payload["faultId"] = fault;
  MsgId id = send_envelope(MessageKind::FalsePositiveQuery, requester, responsible,
                           std::move(payload), tick);
  pending_correlation_[id] = {"fp", fault};
}

void Engine::apply_fp_verdict(const FaultId& fault, Tick tick) {
  const FaultRecord& rec = must_record(fault);
  if (rec.false_positive != FalsePositiveMark::unknown) return;
  const DomainId responsible = rec.origin_domain;

  // The DFO checks whether the reported misbehavior maps onto the system:
  // an already-isolated fault is real by construction, otherwise the ground
  // truth since the report decides.
  bool real = ever_isolated(rec);
  if (!real) {
    for (const Symptom& s : rec.symptoms) {
      if (s.scope == faultmodel::SymptomScope::component) {
        if (host_.fault_overlaps(s.target, rec.created_at, tick)) real = true;
      } else {
        const topology::Service* svc = net_.find_service(s.target);
        if (svc != nullptr)
          for (const ComponentId& c : net_.closure_components(svc->id))
            if (host_.fault_overlaps(c, rec.created_at, tick)) real = true;
      }
      if (real) break;
    }
    if (!real && rec.suspected_service) {
      const topology::Service* svc = net_.find_service(*rec.suspected_service);
      if (svc != nullptr)
        for (const ComponentId& c : net_.closure_components(svc->id))
          if (host_.fault_overlaps(c, rec.created_at, tick)) {
            real = true;
            break;
          }
    }
  }

  RoleBinding dfo = roles_.dfo(responsible);
  registry_.apply_confirmation(
      fault, real ? FalsePositiveMark::confirmed_real : FalsePositiveMark::confirmed_false, dfo,
      tick);
  if (!real) {
    const FaultRecord& cur = must_record(fault);
    if (cur.state == LifecycleState::Detected)
      transition_record(fault, LifecycleState::Localizing, roles_.dfm(responsible), tick);
    transition_record(fault, LifecycleState::FalsePositive, roles_.dfm(responsible), tick);
    LocalizationOutcome& out = outcomes_[fault];
    out.fault_id = fault;
    out.result = LocalizationOutcome::Result::false_positive;
    out.elapsed_ticks = tick - cur.created_at;
    auto it = tasks_.find(fault);
    if (it != tasks_.end()) it->second.concluded = true;
  }
  tag_row("F01", tick);
  log_use_case("F01", tick, "completed",
               ojson{{"faultId", fault}, {"verdict", real ? "confirmed-real" : "confirmed-false"}});
}

void Engine::false_positive_remove(const DomainId& actor, const FaultId& fault, Tick tick) {
  require_capability(UseCase::F02);
  const FaultRecord& rec = must_record(fault);
  if (rec.false_positive != FalsePositiveMark::confirmed_false)
    raise(Errc::precondition_failed,
          "fault '" + fault + "' is not a confirmed false positive (" +
              faultmodel::fp_mark_name(rec.false_positive) + ")");
  const DomainId origin = rec.origin_domain;
  if (actor != origin && !roles_.holds_gfcm(actor, fault))
    raise(Errc::access_denied, "'" + actor + "' may not remove alarms of '" + origin + "'");

  std::size_t cleared = 0;
  for (const Symptom& s : rec.symptoms)
    if (host_.clear_false_alarm(origin, s)) cleared++;

  transition_record(fault, LifecycleState::Closed, roles_.dfo(origin), tick);
  roles_.release_gfcm(fault, tick);

  ojson note;
  note["faultId"] = fault;
  note["domain"] = origin;
  note["alarmsCleared"] = cleared;
  note["reportedTo"] = "DFM";
  registry_.note("false-positive-removed", tick, std::move(note));
  tag_row("F02", tick);
  log_use_case("F02", tick, "completed", ojson{{"faultId", fault}, {"alarmsCleared", cleared}});
}

// ---------------------------------------------------------------------------
// controlled data change
// ---------------------------------------------------------------------------

faultmodel::FaultRecord Engine::data_change(const DomainId& actor, const FaultId& fault,
                                            const DataPatch& patch, Tick tick) {
  const FaultRecord& rec = must_record(fault);
  std::optional<DomainId> gd = roles_.gfcm_domain(fault);
  if (!gd && gfcm_policy_.mode == orgmodel::GfcmMode::per_fault) gd = rec.origin_domain;
  if (!gd || actor != *gd)
    raise(Errc::access_denied, "'" + actor + "' does not hold change-fault-data for '" + fault + "'");
  if (patch.suspected_service && patch.suspected_service->has_value() &&
      net_.find_service(**patch.suspected_service) == nullptr)
    raise(Errc::invalid_reference, "patch names unknown service '" + **patch.suspected_service + "'");

  RoleBinding gfcm;
  gfcm.role = RoleKind::GFCM;
  gfcm.domain = *gd;
  gfcm.since = tick;
  registry_.apply_patch(fault, patch, gfcm, tick);
  tag_row("FM-02", tick);
  log_use_case("FM-02", tick, "completed", ojson{{"faultId", fault}, {"actor", actor}});
  return *registry_.find(fault);
}

void Engine::request_data_change(const DomainId& requester, const FaultId& fault,
                                 const DataPatch& patch, Tick tick) {
  const FaultRecord& rec = must_record(fault);
  std::optional<DomainId> gd = roles_.gfcm_domain(fault);
  if (!gd && gfcm_policy_.mode == orgmodel::GfcmMode::per_fault) gd = rec.origin_domain;
  if (!gd) raise(Errc::routing_error, "no acting GFCM to mediate the change");
  if (requester == *gd) {
    data_change(requester, fault, patch, tick);
    return;
  }
  ojson payload;
  payload["faultId"] = fault;
  payload["patch"] = patch_to_json(patch);
  MsgId id = send_envelope(MessageKind::DataChangeRequest, requester, *gd, std::move(payload),
                           tick);
  pending_correlation_[id] = {"dc", fault};
}

// ---------------------------------------------------------------------------
// plot-data export
// ---------------------------------------------------------------------------

void Engine::export_plot_data(Tick tick) {
  ojson bundle;
  bundle["statistics"] = statistics_to_json(
      statistics_reports_.empty() ? offline_statistics(0, tick) : statistics_reports_.back());
  bundle["qos"] = qos_to_json(qos_reports_.empty() ? compute_qos(tick) : qos_reports_.back());
  bundle["trend"] =
      trend_to_json(trend_reports_.empty() ? compute_trend(0, tick) : trend_reports_.back());
  plot_data_ = std::move(bundle);
  registry_.note("plot-export", tick, ojson{{"at", tick}});
  tag_row("FM-01", tick);
  log_use_case("FM-01", tick, "completed", ojson{{"at", tick}});
}

void Engine::subscribe(const DomainId& subscriber, const DomainId& publisher,
                       const std::string& topic, Tick tick) {
  if (subscriber == publisher) raise(Errc::misuse, "self-subscription");
  if (net_.find_domain(publisher) == nullptr)
    raise(Errc::invalid_reference, "unknown publisher '" + publisher + "'");
  ojson payload;
  payload["topic"] = topic;
  send_envelope(MessageKind::Subscribe, subscriber, publisher, std::move(payload), tick);
}

// ---------------------------------------------------------------------------
// event-loop callbacks
// ---------------------------------------------------------------------------

void Engine::on_corrupted(const Envelope& env, Tick tick) {
  ojson data;
  data["msgId"] = env.msg_id;
  data["sender"] = env.sender;
  data["receiver"] = env.receiver;
  data["kind"] = protocol::message_kind_name(env.kind);
  registry_.note("integrity-violation", tick, std::move(data));
}

void Engine::on_injected_fault(const ComponentId& c, Tick tick) {
  if (!sc_.auto_detect) return;
  const topology::Component* comp = net_.find_component(c);
  if (comp == nullptr) return;
  Symptom s;
  s.scope = faultmodel::SymptomScope::component;
  s.target = c;
  s.deviation = "component-down";
  report_alarm(comp->owner, s, std::nullopt, RoleKind::DMS, tick);
}

void Engine::on_injected_false_alarm(const DomainId& d, const Symptom& s, Tick tick) {
  if (!sc_.auto_detect) return;
  report_alarm(d, s, std::nullopt, RoleKind::DMS, tick);
}

void Engine::on_component_repaired(const ComponentId& c, Tick tick) {
  for (auto& [fid, out] : outcomes_) {
    if (out.result != LocalizationOutcome::Result::isolated || out.component != c) continue;
    const FaultRecord* rec = registry_.find(fid);
    if (rec == nullptr || rec->state != LifecycleState::Repairing) continue;
    transition_record(fid, LifecycleState::Resolved, roles_.dfo(out.domain), tick);
    host_.schedule_timer(tick + 1, simnet::TimerToken{"close-record", fid, ""});
  }
}

void Engine::on_timer(const simnet::TimerToken& token, Tick tick) {
  if (token.kind == "isolate-deadline") {
    escalate_fault(token.a, tick);
  } else if (token.kind == "l02-round2") {
    // the widening is time-driven; requests still pending do not delay it
    do_l02_round2(token.a, tick);
    conclude_if_exhausted(token.a, tick);
  } else if (token.kind == "begin-repair") {
    const FaultRecord* rec = registry_.find(token.a);
    auto out = outcomes_.find(token.a);
    if (rec != nullptr && out != outcomes_.end() && rec->state == LifecycleState::Isolated) {
      transition_record(token.a, LifecycleState::Repairing, roles_.dfo(out->second.domain), tick);
      host_.schedule_repair(tick + cfg_.repair_ticks, out->second.component);
    }
  } else if (token.kind == "close-record") {
    const FaultRecord* rec = registry_.find(token.a);
    if (rec != nullptr && rec->state == LifecycleState::Resolved) {
      std::optional<DomainId> gd = roles_.gfcm_domain(token.a);
      RoleBinding closer =
          gd ? RoleBinding{RoleKind::GFCM, *gd, std::nullopt, tick} : roles_.dfm(rec->origin_domain);
      transition_record(token.a, LifecycleState::Closed, closer, tick);
      roles_.release_gfcm(token.a, tick);
    }
  } else if (token.kind == "view-deadline") {
    try_assemble(token.a, tick, true);
  }
}

void Engine::on_deliver(const Envelope& env, Tick tick) {
  std::vector<std::string> missing = protocol::validate_payload(env.kind, env.payload);
  if (!missing.empty()) {
    ojson data;
    data["msgId"] = env.msg_id;
    data["missing"] = missing;
    registry_.note("malformed-payload", tick, std::move(data));
    return;
  }

  switch (env.kind) {
    case MessageKind::FaultReport: {
      FaultId f = env.payload["faultId"].get<std::string>();
      if (registry_.find(f) == nullptr) {
        registry_.note("unknown-fault-report", tick, ojson{{"msgId", env.msg_id}, {"faultId", f}});
        break;
      }
      UseCase uc = use_case_from_name(env.payload["useCase"].get<std::string>());
      std::optional<DomainId> target;
      if (env.payload.contains("target")) target = env.payload["target"].get<std::string>();
      gfcm_receive_report(f, uc, target, tick);
      break;
    }
    case MessageKind::LocalizationRequest: {
      FaultId f = env.payload["faultId"].get<std::string>();
      const FaultRecord* rec = registry_.find(f);
      ojson payload;
      payload["faultId"] = f;
      if (rec == nullptr) {
        payload["found"] = false;
      } else {
        std::optional<ComponentId> found = dfo_search(env.receiver, *rec, tick);
        payload["found"] = found.has_value();
        if (found) {
          payload["domain"] = env.receiver;
          payload["component"] = *found;
        }
      }
      send_envelope(MessageKind::LocalizationResponse, env.receiver, env.sender,
                    std::move(payload), tick, env.msg_id);
      break;
    }
    case MessageKind::LocalizationResponse: {
      FaultId f = env.payload["faultId"].get<std::string>();
      if (env.correlation_id) pending_correlation_.erase(*env.correlation_id);
      auto it = tasks_.find(f);
      if (it == tasks_.end()) break;
      LocalizationTask& task = it->second;
      if (env.correlation_id) task.open_requests.erase(*env.correlation_id);
      if (task.concluded) {
        registry_.note("late-response", tick, ojson{{"faultId", f}, {"from", env.sender}});
        break;
      }
      if (env.payload["found"].get<bool>()) {
        isolate_fault(f, env.payload["domain"].get<std::string>(),
                      env.payload["component"].get<std::string>(), tick);
      } else if (task.use_case == UseCase::L03) {
        tag_phase("L03", LifecyclePhase::Isolation, tick);
        registry_.note("negative-response", tick, ojson{{"faultId", f}, {"from", env.sender}});
        dispatch_next_l03(f, tick);
        conclude_if_exhausted(f, tick);
      } else {
        conclude_if_exhausted(f, tick);
      }
      break;
    }
    case MessageKind::ProgressQuery: {
      ProgressEntry entry = local_progress_entry(
          env.receiver, env.payload["scope"].get<std::string>(), tick);
      ojson payload;
      payload["viewId"] = env.payload["viewId"];
      payload["entry"] = progress_entry_to_json(entry);
      send_envelope(MessageKind::ProgressResponse, env.receiver, env.sender, std::move(payload),
                    tick, env.msg_id);
      break;
    }
    case MessageKind::ProgressResponse: {
      std::string view_id = env.payload["viewId"].get<std::string>();
      auto it = pending_views_.find(view_id);
      if (it == pending_views_.end()) {
        registry_.note("late-response", tick, ojson{{"viewId", view_id}, {"from", env.sender}});
        break;
      }
      ProgressEntry entry = progress_entry_from_json(env.payload["entry"]);
      entry.stale = tick - entry.as_of > cfg_.max_age;
      it->second.progress_entries[entry.domain] = std::move(entry);
      try_assemble(view_id, tick, false);
      break;
    }
    case MessageKind::MonitorQuery: {
      MonitorEntry entry = local_monitor_entry(env.receiver, tick);
      ojson payload;
      payload["viewId"] = env.payload["viewId"];
      ojson alarms = ojson::array();
      for (const simnet::Alarm& a : entry.alarms) alarms.push_back(simnet::alarm_to_json(a));
      payload["alarms"] = std::move(alarms);
      payload["asOf"] = entry.as_of;
      send_envelope(MessageKind::MonitorResponse, env.receiver, env.sender, std::move(payload),
                    tick, env.msg_id);
      break;
    }
    case MessageKind::MonitorResponse: {
      std::string view_id = env.payload["viewId"].get<std::string>();
      auto it = pending_views_.find(view_id);
      if (it == pending_views_.end()) {
        registry_.note("late-response", tick, ojson{{"viewId", view_id}, {"from", env.sender}});
        break;
      }
      MonitorEntry entry;
      entry.domain = env.sender;
      entry.responded = true;
      entry.as_of = env.payload["asOf"].get<Tick>();
      entry.stale = tick - entry.as_of > cfg_.max_age;
      for (const ojson& a : env.payload["alarms"]) {
        simnet::Alarm alarm;
        alarm.symptom = faultmodel::symptom_from_json(a.at("symptom"));
        alarm.since = a.at("since").get<Tick>();
        entry.alarms.push_back(std::move(alarm));
      }
      it->second.monitor_entries[entry.domain] = std::move(entry);
      try_assemble(view_id, tick, false);
      break;
    }
    case MessageKind::ReportRequest: {
      StatisticsRow row = local_statistics_row(env.receiver, env.payload["from"].get<Tick>(),
                                               env.payload["to"].get<Tick>());
      ojson payload;
      payload["viewId"] = env.payload["viewId"];
      payload["row"] = stat_row_to_json(row);
      send_envelope(MessageKind::ReportResponse, env.receiver, env.sender, std::move(payload),
                    tick, env.msg_id);
      break;
    }
    case MessageKind::ReportResponse: {
      std::string view_id = env.payload["viewId"].get<std::string>();
      auto it = pending_views_.find(view_id);
      if (it == pending_views_.end()) {
        registry_.note("late-response", tick, ojson{{"viewId", view_id}, {"from", env.sender}});
        break;
      }
      it->second.stat_rows[env.sender] = stat_row_from_json(env.payload["row"]);
      try_assemble(view_id, tick, false);
      break;
    }
    case MessageKind::FalsePositiveQuery: {
      FaultId f = env.payload["faultId"].get<std::string>();
      const FaultRecord* rec = registry_.find(f);
      if (rec != nullptr) apply_fp_verdict(f, tick);
      ojson payload;
      payload["faultId"] = f;
      payload["verdict"] =
          rec == nullptr ? "unknown-fault"
                         : faultmodel::fp_mark_name(registry_.find(f)->false_positive);
      send_envelope(MessageKind::FalsePositiveResponse, env.receiver, env.sender,
                    std::move(payload), tick, env.msg_id);
      break;
    }
    case MessageKind::FalsePositiveResponse: {
      if (env.correlation_id) pending_correlation_.erase(*env.correlation_id);
      registry_.note("fp-verdict-received", tick,
                     ojson{{"faultId", env.payload["faultId"]},
                           {"verdict", env.payload["verdict"]}});
      break;
    }
    case MessageKind::DataChangeRequest: {
      FaultId f = env.payload["faultId"].get<std::string>();
      ojson payload;
      payload["faultId"] = f;
      try {
        DataPatch patch = patch_from_json(env.payload["patch"]);
        data_change(env.receiver, f, patch, tick);
        payload["accepted"] = true;
      } catch (const Error& e) {
        payload["accepted"] = false;
        payload["reason"] = e.what();
      }
      send_envelope(MessageKind::DataChangeAck, env.receiver, env.sender, std::move(payload), tick,
                    env.msg_id);
      break;
    }
    case MessageKind::DataChangeAck: {
      if (env.correlation_id) pending_correlation_.erase(*env.correlation_id);
      registry_.note("data-change-ack", tick,
                     ojson{{"faultId", env.payload["faultId"]},
                           {"accepted", env.payload["accepted"]}});
      break;
    }
    case MessageKind::Subscribe: {
      protocol::Subscription s;
      s.subscriber = env.sender;
      s.publisher = env.receiver;
      s.topic = env.payload["topic"].get<std::string>();
      s.since = tick;
      try {
        subs_.add(s);
        registry_.note("subscribed", tick,
                       ojson{{"subscriber", s.subscriber}, {"publisher", s.publisher},
                             {"topic", s.topic}});
      } catch (const Error& e) {
        registry_.note("subscribe-rejected", tick, ojson{{"reason", e.what()}});
      }
      break;
    }
    case MessageKind::Notify: {
      // push consumers fold fault-status events into their local view
      bool stale = tick - env.payload["asOf"].get<Tick>() > cfg_.max_age;
      if (env.payload["topic"] == "fault-status" && !stale) {
        const ojson& event = env.payload["event"];
        if (event.contains("faultId") && event.contains("state"))
          notify_state_[env.receiver][event["faultId"].get<std::string>()] =
              event["state"].get<std::string>();
      }
      if (stale)
        registry_.note("stale-notify", tick,
                       ojson{{"receiver", env.receiver}, {"asOf", env.payload["asOf"]}});
      break;
    }
    case MessageKind::EscalationNotice: {
      registry_.note("escalation-notice", tick,
                     ojson{{"faultId", env.payload["faultId"]}, {"domain", env.receiver}});
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// view assembly
// ---------------------------------------------------------------------------

void Engine::try_assemble(const std::string& view_id, Tick tick, bool deadline) {
  auto it = pending_views_.find(view_id);
  if (it == pending_views_.end()) return;
  PendingView& pv = it->second;

  std::size_t got = 0;
  for (const DomainId& d : pv.expected) {
    if (pv.use_case == UseCase::R01 ? pv.stat_rows.count(d) > 0
        : (pv.use_case == UseCase::P01 || pv.use_case == UseCase::P02)
            ? pv.progress_entries.count(d) > 0
            : pv.monitor_entries.count(d) > 0)
      got++;
  }
  bool complete = got == pv.expected.size();
  if (!complete && !deadline) return;

  switch (pv.use_case) {
    case UseCase::M01:
    case UseCase::M02:
    case UseCase::M03: {
      MonitoringView view;
      view.view_id = pv.view_id;
      view.scope_kind = pv.scope_kind;
      view.scope_id = pv.scope_id;
      view.requester = pv.requester;
      view.requested_at = pv.requested_at;
      view.assembled_at = tick;
      for (const DomainId& d : pv.expected) {
        if (!pv.monitor_entries.count(d)) {
          MonitorEntry missing;
          missing.domain = d;
          missing.responded = false;
          pv.monitor_entries[d] = std::move(missing);
          view.partial = true;
        }
      }
      for (auto& [d, e] : pv.monitor_entries) view.entries.push_back(e);
      monitoring_views_.push_back(std::move(view));
      tag_row(use_case_name(pv.use_case), tick);
      log_use_case(use_case_name(pv.use_case), tick,
                   monitoring_views_.back().partial ? "partial" : "completed",
                   ojson{{"viewId", pv.view_id}, {"entries", monitoring_views_.back().entries.size()}});
      break;
    }
    case UseCase::P01:
    case UseCase::P02: {
      ProgressView view;
      view.view_id = pv.view_id;
      view.scope = pv.scope_kind;
      view.requester = pv.requester;
      if (pv.scope_id != "all") view.target = pv.scope_id;
      view.requested_at = pv.requested_at;
      view.assembled_at = tick;
      for (const DomainId& d : pv.expected) {
        if (!pv.progress_entries.count(d)) {
          ProgressEntry missing;
          missing.domain = d;
          missing.responded = false;
          pv.progress_entries[d] = std::move(missing);
        }
      }
      for (auto& [d, e] : pv.progress_entries) view.entries.push_back(e);
      progress_views_.push_back(std::move(view));
      tag_row(use_case_name(pv.use_case), tick);
      log_use_case(use_case_name(pv.use_case), tick, complete ? "completed" : "partial",
                   ojson{{"viewId", pv.view_id}, {"entries", progress_views_.back().entries.size()}});
      break;
    }
    case UseCase::R01: {
      StatisticsReport rep;
      rep.from = pv.from;
      rep.to = pv.to;
      rep.assembled_at = tick;
      for (const DomainId& d : pv.expected) {
        if (!pv.stat_rows.count(d)) {
          StatisticsRow missing;
          missing.domain = d;
          missing.responded = false;
          pv.stat_rows[d] = std::move(missing);
          rep.incomplete = true;
        }
      }
      for (auto& [d, row] : pv.stat_rows) rep.rows.push_back(row);
      std::sort(rep.rows.begin(), rep.rows.end(),
                [](const StatisticsRow& a, const StatisticsRow& b) { return a.domain < b.domain; });
      statistics_reports_.push_back(std::move(rep));
      tag_row("R01", tick);
      log_use_case("R01", tick, statistics_reports_.back().incomplete ? "incomplete" : "completed",
                   ojson{{"viewId", pv.view_id}, {"rows", statistics_reports_.back().rows.size()}});
      break;
    }
    default:
      break;
  }
  pending_views_.erase(it);
}

// ---------------------------------------------------------------------------
// finalize and state access
// ---------------------------------------------------------------------------

void Engine::record_rejection(const std::string& activity, Tick tick, const std::string& code,
                              ojson detail) {
  ojson data;
  data["activity"] = activity;
  data["code"] = code;
  data["detail"] = detail;
  registry_.note("action-rejected", tick, std::move(data));
  log_use_case(activity, tick, code, std::move(detail));
}

void Engine::finalize(Tick horizon) {
  if (plot_data_.is_null()) {
    ojson bundle;
    bundle["statistics"] = statistics_to_json(
        statistics_reports_.empty() ? offline_statistics(0, horizon) : statistics_reports_.back());
    bundle["qos"] = qos_to_json(qos_reports_.empty() ? compute_qos(horizon) : qos_reports_.back());
    bundle["trend"] = trend_to_json(trend_reports_.empty() ? compute_trend(0, horizon)
                                                           : trend_reports_.back());
    plot_data_ = std::move(bundle);
  }
}

std::optional<FaultId> Engine::find_fault_by_service(const ServiceId& s) const {
  const std::vector<FaultId>& ids = registry_.by_service(s);
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    const FaultRecord* rec = registry_.find(*it);
    if (rec != nullptr && rec->state != LifecycleState::Closed) return *it;
  }
  return ids.empty() ? std::nullopt : std::optional<FaultId>{ids.back()};
}

std::optional<FaultId> Engine::find_fault_by_origin(const DomainId& d) const {
  const std::vector<FaultId>& ids = registry_.by_domain(d);
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    const FaultRecord* rec = registry_.find(*it);
    if (rec != nullptr && rec->state != LifecycleState::Closed) return *it;
  }
  return ids.empty() ? std::nullopt : std::optional<FaultId>{ids.back()};
}

std::set<std::pair<std::string, std::string>> Engine::observed_coverage() const {
  std::set<std::pair<std::string, std::string>> out;
  for (const AuditEvent& e : registry_.audit())
    if (e.type == "usecase-phase")
      out.emplace(e.data.at("useCase").get<std::string>(), e.data.at("phase").get<std::string>());
  return out;
}

} // namespace iofm::engine

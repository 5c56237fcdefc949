#include "iofm/fault.hpp"

#include <algorithm>

namespace iofm::faultmodel {

const char* symptom_scope_name(SymptomScope s) {
  return s == SymptomScope::component ? "component" : "service";
}

SymptomScope symptom_scope_from_name(const std::string& name) {
  if (name == "component") return SymptomScope::component;
  if (name == "service") return SymptomScope::service;
  raise(Errc::parse_error, "unknown symptom scope '" + name + "'");
}

std::string Symptom::signature() const {
  return std::string(symptom_scope_name(scope)) + "|" + target + "|" + deviation;
}

bool symptom_less(const Symptom& a, const Symptom& b) {
  if (a.scope != b.scope) return a.scope < b.scope;
  if (a.target != b.target) return a.target < b.target;
  return a.deviation < b.deviation;
}

ojson symptom_to_json(const Symptom& s) {
  ojson j;
  j["scope"] = symptom_scope_name(s.scope);
  j["target"] = s.target;
  j["deviation"] = s.deviation;
  j["observed"] = s.observed ? metrics_to_json(*s.observed) : ojson(nullptr);
  return j;
}

Symptom symptom_from_json(const ojson& j) {
  Symptom s;
  s.scope = symptom_scope_from_name(j.at("scope").get<std::string>());
  s.target = j.at("target").get<std::string>();
  s.deviation = j.value("deviation", std::string{});
  if (j.contains("observed") && !j["observed"].is_null())
    s.observed = metrics_from_json(j["observed"]);
  return s;
}

const char* history_kind_name(HistoryKind k) {
  switch (k) {
    case HistoryKind::transition: return "transition";
    case HistoryKind::annotation: return "annotation";
    case HistoryKind::confirmation: return "confirmation";
  }
  return "?";
}

HistoryKind history_kind_from_name(const std::string& name) {
  if (name == "transition") return HistoryKind::transition;
  if (name == "annotation") return HistoryKind::annotation;
  if (name == "confirmation") return HistoryKind::confirmation;
  raise(Errc::parse_error, "unknown history kind '" + name + "'");
}

ojson history_event_to_json(const HistoryEvent& e) {
  ojson j;
  j["tick"] = e.tick;
  j["kind"] = history_kind_name(e.kind);
  j["actorRole"] = orgmodel::role_name(e.actor_role);
  j["actorDomain"] = e.actor_domain;
  j["from"] = state_name(e.from);
  j["to"] = state_name(e.to);
  j["note"] = e.note;
  return j;
}

HistoryEvent history_event_from_json(const ojson& j) {
  HistoryEvent e;
  e.tick = j.at("tick").get<Tick>();
  e.kind = history_kind_from_name(j.at("kind").get<std::string>());
  e.actor_role = orgmodel::role_from_name(j.at("actorRole").get<std::string>());
  e.actor_domain = j.at("actorDomain").get<std::string>();
  e.from = state_from_name(j.at("from").get<std::string>());
  e.to = state_from_name(j.at("to").get<std::string>());
  e.note = j.value("note", std::string{});
  return e;
}

const char* fp_mark_name(FalsePositiveMark m) {
  switch (m) {
    case FalsePositiveMark::unknown: return "unknown";
    case FalsePositiveMark::confirmed_false: return "confirmed-false";
    case FalsePositiveMark::confirmed_real: return "confirmed-real";
  }
  return "?";
}

FalsePositiveMark fp_mark_from_name(const std::string& name) {
  if (name == "unknown") return FalsePositiveMark::unknown;
  if (name == "confirmed-false") return FalsePositiveMark::confirmed_false;
  if (name == "confirmed-real") return FalsePositiveMark::confirmed_real;
  raise(Errc::parse_error, "unknown false-positive mark '" + name + "'");
}

namespace {

ojson record_body_json(const FaultRecord& r) {
  ojson j;
  j["faultId"] = r.fault_id;
  j["originDomain"] = r.origin_domain;
  j["reporterRole"] = orgmodel::role_name(r.reporter_role);
  j["suspectedService"] = r.suspected_service ? ojson(*r.suspected_service) : ojson(nullptr);
  ojson symptoms = ojson::array();
  for (const Symptom& s : r.symptoms) symptoms.push_back(symptom_to_json(s));
  j["symptoms"] = std::move(symptoms);
  j["state"] = state_name(r.state);
  j["isFalsePositive"] = fp_mark_name(r.false_positive);
  j["createdAt"] = r.created_at;
  j["updatedAt"] = r.updated_at;
  ojson history = ojson::array();
  for (const HistoryEvent& e : r.history) history.push_back(history_event_to_json(e));
  j["history"] = std::move(history);
  return j;
}

} // namespace

ojson record_to_json(const FaultRecord& r) {
  ojson j = record_body_json(r);
  j["integrityTag"] = r.integrity_tag;
  return j;
}

std::string canonical_json(const FaultRecord& r) { return record_to_json(r).dump(); }

FaultRecord record_from_json(const ojson& j) {
  FaultRecord r;
  r.fault_id = j.at("faultId").get<std::string>();
  r.origin_domain = j.at("originDomain").get<std::string>();
  r.reporter_role = orgmodel::role_from_name(j.at("reporterRole").get<std::string>());
  if (j.contains("suspectedService") && !j["suspectedService"].is_null())
    r.suspected_service = j["suspectedService"].get<std::string>();
  for (const ojson& s : j.at("symptoms")) r.symptoms.push_back(symptom_from_json(s));
  r.state = state_from_name(j.at("state").get<std::string>());
  r.false_positive = fp_mark_from_name(j.at("isFalsePositive").get<std::string>());
  r.created_at = j.at("createdAt").get<Tick>();
  r.updated_at = j.at("updatedAt").get<Tick>();
  for (const ojson& e : j.at("history")) r.history.push_back(history_event_from_json(e));
  r.integrity_tag = j.value("integrityTag", std::string{});
  return r;
}

std::string compute_integrity_tag(const FaultRecord& r) {
  return checksum_hex(record_body_json(r).dump());
}

void refresh_integrity_tag(FaultRecord& r) { r.integrity_tag = compute_integrity_tag(r); }

bool integrity_ok(const FaultRecord& r) { return r.integrity_tag == compute_integrity_tag(r); }

FaultRecord open_record(FaultId id, DomainId origin, orgmodel::RoleKind reporter,
                        std::optional<ServiceId> suspected, std::vector<Symptom> symptoms,
                        Tick tick) {
  FaultRecord r;
  r.fault_id = std::move(id);
  r.origin_domain = std::move(origin);
  r.reporter_role = reporter;
  r.suspected_service = std::move(suspected);
  r.symptoms = std::move(symptoms);
  std::sort(r.symptoms.begin(), r.symptoms.end(), symptom_less);
  r.symptoms.erase(std::unique(r.symptoms.begin(), r.symptoms.end()), r.symptoms.end());
  r.state = LifecycleState::Detected;
  r.created_at = tick;
  r.updated_at = tick;
  r.history.push_back(HistoryEvent{tick, HistoryKind::annotation, reporter, r.origin_domain,
                                   r.state, r.state, "opened"});
  refresh_integrity_tag(r);
  return r;
}

namespace {

void check_readable(const FaultRecord& r) {
  if (!integrity_ok(r))
    raise(Errc::validation_failed, "integrity tag mismatch on fault '" + r.fault_id + "'");
}

FaultRecord with_event(const FaultRecord& base, HistoryEvent ev) {
  FaultRecord next = base;
  next.updated_at = ev.tick;
  next.history.push_back(std::move(ev));
  refresh_integrity_tag(next);
  return next;
}

} // namespace

FaultRecord transition(const FaultRecord& record, LifecycleState to,
                       const orgmodel::RoleBinding& actor, Tick tick) {
  check_readable(record);
  if (!transition_allowed(record.state, to))
    raise(Errc::illegal_transition, std::string("no transition ") + state_name(record.state) +
                                        " -> " + state_name(to));
  if (tick < record.updated_at)
    raise(Errc::stale_tick, "transition tick " + std::to_string(tick) + " precedes last update " +
                                std::to_string(record.updated_at));
  FaultRecord next = with_event(
      record, HistoryEvent{tick, HistoryKind::transition, actor.role, actor.domain, record.state,
                           to, ""});
  next.state = to;
  refresh_integrity_tag(next);
  return next;
}

FaultRecord annotate(const FaultRecord& record, const std::string& note,
                     const orgmodel::RoleBinding& actor, Tick tick) {
  check_readable(record);
  if (tick < record.updated_at) raise(Errc::stale_tick, "annotation precedes last update");
  return with_event(record, HistoryEvent{tick, HistoryKind::annotation, actor.role, actor.domain,
                                         record.state, record.state, note});
}

FaultRecord confirm_false_positive(const FaultRecord& record, FalsePositiveMark verdict,
                                   const orgmodel::RoleBinding& actor, Tick tick) {
  check_readable(record);
  if (verdict == FalsePositiveMark::unknown)
    raise(Errc::precondition_failed, "cannot confirm verdict 'unknown'");
  if (tick < record.updated_at) raise(Errc::stale_tick, "confirmation precedes last update");
  FaultRecord next = with_event(
      record, HistoryEvent{tick, HistoryKind::confirmation, actor.role, actor.domain, record.state,
                           record.state, fp_mark_name(verdict)});
  next.false_positive = verdict;
  refresh_integrity_tag(next);
  return next;
}

FaultRecord add_symptom(const FaultRecord& record, const Symptom& symptom,
                        const orgmodel::RoleBinding& actor, Tick tick) {
  check_readable(record);
  if (tick < record.updated_at) raise(Errc::stale_tick, "symptom update precedes last update");
  FaultRecord next = with_event(record, HistoryEvent{tick, HistoryKind::annotation, actor.role,
                                                     actor.domain, record.state, record.state,
                                                     "symptom:" + symptom.signature()});
  next.symptoms.push_back(symptom);
  std::sort(next.symptoms.begin(), next.symptoms.end(), symptom_less);
  next.symptoms.erase(std::unique(next.symptoms.begin(), next.symptoms.end()),
                      next.symptoms.end());
  refresh_integrity_tag(next);
  return next;
}

} // namespace iofm::faultmodel

#include "iofm/registry.hpp"

#include <algorithm>

namespace iofm::engine {

ojson audit_event_to_json(const AuditEvent& e) {
  ojson j;
  j["index"] = e.index;
  j["tick"] = e.tick;
  j["type"] = e.type;
  j["data"] = e.data;
  return j;
}

AuditEvent audit_event_from_json(const ojson& j) {
  AuditEvent e;
  e.index = j.at("index").get<std::uint64_t>();
  e.tick = j.at("tick").get<Tick>();
  e.type = j.at("type").get<std::string>();
  e.data = j.at("data");
  return e;
}

DataPatch patch_from_json(const ojson& j) {
  DataPatch p;
  if (!j.is_object()) raise(Errc::validation_failed, "patch must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "suspectedService") {
      p.suspected_service =
          value.is_null() ? std::optional<ServiceId>{} : std::optional<ServiceId>{value.get<std::string>()};
    } else if (key == "annotation") {
      p.annotation = value.get<std::string>();
    } else if (key == "addSymptom") {
      p.add_symptom = faultmodel::symptom_from_json(value);
    } else if (key == "state" || key == "history" || key == "integrityTag" || key == "faultId" ||
               key == "createdAt" || key == "updatedAt" || key == "originDomain") {
      raise(Errc::validation_failed, "patch touches immutable field '" + key + "'");
    } else {
      raise(Errc::validation_failed, "unknown patch field '" + key + "'");
    }
  }
  return p;
}

ojson patch_to_json(const DataPatch& p) {
  ojson j = ojson::object();
  if (p.suspected_service)
    j["suspectedService"] = *p.suspected_service ? ojson(**p.suspected_service) : ojson(nullptr);
  if (p.annotation) j["annotation"] = *p.annotation;
  if (p.add_symptom) j["addSymptom"] = faultmodel::symptom_to_json(*p.add_symptom);
  return j;
}

const faultmodel::FaultRecord* FaultRegistry::find(const FaultId& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

faultmodel::FaultRecord& FaultRegistry::must_find(const FaultId& id) {
  auto it = records_.find(id);
  if (it == records_.end()) raise(Errc::invalid_reference, "unknown fault '" + id + "'");
  return it->second;
}

const std::vector<FaultId>& FaultRegistry::by_domain(const DomainId& d) const {
  static const std::vector<FaultId> empty;
  auto it = by_domain_.find(d);
  return it == by_domain_.end() ? empty : it->second;
}

const std::vector<FaultId>& FaultRegistry::by_service(const ServiceId& s) const {
  static const std::vector<FaultId> empty;
  auto it = by_service_.find(s);
  return it == by_service_.end() ? empty : it->second;
}

void FaultRegistry::append_audit(const std::string& type, Tick tick, ojson data) {
  AuditEvent e;
  e.index = audit_.size();
  e.tick = tick;
  e.type = type;
  e.data = std::move(data);
  audit_.push_back(std::move(e));
}

void FaultRegistry::reindex(const faultmodel::FaultRecord& before,
                            const faultmodel::FaultRecord& after) {
  if (before.suspected_service == after.suspected_service) return;
  if (before.suspected_service) {
    auto& list = by_service_[*before.suspected_service];
    list.erase(std::remove(list.begin(), list.end(), before.fault_id), list.end());
  }
  if (after.suspected_service) by_service_[*after.suspected_service].push_back(after.fault_id);
}

void FaultRegistry::open(const faultmodel::FaultRecord& record, Tick tick) {
  if (records_.count(record.fault_id))
    raise(Errc::misuse, "fault '" + record.fault_id + "' already open");
  if (!faultmodel::integrity_ok(record))
    raise(Errc::validation_failed, "refusing to open record with bad integrity tag");
  records_.emplace(record.fault_id, record);
  by_domain_[record.origin_domain].push_back(record.fault_id);
  if (record.suspected_service) by_service_[*record.suspected_service].push_back(record.fault_id);
  ojson data;
  data["record"] = faultmodel::record_to_json(record);
  append_audit("fault-opened", tick, std::move(data));
}

namespace {

ojson actor_json(const orgmodel::RoleBinding& actor) {
  ojson j;
  j["role"] = orgmodel::role_name(actor.role);
  j["domain"] = actor.domain;
  return j;
}

orgmodel::RoleBinding actor_from_json(const ojson& j) {
  orgmodel::RoleBinding b;
  b.role = orgmodel::role_from_name(j.at("role").get<std::string>());
  b.domain = j.at("domain").get<std::string>();
  return b;
}

faultmodel::FaultRecord patched(const faultmodel::FaultRecord& base, const DataPatch& patch,
                                const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord next = base;
  std::string description = "data-change";
  if (patch.suspected_service) {
    next.suspected_service = *patch.suspected_service;
    description += ";suspectedService=" +
                   (patch.suspected_service->has_value() ? **patch.suspected_service : "null");
  }
  if (patch.add_symptom) {
    next.symptoms.push_back(*patch.add_symptom);
    std::sort(next.symptoms.begin(), next.symptoms.end(), faultmodel::symptom_less);
    next.symptoms.erase(std::unique(next.symptoms.begin(), next.symptoms.end()),
                        next.symptoms.end());
    description += ";addSymptom=" + patch.add_symptom->signature();
  }
  if (patch.annotation) description += ";note=" + *patch.annotation;
  return faultmodel::annotate(next, description, actor, tick);
}

} // namespace

void FaultRegistry::apply_transition(const FaultId& id, faultmodel::LifecycleState to,
                                     const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord& rec = must_find(id);
  rec = faultmodel::transition(rec, to, actor, tick);
  ojson data;
  data["faultId"] = id;
  data["to"] = faultmodel::state_name(to);
  data["actor"] = actor_json(actor);
  append_audit("transition", tick, std::move(data));
}

void FaultRegistry::apply_annotation(const FaultId& id, const std::string& note,
                                     const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord& rec = must_find(id);
  rec = faultmodel::annotate(rec, note, actor, tick);
  ojson data;
  data["faultId"] = id;
  data["note"] = note;
  data["actor"] = actor_json(actor);
  append_audit("annotation", tick, std::move(data));
}

void FaultRegistry::apply_confirmation(const FaultId& id, faultmodel::FalsePositiveMark verdict,
                                       const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord& rec = must_find(id);
  rec = faultmodel::confirm_false_positive(rec, verdict, actor, tick);
  ojson data;
  data["faultId"] = id;
  data["verdict"] = faultmodel::fp_mark_name(verdict);
  data["actor"] = actor_json(actor);
  append_audit("confirmation", tick, std::move(data));
}

void FaultRegistry::apply_symptom(const FaultId& id, const faultmodel::Symptom& s,
                                  const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord& rec = must_find(id);
  rec = faultmodel::add_symptom(rec, s, actor, tick);
  ojson data;
  data["faultId"] = id;
  data["symptom"] = faultmodel::symptom_to_json(s);
  data["actor"] = actor_json(actor);
  append_audit("symptom-attached", tick, std::move(data));
}

void FaultRegistry::apply_patch(const FaultId& id, const DataPatch& patch,
                                const orgmodel::RoleBinding& actor, Tick tick) {
  faultmodel::FaultRecord& rec = must_find(id);
  faultmodel::FaultRecord before = rec;
  faultmodel::FaultRecord next = patched(before, patch, actor, tick);
  reindex(before, next);
  rec = next;

  ojson data;
  data["faultId"] = id;
  data["patch"] = patch_to_json(patch);
  data["actor"] = actor_json(actor);
  data["digestBefore"] = before.integrity_tag;
  data["digestAfter"] = rec.integrity_tag;
  append_audit("patch", tick, std::move(data));
}

void FaultRegistry::note(const std::string& type, Tick tick, ojson data) {
  append_audit(type, tick, std::move(data));
}

std::string FaultRegistry::canonical_json() const {
  ojson j;
  ojson faults = ojson::array();
  for (const auto& [id, rec] : records_) faults.push_back(faultmodel::record_to_json(rec));
  j["faults"] = std::move(faults);
  return j.dump();
}

FaultRegistry FaultRegistry::replay(std::span<const AuditEvent> events) {
  FaultRegistry out;
  for (const AuditEvent& e : events) {
    if (e.type == "fault-opened") {
      faultmodel::FaultRecord rec = faultmodel::record_from_json(e.data.at("record"));
      out.records_.emplace(rec.fault_id, rec);
      out.by_domain_[rec.origin_domain].push_back(rec.fault_id);
      if (rec.suspected_service) out.by_service_[*rec.suspected_service].push_back(rec.fault_id);
    } else if (e.type == "transition") {
      faultmodel::FaultRecord& rec = out.must_find(e.data.at("faultId").get<std::string>());
      rec = faultmodel::transition(rec, faultmodel::state_from_name(e.data.at("to").get<std::string>()),
                                   actor_from_json(e.data.at("actor")), e.tick);
    } else if (e.type == "annotation") {
      faultmodel::FaultRecord& rec = out.must_find(e.data.at("faultId").get<std::string>());
      rec = faultmodel::annotate(rec, e.data.at("note").get<std::string>(),
                                 actor_from_json(e.data.at("actor")), e.tick);
    } else if (e.type == "confirmation") {
      faultmodel::FaultRecord& rec = out.must_find(e.data.at("faultId").get<std::string>());
      rec = faultmodel::confirm_false_positive(
          rec, faultmodel::fp_mark_from_name(e.data.at("verdict").get<std::string>()),
          actor_from_json(e.data.at("actor")), e.tick);
    } else if (e.type == "symptom-attached") {
      faultmodel::FaultRecord& rec = out.must_find(e.data.at("faultId").get<std::string>());
      rec = faultmodel::add_symptom(rec, faultmodel::symptom_from_json(e.data.at("symptom")),
                                    actor_from_json(e.data.at("actor")), e.tick);
    } else if (e.type == "patch") {
      FaultId id = e.data.at("faultId").get<std::string>();
      faultmodel::FaultRecord before = out.must_find(id);
      faultmodel::FaultRecord next = patched(before, patch_from_json(e.data.at("patch")),
                                             actor_from_json(e.data.at("actor")), e.tick);
      out.reindex(before, next);
      out.must_find(id) = next;
    }
    // every other event type is a non-mutating note
  }
  return out;
}

} // namespace iofm::engine

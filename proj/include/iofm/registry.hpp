#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iofm/fault.hpp"

namespace iofm::engine {

struct AuditEvent {
  std::uint64_t index{0};
  Tick tick{0};
  std::string type;
  ojson data;
};

ojson audit_event_to_json(const AuditEvent& e);
AuditEvent audit_event_from_json(const ojson& j);

// Controlled patch surface for FM data changes: only the suspected service
// and free-text annotations are mutable; state and history are not.
struct DataPatch {
  std::optional<std::optional<ServiceId>> suspected_service;
  std::optional<std::string> annotation;
  std::optional<faultmodel::Symptom> add_symptom;
};

DataPatch patch_from_json(const ojson& j);
ojson patch_to_json(const DataPatch& p);

// The single authoritative fault store of a simulation. Every mutation
// appends exactly one audit event; replaying the audit log reconstructs the
// registry exactly.
class FaultRegistry {
 public:
  const std::map<FaultId, faultmodel::FaultRecord>& records() const { return records_; }
  const faultmodel::FaultRecord* find(const FaultId& id) const;
  const std::vector<FaultId>& by_domain(const DomainId& d) const;
  const std::vector<FaultId>& by_service(const ServiceId& s) const;

  void open(const faultmodel::FaultRecord& record, Tick tick);
  void apply_transition(const FaultId& id, faultmodel::LifecycleState to,
                        const orgmodel::RoleBinding& actor, Tick tick);
  void apply_annotation(const FaultId& id, const std::string& note,
                        const orgmodel::RoleBinding& actor, Tick tick);
  void apply_confirmation(const FaultId& id, faultmodel::FalsePositiveMark verdict,
                          const orgmodel::RoleBinding& actor, Tick tick);
  void apply_symptom(const FaultId& id, const faultmodel::Symptom& s,
                     const orgmodel::RoleBinding& actor, Tick tick);
  void apply_patch(const FaultId& id, const DataPatch& patch, const orgmodel::RoleBinding& actor,
                   Tick tick);

  // Non-mutating audit note (use-case phase tags, integrity violations,
  // provenance, search traces). Ignored by replay.
  void note(const std::string& type, Tick tick, ojson data);

  const std::vector<AuditEvent>& audit() const { return audit_; }

  // Canonical registry serialization: records sorted by fault id.
  std::string canonical_json() const;

  static FaultRegistry replay(std::span<const AuditEvent> events);

 private:
  void append_audit(const std::string& type, Tick tick, ojson data);
  faultmodel::FaultRecord& must_find(const FaultId& id);
  void reindex(const faultmodel::FaultRecord& before, const faultmodel::FaultRecord& after);

  std::map<FaultId, faultmodel::FaultRecord> records_;
  std::map<DomainId, std::vector<FaultId>> by_domain_;
  std::map<ServiceId, std::vector<FaultId>> by_service_;
  std::vector<AuditEvent> audit_;
};

} // namespace iofm::engine

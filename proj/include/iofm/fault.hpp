#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iofm/errors.hpp"
#include "iofm/ids.hpp"
#include "iofm/jsonio.hpp"
#include "iofm/lifecycle.hpp"
#include "iofm/metrics.hpp"
#include "iofm/roles.hpp"

namespace iofm::faultmodel {

enum class SymptomScope { component, service };

const char* symptom_scope_name(SymptomScope s);
SymptomScope symptom_scope_from_name(const std::string& name);

struct Symptom {
  SymptomScope scope{SymptomScope::component};
  std::string target; // ComponentId or ServiceId
  std::string deviation;
  std::optional<MetricVector> observed;

  bool operator==(const Symptom&) const = default;

  // Stable lookup key for dedup and known-error matching.
  std::string signature() const;
};

bool symptom_less(const Symptom& a, const Symptom& b);
ojson symptom_to_json(const Symptom& s);
Symptom symptom_from_json(const ojson& j);

enum class HistoryKind { transition, annotation, confirmation };

const char* history_kind_name(HistoryKind k);
HistoryKind history_kind_from_name(const std::string& name);

struct HistoryEvent {
  Tick tick{0};
  HistoryKind kind{HistoryKind::transition};
  orgmodel::RoleKind actor_role{orgmodel::RoleKind::DFM};
  DomainId actor_domain;
  LifecycleState from{LifecycleState::Detected};
  LifecycleState to{LifecycleState::Detected};
  std::string note;

  bool operator==(const HistoryEvent&) const = default;
};

ojson history_event_to_json(const HistoryEvent& e);
HistoryEvent history_event_from_json(const ojson& j);

enum class FalsePositiveMark { unknown, confirmed_false, confirmed_real };

const char* fp_mark_name(FalsePositiveMark m);
FalsePositiveMark fp_mark_from_name(const std::string& name);

// The canonical inter-domain fault record. History is append-only and totally
// ordered by tick; updatedAt always equals the tick of the last history entry.
// integrityTag is a checksum over the canonical serialization of all other
// fields and must verify on every read.
struct FaultRecord {
  FaultId fault_id;
  DomainId origin_domain;
  orgmodel::RoleKind reporter_role{orgmodel::RoleKind::User};
  std::optional<ServiceId> suspected_service;
  std::vector<Symptom> symptoms; // kept sorted canonically
  LifecycleState state{LifecycleState::Detected};
  FalsePositiveMark false_positive{FalsePositiveMark::unknown};
  Tick created_at{0};
  Tick updated_at{0};
  std::vector<HistoryEvent> history;
  std::string integrity_tag;

  LifecyclePhase phase() const { return phase_of(state); }

  bool operator==(const FaultRecord&) const = default;
};

// Canonical serialization, fixed key order: faultId, originDomain,
// reporterRole, suspectedService, symptoms, state, isFalsePositive,
// createdAt, updatedAt, history, integrityTag.
ojson record_to_json(const FaultRecord& r);
std::string canonical_json(const FaultRecord& r);
FaultRecord record_from_json(const ojson& j);

std::string compute_integrity_tag(const FaultRecord& r);
void refresh_integrity_tag(FaultRecord& r);
bool integrity_ok(const FaultRecord& r);

// Creates a fresh Detected record with sorted symptoms, an opening history
// entry and a valid integrity tag.
FaultRecord open_record(FaultId id, DomainId origin, orgmodel::RoleKind reporter,
                        std::optional<ServiceId> suspected, std::vector<Symptom> symptoms,
                        Tick tick);

// State-machine step. Validates integrity, transition legality and tick
// ordering; returns a new record and leaves the input untouched. Actor
// authorization is enforced by the engine before this is called.
FaultRecord transition(const FaultRecord& record, LifecycleState to,
                       const orgmodel::RoleBinding& actor, Tick tick);

FaultRecord annotate(const FaultRecord& record, const std::string& note,
                     const orgmodel::RoleBinding& actor, Tick tick);

FaultRecord confirm_false_positive(const FaultRecord& record, FalsePositiveMark verdict,
                                   const orgmodel::RoleBinding& actor, Tick tick);

FaultRecord add_symptom(const FaultRecord& record, const Symptom& symptom,
                        const orgmodel::RoleBinding& actor, Tick tick);

} // namespace iofm::faultmodel

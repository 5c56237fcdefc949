#pragma once

#include <map>
#include <string>
#include <vector>

#include "iofm/fault.hpp"

namespace iofm::faultmodel {

// One renamed field of a domain's native trouble-ticket format. Unit factors
// are rational (local * num / den = canonical) so that a round trip through a
// non-lossy adapter is exact.
struct FieldMapEntry {
  std::string local_name;
  std::string canonical_name;
  std::int64_t unit_num{1};
  std::int64_t unit_den{1};
};

struct DomainFormatAdapter {
  std::string format_id;
  std::vector<FieldMapEntry> field_map;
  std::vector<std::string> lossy_fields; // canonical fields the local format cannot carry
};

// Flat key-value view of a fault record in a domain's native format.
using LocalDocument = std::map<std::string, std::string>;

struct OutboundResult {
  LocalDocument document;
  std::vector<std::string> dropped_fields;
};

struct InboundResult {
  FaultRecord record;
  std::string source_format; // provenance, logged to the audit trail by the engine
};

// Canonical flat field names an adapter may map. "owd"/"ipdv"/"loss"/
// "availability" address the observed metrics of the primary symptom, for
// local formats that carry flat measurements instead of structured symptoms.
const std::vector<std::string>& adapter_canonical_fields();

// Maps all canonical fields one-to-one with unit factor 1.
DomainFormatAdapter identity_adapter(std::string format_id = "canonical");

InboundResult convert_inbound(const DomainFormatAdapter& adapter, const LocalDocument& local);
OutboundResult convert_outbound(const DomainFormatAdapter& adapter, const FaultRecord& record);

// Structural sanity of an adapter: field map is a bijection, lossy fields are
// canonical names, unit factors are nonzero.
std::vector<std::string> validate_adapter(const DomainFormatAdapter& adapter);

} // namespace iofm::faultmodel

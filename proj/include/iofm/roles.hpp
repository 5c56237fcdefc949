#pragma once

#include <optional>
#include <string>

#include "iofm/ids.hpp"

namespace iofm::orgmodel {

// The fault-management roles. DFM coordinates a domain's fault handling, DFO
// executes isolation and repair inside the domain, DMS produces alarms, and
// GFCM coordinates across domains (permanent at the root in a hierarchy,
// per-fault in a heterarchy).
enum class RoleKind { User, ServiceProvider, DFM, DFO, GFCM, DMS };

const char* role_name(RoleKind r);
RoleKind role_from_name(const std::string& name);

struct RoleBinding {
  RoleKind role{RoleKind::User};
  DomainId domain;
  std::optional<FaultId> scope; // GFCM tenure in a heterarchy is per fault
  Tick since{0};

  bool operator==(const RoleBinding&) const = default;
};

} // namespace iofm::orgmodel

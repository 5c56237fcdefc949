#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iofm/fault.hpp"
#include "iofm/roles.hpp"
#include "iofm/topology.hpp"

namespace iofm::orgmodel {

enum class Capability { monitor, query_progress, report_data, change_fault_data };

const char* capability_name(Capability c);
Capability capability_from_name(const std::string& name);

struct Grant {
  DomainId requester;
  DomainId target;
  Capability capability{Capability::monitor};

  bool operator==(const Grant&) const = default;
};

class AccessPolicy {
 public:
  AccessPolicy() = default;
  explicit AccessPolicy(std::vector<Grant> grants) : grants_(std::move(grants)) {}

  bool has_grant(const DomainId& requester, const DomainId& target, Capability cap) const;
  const std::vector<Grant>& grants() const { return grants_; }

 private:
  std::vector<Grant> grants_;
};

enum class GfcmMode { root, per_fault };

const char* gfcm_mode_name(GfcmMode m);
GfcmMode gfcm_mode_from_name(const std::string& name);

struct GfcmPolicy {
  GfcmMode mode{GfcmMode::root};
  std::optional<DomainId> root; // explicit root; otherwise resolved from the topology
};

// Staffing and GFCM tenure bookkeeping. Every domain is staffed with exactly
// one DFM, DFO and DMS binding; GFCM is either a permanent binding at the
// hierarchy root or a per-fault tenure held from localization start until the
// record closes.
class RoleTable {
 public:
  struct Tenure {
    FaultId fault;
    DomainId domain;
    Tick start{0};
    std::optional<Tick> end;
  };

  void staff(const topology::ProviderNetwork& net, Tick tick = 0);

  bool staffed(const DomainId& d) const { return staffed_.count(d) > 0; }
  RoleBinding dfm(const DomainId& d) const { return staffed_binding(RoleKind::DFM, d); }
  RoleBinding dfo(const DomainId& d) const { return staffed_binding(RoleKind::DFO, d); }
  RoleBinding dms(const DomainId& d) const { return staffed_binding(RoleKind::DMS, d); }

  RoleBinding assign_gfcm(const topology::ProviderNetwork& net, const GfcmPolicy& policy,
                          const faultmodel::FaultRecord& fault, Tick tick);
  void release_gfcm(const FaultId& fault, Tick tick);

  // Pins the permanent GFCM holder of a root-mode network up front.
  void preset_root(const DomainId& d) { root_gfcm_ = d; }

  // Acting GFCM domain: for a specific fault when scoped, otherwise the
  // network-wide (root) holder if any.
  std::optional<DomainId> gfcm_domain(const std::optional<FaultId>& fault = std::nullopt) const;
  bool holds_gfcm(const DomainId& d, const std::optional<FaultId>& fault = std::nullopt) const;

  const std::vector<Tenure>& tenures() const { return tenures_; }

  static DomainId resolve_root(const topology::ProviderNetwork& net, const GfcmPolicy& policy);

 private:
  RoleBinding staffed_binding(RoleKind role, const DomainId& d) const;

  std::set<DomainId> staffed_;
  Tick staffed_at_{0};
  std::optional<DomainId> root_gfcm_;
  std::map<FaultId, DomainId> gfcm_active_;
  std::vector<Tenure> tenures_;
};

// Allow iff the requester targets itself, holds an explicit grant, or
// currently acts as GFCM and asks for monitor / query-progress / report-data.
bool check_access(const AccessPolicy& policy, const RoleTable& roles, const DomainId& requester,
                  const DomainId& target, Capability cap,
                  const std::optional<FaultId>& fault_ctx = std::nullopt);

// Static policy validation against the GFCM policy: change-fault-data is
// grantable only to the domain that can act as GFCM.
std::vector<std::string> validate_policy(const AccessPolicy& policy,
                                         const topology::ProviderNetwork& net,
                                         const GfcmPolicy& gfcm);

} // namespace iofm::orgmodel

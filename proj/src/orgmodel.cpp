#include "iofm/orgmodel.hpp"

#include <algorithm>

namespace iofm::orgmodel {

const char* role_name(RoleKind r) {
  switch (r) {
    case RoleKind::User: return "User";
    case RoleKind::ServiceProvider: return "ServiceProvider";
    case RoleKind::DFM: return "DFM";
    case RoleKind::DFO: return "DFO";
    case RoleKind::GFCM: return "GFCM";
    case RoleKind::DMS: return "DMS";
  }
  return "?";
}

RoleKind role_from_name(const std::string& name) {
  if (name == "User") return RoleKind::User;
  if (name == "ServiceProvider") return RoleKind::ServiceProvider;
  if (name == "DFM") return RoleKind::DFM;
  if (name == "DFO") return RoleKind::DFO;
  if (name == "GFCM") return RoleKind::GFCM;
  if (name == "DMS") return RoleKind::DMS;
  raise(Errc::parse_error, "unknown role '" + name + "'");
}

const char* capability_name(Capability c) {
  switch (c) {
    case Capability::monitor: return "monitor";
    case Capability::query_progress: return "query-progress";
    case Capability::report_data: return "report-data";
    case Capability::change_fault_data: return "change-fault-data";
  }
  return "?";
}

Capability capability_from_name(const std::string& name) {
  if (name == "monitor") return Capability::monitor;
  if (name == "query-progress") return Capability::query_progress;
  if (name == "report-data") return Capability::report_data;
  if (name == "change-fault-data") return Capability::change_fault_data;
  raise(Errc::parse_error, "unknown capability '" + name + "'");
}

bool AccessPolicy::has_grant(const DomainId& requester, const DomainId& target,
                             Capability cap) const {
  return std::any_of(grants_.begin(), grants_.end(), [&](const Grant& g) {
    return g.requester == requester && g.target == target && g.capability == cap;
  });
}

const char* gfcm_mode_name(GfcmMode m) { return m == GfcmMode::root ? "root" : "per-fault"; }

GfcmMode gfcm_mode_from_name(const std::string& name) {
  if (name == "root") return GfcmMode::root;
  if (name == "per-fault") return GfcmMode::per_fault;
  raise(Errc::parse_error, "unknown gfcm mode '" + name + "'");
}

void RoleTable::staff(const topology::ProviderNetwork& net, Tick tick) {
  staffed_.clear();
  for (const topology::Domain& d : net.domains()) staffed_.insert(d.id);
  staffed_at_ = tick;
}

RoleBinding RoleTable::staffed_binding(RoleKind role, const DomainId& d) const {
  if (!staffed_.count(d)) raise(Errc::invalid_reference, "unstaffed domain '" + d + "'");
  return RoleBinding{role, d, std::nullopt, staffed_at_};
}

DomainId RoleTable::resolve_root(const topology::ProviderNetwork& net, const GfcmPolicy& policy) {
  if (policy.root) {
    if (net.find_domain(*policy.root) == nullptr)
      raise(Errc::invalid_reference, "declared root domain '" + *policy.root + "' does not exist");
    return *policy.root;
  }
  // Root providers own customer-facing services that nobody subcontracts.
  std::set<ServiceId> subcontracted;
  for (const topology::Service& s : net.services())
    for (const ServiceId& sub : s.subcontracts) subcontracted.insert(sub);
  std::set<DomainId> candidates;
  for (const topology::Service& s : net.services())
    if (!subcontracted.count(s.id) && !s.customers.empty()) candidates.insert(s.owner);
  if (candidates.size() != 1)
    raise(Errc::routing_error, "no unique root provider resolvable (" +
                                   std::to_string(candidates.size()) + " candidates)");
  return *candidates.begin();
}

RoleBinding RoleTable::assign_gfcm(const topology::ProviderNetwork& net, const GfcmPolicy& policy,
                                   const faultmodel::FaultRecord& fault, Tick tick) {
  using faultmodel::LifecycleState;
  if (fault.state == LifecycleState::Detected)
    raise(Errc::precondition_failed, "GFCM assignment before localization started");

  if (policy.mode == GfcmMode::root) {
    if (!root_gfcm_) root_gfcm_ = resolve_root(net, policy);
    return RoleBinding{RoleKind::GFCM, *root_gfcm_, std::nullopt, tick};
  }

  auto it = gfcm_active_.find(fault.fault_id);
  if (it != gfcm_active_.end())
    return RoleBinding{RoleKind::GFCM, it->second, fault.fault_id, tick};

  DomainId holder = fault.origin_domain;
  gfcm_active_.emplace(fault.fault_id, holder);
  tenures_.push_back(Tenure{fault.fault_id, holder, tick, std::nullopt});
  return RoleBinding{RoleKind::GFCM, holder, fault.fault_id, tick};
}

void RoleTable::release_gfcm(const FaultId& fault, Tick tick) {
  auto it = gfcm_active_.find(fault);
  if (it == gfcm_active_.end()) return;
  gfcm_active_.erase(it);
  for (auto rit = tenures_.rbegin(); rit != tenures_.rend(); ++rit) {
    if (rit->fault == fault && !rit->end) {
      rit->end = tick;
      break;
    }
  }
}

std::optional<DomainId> RoleTable::gfcm_domain(const std::optional<FaultId>& fault) const {
  if (fault) {
    auto it = gfcm_active_.find(*fault);
    if (it != gfcm_active_.end()) return it->second;
  }
  return root_gfcm_;
}

bool RoleTable::holds_gfcm(const DomainId& d, const std::optional<FaultId>& fault) const {
  if (root_gfcm_ && *root_gfcm_ == d) return true;
  if (fault) {
    auto it = gfcm_active_.find(*fault);
    return it != gfcm_active_.end() && it->second == d;
  }
  return std::any_of(gfcm_active_.begin(), gfcm_active_.end(),
                     [&](const auto& kv) { return kv.second == d; });
}

bool check_access(const AccessPolicy& policy, const RoleTable& roles, const DomainId& requester,
                  const DomainId& target, Capability cap, const std::optional<FaultId>& fault_ctx) {
  if (requester == target) return true;
  if (policy.has_grant(requester, target, cap)) return true;
  if (roles.holds_gfcm(requester, fault_ctx) &&
      (cap == Capability::monitor || cap == Capability::query_progress ||
       cap == Capability::report_data))
    return true;
  return false;
}

std::vector<std::string> validate_policy(const AccessPolicy& policy,
                                         const topology::ProviderNetwork& net,
                                         const GfcmPolicy& gfcm) {
  std::vector<std::string> problems;
  for (const Grant& g : policy.grants()) {
    if (net.find_domain(g.requester) == nullptr)
      problems.push_back("grant requester '" + g.requester + "' does not exist");
    if (net.find_domain(g.target) == nullptr)
      problems.push_back("grant target '" + g.target + "' does not exist");
    if (g.capability == Capability::change_fault_data) {
      if (gfcm.mode == GfcmMode::per_fault) {
        problems.push_back("change-fault-data is not statically grantable under per-fault GFCM");
      } else {
        DomainId root;
        try {
          root = RoleTable::resolve_root(net, gfcm);
        } catch (const Error&) {
          problems.push_back("change-fault-data grant with unresolvable root");
          continue;
        }
        if (g.requester != root)
          problems.push_back("change-fault-data grantable only to the GFCM domain '" + root + "'");
      }
    }
  }
  return problems;
}

} // namespace iofm::orgmodel

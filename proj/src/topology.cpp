#include "iofm/topology.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace iofm::topology {

const char* component_kind_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::network_element: return "network-element";
    case ComponentKind::host: return "host";
    case ComponentKind::software: return "software";
    case ComponentKind::link_segment: return "link-segment";
  }
  return "?";
}

ComponentKind component_kind_from_name(const std::string& name) {
  if (name == "network-element") return ComponentKind::network_element;
  if (name == "host") return ComponentKind::host;
  if (name == "software") return ComponentKind::software;
  if (name == "link-segment") return ComponentKind::link_segment;
  raise(Errc::parse_error, "unknown component kind '" + name + "'");
}

const char* delivery_mode_name(DeliveryMode m) {
  return m == DeliveryMode::hierarchical ? "hierarchical" : "heterarchical";
}

DeliveryMode delivery_mode_from_name(const std::string& name) {
  if (name == "hierarchical") return DeliveryMode::hierarchical;
  if (name == "heterarchical") return DeliveryMode::heterarchical;
  raise(Errc::parse_error, "unknown delivery mode '" + name + "'");
}

const char* topology_class_name(TopologyClass c) {
  switch (c) {
    case TopologyClass::hierarchy: return "hierarchy";
    case TopologyClass::heterarchy: return "heterarchy";
    case TopologyClass::mixed: return "mixed";
  }
  return "?";
}

ProviderNetwork::ProviderNetwork(std::vector<Domain> domains, std::vector<Service> services,
                                 std::vector<ServicePart> parts, std::vector<Component> components)
    : domains_(std::move(domains)),
      services_(std::move(services)),
      parts_(std::move(parts)),
      components_(std::move(components)) {
  build_index();
}

void ProviderNetwork::build_index() {
  for (std::size_t i = 0; i < domains_.size(); ++i) domain_ix_.emplace(domains_[i].id, i);
  for (std::size_t i = 0; i < services_.size(); ++i) service_ix_.emplace(services_[i].id, i);
  for (std::size_t i = 0; i < parts_.size(); ++i) part_ix_.emplace(parts_[i].id, i);
  for (std::size_t i = 0; i < components_.size(); ++i) component_ix_.emplace(components_[i].id, i);

  for (const ServicePart& p : parts_)
    for (const ComponentId& c : p.realized_by) parts_of_component_[c].push_back(p.id);

  bool any_heterarchical = false;
  bool any_subcontracting = false;
  for (const Service& s : services_) {
    if (s.mode == DeliveryMode::heterarchical) any_heterarchical = true;
    if (!s.subcontracts.empty()) any_subcontracting = true;
    for (const ServicePartId& pid : s.parts) services_of_part_[pid].push_back(s.id);
    for (const ServiceId& sub : s.subcontracts) dependents_of_service_[sub].push_back(s.id);
  }

  if (!any_heterarchical)
    topology_class_ = TopologyClass::hierarchy;
  else if (!any_subcontracting)
    topology_class_ = TopologyClass::heterarchy;
  else
    topology_class_ = TopologyClass::mixed;

  // Per-service component closures, memoized over the subcontract DAG.
  for (const Service& s : services_) {
    if (closure_.count(s.id)) continue;
    // iterative DFS collecting parts of this service and all subcontracts
    std::set<ComponentId> acc;
    std::set<ServiceId> seen;
    std::deque<ServiceId> work{s.id};
    while (!work.empty()) {
      ServiceId cur = work.front();
      work.pop_front();
      if (!seen.insert(cur).second) continue;
      const Service* sv = find_service(cur);
      if (sv == nullptr) continue;
      for (const ServicePartId& pid : sv->parts) {
        const ServicePart* part = find_part(pid);
        if (part == nullptr) continue;
        acc.insert(part->realized_by.begin(), part->realized_by.end());
      }
      for (const ServiceId& sub : sv->subcontracts) work.push_back(sub);
    }
    closure_[s.id] = std::move(acc);
  }
}

const Domain* ProviderNetwork::find_domain(const DomainId& id) const {
  auto it = domain_ix_.find(id);
  return it == domain_ix_.end() ? nullptr : &domains_[it->second];
}

const Service* ProviderNetwork::find_service(const ServiceId& id) const {
  auto it = service_ix_.find(id);
  return it == service_ix_.end() ? nullptr : &services_[it->second];
}

const ServicePart* ProviderNetwork::find_part(const ServicePartId& id) const {
  auto it = part_ix_.find(id);
  return it == part_ix_.end() ? nullptr : &parts_[it->second];
}

const Component* ProviderNetwork::find_component(const ComponentId& id) const {
  auto it = component_ix_.find(id);
  return it == component_ix_.end() ? nullptr : &components_[it->second];
}

const std::set<ComponentId>& ProviderNetwork::closure_components(const ServiceId& id) const {
  auto it = closure_.find(id);
  if (it == closure_.end()) raise(Errc::invalid_reference, "unknown service '" + id + "'");
  return it->second;
}

bool ProviderNetwork::customer_uses(const CustomerId& customer, const ServiceId& service) const {
  const Service* s = find_service(service);
  if (s == nullptr) return false;
  return std::find(s->customers.begin(), s->customers.end(), customer) != s->customers.end();
}

namespace {

void check_duplicates(ValidationReport& report, const std::vector<std::string>& ids,
                      const std::string& what) {
  std::set<std::string> seen;
  for (const std::string& id : ids)
    if (!seen.insert(id).second)
      report.push_back({"duplicate-id", what + " '" + id + "' declared more than once"});
}

} // namespace

ValidationReport validate_network(const ProviderNetwork& net) {
  ValidationReport report;

  std::vector<std::string> ids;
  for (const Domain& d : net.domains()) ids.push_back(d.id);
  check_duplicates(report, ids, "domain");
  ids.clear();
  for (const Component& c : net.components()) ids.push_back(c.id);
  check_duplicates(report, ids, "component");
  ids.clear();
  for (const ServicePart& p : net.service_parts()) ids.push_back(p.id);
  check_duplicates(report, ids, "service part");
  ids.clear();
  for (const Service& s : net.services()) ids.push_back(s.id);
  check_duplicates(report, ids, "service");

  // component ownership and the disjointness of domain component sets
  std::map<ComponentId, DomainId> listed_by;
  for (const Domain& d : net.domains()) {
    for (const ComponentId& c : d.components) {
      auto [it, fresh] = listed_by.emplace(c, d.id);
      if (!fresh && it->second != d.id)
        report.push_back({"component-listing",
                          "component '" + c + "' listed by domains '" + it->second + "' and '" +
                              d.id + "'"});
      const Component* comp = net.find_component(c);
      if (comp == nullptr)
        report.push_back({"dangling-reference", "domain '" + d.id + "' lists unknown component '" +
                                                     c + "'"});
      else if (comp->owner != d.id)
        report.push_back({"component-ownership", "component '" + c + "' owned by '" + comp->owner +
                                                     "' but listed by '" + d.id + "'"});
    }
  }
  for (const Component& c : net.components()) {
    if (net.find_domain(c.owner) == nullptr)
      report.push_back(
          {"dangling-reference", "component '" + c.id + "' owned by unknown domain '" + c.owner + "'"});
    else if (!listed_by.count(c.id))
      report.push_back(
          {"component-listing", "component '" + c.id + "' missing from its owner's inventory"});
  }

  for (const ServicePart& p : net.service_parts()) {
    if (net.find_domain(p.provider) == nullptr)
      report.push_back({"dangling-reference",
                        "service part '" + p.id + "' provided by unknown domain '" + p.provider + "'"});
    if (p.realized_by.empty())
      report.push_back({"empty-realized-by", "service part '" + p.id + "' realized by nothing"});
    for (const ComponentId& c : p.realized_by) {
      const Component* comp = net.find_component(c);
      if (comp == nullptr)
        report.push_back({"dangling-reference",
                          "service part '" + p.id + "' realized by unknown component '" + c + "'"});
      else if (comp->owner != p.provider)
        report.push_back({"part-provider-ownership",
                          "service part '" + p.id + "' of '" + p.provider +
                              "' realized by foreign component '" + c + "' of '" + comp->owner + "'"});
    }
    if (!metrics_in_range(p.baseline))
      report.push_back({"metric-range", "service part '" + p.id + "' baseline out of range"});
  }

  for (const Service& s : net.services()) {
    if (net.find_domain(s.owner) == nullptr)
      report.push_back(
          {"dangling-reference", "service '" + s.id + "' owned by unknown domain '" + s.owner + "'"});
    std::set<DomainId> providers;
    for (const ServicePartId& pid : s.parts) {
      const ServicePart* p = net.find_part(pid);
      if (p == nullptr) {
        report.push_back(
            {"dangling-reference", "service '" + s.id + "' uses unknown part '" + pid + "'"});
        continue;
      }
      providers.insert(p->provider);
      if (s.mode == DeliveryMode::hierarchical && p->provider != s.owner)
        report.push_back({"hierarchy-local-part-owner",
                          "hierarchical service '" + s.id + "' uses part '" + pid +
                              "' provided by '" + p->provider + "', not its owner"});
    }
    if (s.mode == DeliveryMode::heterarchical) {
      if (!s.subcontracts.empty())
        report.push_back({"heterarchy-subcontract",
                          "heterarchical service '" + s.id + "' must not subcontract"});
      if (s.parts.size() < 2)
        report.push_back(
            {"heterarchy-part-count", "heterarchical service '" + s.id + "' has fewer than 2 parts"});
      if (providers.size() < 2)
        report.push_back({"heterarchy-provider-count",
                          "heterarchical service '" + s.id + "' spans fewer than 2 provider domains"});
    }
    for (const ServiceId& sub : s.subcontracts)
      if (net.find_service(sub) == nullptr)
        report.push_back(
            {"dangling-reference", "service '" + s.id + "' subcontracts unknown service '" + sub + "'"});
  }

  // subcontract references must form a DAG
  std::map<ServiceId, int> mark; // 0 fresh, 1 on stack, 2 done
  std::vector<ServiceId> stack;
  std::function<void(const ServiceId&)> dfs = [&](const ServiceId& id) {
    int& m = mark[id];
    if (m == 2) return;
    if (m == 1) {
      report.push_back({"hierarchy-cycle", "subcontract cycle through service '" + id + "'"});
      return;
    }
    m = 1;
    const Service* s = net.find_service(id);
    if (s != nullptr)
      for (const ServiceId& sub : s->subcontracts)
        if (net.find_service(sub) != nullptr) dfs(sub);
    m = 2;
  };
  for (const Service& s : net.services()) dfs(s.id);

  return report;
}

std::set<ServiceId> affected_services(const ProviderNetwork& net, const ComponentId& failed) {
  if (net.find_component(failed) == nullptr)
    raise(Errc::invalid_reference, "unknown component '" + failed + "'");

  std::set<ServiceId> affected;
  std::deque<ServiceId> work;

  auto pit = net.parts_of_component_.find(failed);
  if (pit != net.parts_of_component_.end()) {
    for (const ServicePartId& part : pit->second) {
      auto sit = net.services_of_part_.find(part);
      if (sit == net.services_of_part_.end()) continue;
      for (const ServiceId& s : sit->second)
        if (affected.insert(s).second) work.push_back(s);
    }
  }

  while (!work.empty()) {
    ServiceId cur = work.front();
    work.pop_front();
    auto dit = net.dependents_of_service_.find(cur);
    if (dit == net.dependents_of_service_.end()) continue;
    for (const ServiceId& dep : dit->second)
      if (affected.insert(dep).second) work.push_back(dep);
  }
  return affected;
}

std::set<DomainId> involved_domains(const ProviderNetwork& net, const ServiceId& id) {
  const Service* root = net.find_service(id);
  if (root == nullptr) raise(Errc::invalid_reference, "unknown service '" + id + "'");

  std::set<DomainId> domains;
  std::set<ServiceId> seen;
  std::deque<ServiceId> work{id};
  while (!work.empty()) {
    ServiceId cur = work.front();
    work.pop_front();
    if (!seen.insert(cur).second) continue;
    const Service* s = net.find_service(cur);
    if (s == nullptr) continue;
    domains.insert(s->owner);
    for (const ServicePartId& pid : s->parts) {
      const ServicePart* p = net.find_part(pid);
      if (p != nullptr) domains.insert(p->provider);
    }
    for (const ServiceId& sub : s->subcontracts) work.push_back(sub);
  }
  return domains;
}

} // namespace iofm::topology

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iofm/errors.hpp"
#include "iofm/ids.hpp"
#include "iofm/metrics.hpp"

namespace iofm::topology {

enum class ComponentKind { network_element, host, software, link_segment };
enum class DeliveryMode { hierarchical, heterarchical };
enum class TopologyClass { hierarchy, heterarchy, mixed };

const char* component_kind_name(ComponentKind k);
ComponentKind component_kind_from_name(const std::string& name);
const char* delivery_mode_name(DeliveryMode m);
DeliveryMode delivery_mode_from_name(const std::string& name);
const char* topology_class_name(TopologyClass c);

struct Domain {
  DomainId id;
  std::string name;
  std::vector<ComponentId> components;
  std::string local_format_id{"canonical"};
};

struct Component {
  ComponentId id;
  DomainId owner;
  ComponentKind kind{ComponentKind::network_element};
};

struct ServicePart {
  ServicePartId id;
  DomainId provider;
  std::vector<ComponentId> realized_by;
  faultmodel::MetricVector baseline;
};

// A heterarchical service is a chain of parts delivered by a coalition of
// peer providers. A hierarchical service combines the owner's local parts
// with subcontracted services; the subcontract references form a DAG.
struct Service {
  ServiceId id;
  DomainId owner;
  DeliveryMode mode{DeliveryMode::hierarchical};
  std::vector<ServicePartId> parts;
  std::vector<ServiceId> subcontracts;
  std::vector<CustomerId> customers;
  std::optional<faultmodel::SlaSpec> sla;
};

struct Violation {
  std::string code;
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

// Immutable once constructed; build all of the pieces first, then hand them
// over. Lookups and dependency closures are indexed at construction time.
class ProviderNetwork {
 public:
  ProviderNetwork() = default;
  ProviderNetwork(std::vector<Domain> domains, std::vector<Service> services,
                  std::vector<ServicePart> parts, std::vector<Component> components);

  const std::vector<Domain>& domains() const { return domains_; }
  const std::vector<Service>& services() const { return services_; }
  const std::vector<ServicePart>& service_parts() const { return parts_; }
  const std::vector<Component>& components() const { return components_; }

  const Domain* find_domain(const DomainId& id) const;
  const Service* find_service(const ServiceId& id) const;
  const ServicePart* find_part(const ServicePartId& id) const;
  const Component* find_component(const ComponentId& id) const;

  TopologyClass topology_class() const { return topology_class_; }

  // Every component transitively required by the service, through parts and
  // subcontracted services.
  const std::set<ComponentId>& closure_components(const ServiceId& id) const;

  bool customer_uses(const CustomerId& customer, const ServiceId& service) const;

 private:
  friend ValidationReport validate_network(const ProviderNetwork& net);
  friend std::set<ServiceId> affected_services(const ProviderNetwork& net,
                                               const ComponentId& failed);
  friend std::set<DomainId> involved_domains(const ProviderNetwork& net, const ServiceId& id);

  std::vector<Domain> domains_;
  std::vector<Service> services_;
  std::vector<ServicePart> parts_;
  std::vector<Component> components_;

  std::map<DomainId, std::size_t> domain_ix_;
  std::map<ServiceId, std::size_t> service_ix_;
  std::map<ServicePartId, std::size_t> part_ix_;
  std::map<ComponentId, std::size_t> component_ix_;

  // reverse edges
  std::map<ComponentId, std::vector<ServicePartId>> parts_of_component_;
  std::map<ServicePartId, std::vector<ServiceId>> services_of_part_;
  std::map<ServiceId, std::vector<ServiceId>> dependents_of_service_;

  std::map<ServiceId, std::set<ComponentId>> closure_;
  TopologyClass topology_class_{TopologyClass::hierarchy};

  void build_index();
};

// Report-style: returns the list of violated invariants, never throws and
// never mutates the input. Empty report means the network is valid.
ValidationReport validate_network(const ProviderNetwork& net);

// Every service that transitively depends on the failed component.
std::set<ServiceId> affected_services(const ProviderNetwork& net, const ComponentId& failed);

// Owner plus all providers of transitively included parts and subcontracts.
std::set<DomainId> involved_domains(const ProviderNetwork& net, const ServiceId& id);

} // namespace iofm::topology

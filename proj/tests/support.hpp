#pragma once

// Shared test fixtures: network builders, independent oracles, and randomized
// scenario generators. Oracles here must stay independent of the library code
// paths they check.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iofm/engine.hpp"
#include "iofm/scenario.hpp"
#include "iofm/simrun.hpp"
#include "iofm/topology.hpp"

namespace iofm::test {

using faultmodel::MetricVector;
using faultmodel::Symptom;
using faultmodel::SymptomScope;
using topology::Component;
using topology::ComponentKind;
using topology::DeliveryMode;
using topology::Domain;
using topology::ProviderNetwork;
using topology::Service;
using topology::ServicePart;

// ---------------------------------------------------------------------------
// network builder
// ---------------------------------------------------------------------------

class NetBuilder {
 public:
  NetBuilder& domain(const DomainId& id, int n_components = 1) {
    Domain d;
    d.id = id;
    d.name = id;
    for (int i = 0; i < n_components; ++i) {
      ComponentId cid = "c-" + id + "-" + std::to_string(i);
      d.components.push_back(cid);
      components_.push_back(Component{cid, id, ComponentKind::network_element});
    }
    domains_.push_back(std::move(d));
    return *this;
  }

  // one part per component of the provider, or the named components
  NetBuilder& part(const ServicePartId& id, const DomainId& provider,
                   std::vector<ComponentId> comps, MetricVector baseline = {}) {
    parts_.push_back(ServicePart{id, provider, std::move(comps), baseline});
    return *this;
  }

  NetBuilder& service(const ServiceId& id, const DomainId& owner, DeliveryMode mode,
                      std::vector<ServicePartId> parts, std::vector<ServiceId> subs = {},
                      std::vector<CustomerId> customers = {}) {
    Service s;
    s.id = id;
    s.owner = owner;
    s.mode = mode;
    s.parts = std::move(parts);
    s.subcontracts = std::move(subs);
    s.customers = std::move(customers);
    services_.push_back(std::move(s));
    return *this;
  }

  ComponentId comp(const DomainId& d, int i = 0) const {
    return "c-" + d + "-" + std::to_string(i);
  }

  ProviderNetwork build() const { return ProviderNetwork(domains_, services_, parts_, components_); }

 private:
  std::vector<Domain> domains_;
  std::vector<Service> services_;
  std::vector<ServicePart> parts_;
  std::vector<Component> components_;
};

// The running example network: a root provider with two subcontractors and a
// three-member coalition delivering one horizontal service.
inline ProviderNetwork fig1_network() {
  NetBuilder b;
  b.domain("P0", 2).domain("P1").domain("P2").domain("P3").domain("P4").domain("P5");
  b.part("sp-p0", "P0", {b.comp("P0", 0)});
  b.part("sp-p1", "P1", {b.comp("P1", 0)});
  b.part("sp-p2", "P2", {b.comp("P2", 0)});
  b.part("sp1", "P3", {b.comp("P3", 0)});
  b.part("sp2", "P4", {b.comp("P4", 0)});
  b.part("sp3", "P5", {b.comp("P5", 0)});
  b.service("svc1core", "P1", DeliveryMode::hierarchical, {"sp-p1"});
  b.service("svc2core", "P2", DeliveryMode::hierarchical, {"sp-p2"});
  b.service("service1", "P0", DeliveryMode::hierarchical, {}, {"svc1core"});
  b.service("service2", "P0", DeliveryMode::hierarchical, {}, {"svc2core"});
  b.service("service3", "P0", DeliveryMode::heterarchical, {"sp1", "sp2", "sp3"}, {}, {"A", "B"});
  b.service("offering", "P0", DeliveryMode::hierarchical, {"sp-p0"},
            {"service1", "service2", "service3"}, {"A", "B", "C"});
  return b.build();
}

// ---------------------------------------------------------------------------
// independent oracles
// ---------------------------------------------------------------------------

// Explicit BFS over the dependency relation: component -> parts -> services ->
// dependent services, with edges materialized up front.
inline std::set<ServiceId> bfs_affected_oracle(const ProviderNetwork& net,
                                               const ComponentId& failed) {
  std::map<std::string, std::vector<std::string>> edges; // "node" -> dependents
  auto cnode = [](const ComponentId& c) { return "c:" + c; };
  auto pnode = [](const ServicePartId& p) { return "p:" + p; };
  auto snode = [](const ServiceId& s) { return "s:" + s; };

  for (const ServicePart& p : net.service_parts())
    for (const ComponentId& c : p.realized_by) edges[cnode(c)].push_back(pnode(p.id));
  for (const Service& s : net.services()) {
    for (const ServicePartId& pid : s.parts) edges[pnode(pid)].push_back(snode(s.id));
    for (const ServiceId& sub : s.subcontracts) edges[snode(sub)].push_back(snode(s.id));
  }

  std::set<std::string> seen;
  std::vector<std::string> queue{cnode(failed)};
  seen.insert(queue.front());
  std::set<ServiceId> out;
  while (!queue.empty()) {
    std::string cur = queue.back();
    queue.pop_back();
    for (const std::string& next : edges[cur]) {
      if (!seen.insert(next).second) continue;
      if (next.rfind("s:", 0) == 0) out.insert(next.substr(2));
      queue.push_back(next);
    }
  }
  return out;
}

// Closed-form least squares computed from means, independently of the
// engine's accumulator formulation.
inline std::pair<double, double> ols_oracle(const std::vector<double>& xs,
                                            const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (double x : xs) mx += x;
  for (double y : ys) my += y;
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  double slope = den == 0 ? 0 : num / den;
  return {slope, my - slope * mx};
}

// ---------------------------------------------------------------------------
// randomized scenario generators
// ---------------------------------------------------------------------------

struct GeneratedScenario {
  scenario::Scenario sc;
  // ground truth of the single (or per-fault) injected component
  std::vector<std::pair<DomainId, ComponentId>> injected;
};

enum class TopoKind { hierarchy, heterarchy, mixed };

inline scenario::Scenario base_scenario(ProviderNetwork net, std::uint64_t seed, Tick horizon) {
  scenario::Scenario sc;
  sc.name = "generated";
  sc.seed = seed;
  sc.seed_present = true;
  sc.horizon = horizon;
  sc.network = std::move(net);
  sc.link_defaults = simnet::LinkParams{1, 0.0, 0.0};
  return sc;
}

inline Symptom service_symptom(const ServiceId& s, const std::string& deviation) {
  return Symptom{SymptomScope::service, s, deviation, std::nullopt};
}

inline Symptom component_symptom(const ComponentId& c, const std::string& deviation) {
  return Symptom{SymptomScope::component, c, deviation, std::nullopt};
}

inline scenario::ScenarioAction report_action(Tick tick, const DomainId& domain, const Symptom& s,
                                              std::optional<ServiceId> suspected) {
  scenario::ScenarioAction a;
  a.tick = tick;
  a.type = "report";
  ojson p;
  p["tick"] = tick;
  p["type"] = "report";
  p["domain"] = domain;
  p["reporter"] = "DFM";
  if (suspected) p["suspectedService"] = *suspected;
  p["symptom"] = faultmodel::symptom_to_json(s);
  a.params = std::move(p);
  return a;
}

inline scenario::ScenarioAction simple_action(Tick tick, const std::string& type, ojson extra) {
  scenario::ScenarioAction a;
  a.tick = tick;
  a.type = type;
  extra["tick"] = tick;
  extra["type"] = type;
  a.params = std::move(extra);
  return a;
}

// A random provider network with one customer-facing service whose involved
// domains and closure are known. Domains beyond the service's reach act as
// bystanders.
struct RandomTopo {
  ProviderNetwork net;
  ServiceId target_service;
  std::vector<DomainId> involved;       // domains involved in target_service
  std::vector<ComponentId> closure;     // components of the target service
  std::vector<DomainId> bystanders;     // staffed but uninvolved domains
  orgmodel::GfcmPolicy gfcm;
};

inline RandomTopo random_topology(std::mt19937_64& rng, TopoKind kind) {
  RandomTopo out;
  NetBuilder b;
  auto pick = [&](int lo, int hi) {
    return static_cast<int>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  if (kind == TopoKind::heterarchy) {
    int n = pick(3, 8);
    std::vector<ServicePartId> parts;
    for (int i = 0; i < n; ++i) {
      DomainId d = "D" + std::to_string(i);
      b.domain(d, pick(1, 2));
      b.part("seg-" + d, d, {b.comp(d, 0)});
      parts.push_back("seg-" + d);
      out.involved.push_back(d);
      out.closure.push_back(b.comp(d, 0));
    }
    int extras = pick(0, 2);
    for (int i = 0; i < extras; ++i) {
      DomainId d = "X" + std::to_string(i);
      b.domain(d, 1);
      out.bystanders.push_back(d);
    }
    b.service("chain", "D0", DeliveryMode::heterarchical, parts, {}, {"CUST"});
    out.target_service = "chain";
    out.gfcm.mode = orgmodel::GfcmMode::per_fault;
  } else {
    // root provider with children (and optional grandchildren); the mixed
    // variant adds a coalition subcontracted by the root offering
    int children = pick(1, kind == TopoKind::mixed ? 3 : 4); // keeps networks at 12 domains or fewer
    b.domain("R", 1);
    b.part("sp-R", "R", {b.comp("R", 0)});
    std::vector<ServiceId> subs;
    out.involved.push_back("R");
    out.closure.push_back(b.comp("R", 0));
    int grandchild_ix = 0;
    for (int i = 0; i < children; ++i) {
      DomainId d = "C" + std::to_string(i);
      b.domain(d, pick(1, 2));
      b.part("sp-" + d, d, {b.comp(d, 0)});
      std::vector<ServiceId> child_subs;
      if (pick(0, 1) == 1) {
        DomainId g = "G" + std::to_string(grandchild_ix++);
        b.domain(g, 1);
        b.part("sp-" + g, g, {b.comp(g, 0)});
        b.service("svc-" + g, g, DeliveryMode::hierarchical, {"sp-" + g});
        child_subs.push_back("svc-" + g);
        out.involved.push_back(g);
        out.closure.push_back(b.comp(g, 0));
      }
      b.service("svc-" + d, d, DeliveryMode::hierarchical, {"sp-" + d}, child_subs);
      subs.push_back("svc-" + d);
      out.involved.push_back(d);
      out.closure.push_back(b.comp(d, 0));
    }
    if (kind == TopoKind::mixed) {
      int coalition = pick(2, 3);
      std::vector<ServicePartId> parts;
      for (int i = 0; i < coalition; ++i) {
        DomainId d = "H" + std::to_string(i);
        b.domain(d, 1);
        b.part("seg-" + d, d, {b.comp(d, 0)});
        parts.push_back("seg-" + d);
        out.involved.push_back(d);
        out.closure.push_back(b.comp(d, 0));
      }
      b.service("chain", "R", DeliveryMode::heterarchical, parts);
      subs.push_back("chain");
    }
    int extras = pick(0, 2);
    for (int i = 0; i < extras; ++i) {
      DomainId d = "X" + std::to_string(i);
      b.domain(d, 1);
      out.bystanders.push_back(d);
    }
    b.service("root-svc", "R", DeliveryMode::hierarchical, {"sp-R"}, subs, {"CUST"});
    out.target_service = "root-svc";
    out.gfcm.mode = orgmodel::GfcmMode::root;
    out.gfcm.root = "R";
  }
  out.net = b.build();
  return out;
}

// Single injected fault inside an involved domain, reported with a service
// symptom; localization must end at exactly the injected component.
inline GeneratedScenario gen_localization_scenario(std::mt19937_64& rng) {
  TopoKind kind = static_cast<TopoKind>(rng() % 3);
  RandomTopo topo = random_topology(rng, kind);

  GeneratedScenario g;
  g.sc = base_scenario(topo.net, rng(), 150);
  g.sc.gfcm = topo.gfcm;

  ComponentId target = topo.closure[rng() % topo.closure.size()];
  DomainId owner = g.sc.network.find_component(target)->owner;
  g.injected.emplace_back(owner, target);

  simnet::Injection inj;
  inj.kind = simnet::InjectionKind::fault;
  inj.tick = 5;
  inj.component = target;
  g.sc.injections.push_back(inj);

  DomainId reporter = topo.involved[rng() % topo.involved.size()];
  g.sc.actions.push_back(report_action(
      6, reporter, service_symptom(topo.target_service, "degraded"), topo.target_service));
  return g;
}

// Escalation setups: either the faulty component lies outside every involved
// domain, or all traffic toward (and from) the faulty domain is lost.
inline GeneratedScenario gen_escalation_scenario(std::mt19937_64& rng, bool message_loss_variant) {
  TopoKind kind = message_loss_variant ? TopoKind::heterarchy
                                       : static_cast<TopoKind>(rng() % 3);
  RandomTopo topo = random_topology(rng, kind);
  while (!message_loss_variant && topo.bystanders.empty()) topo = random_topology(rng, kind);

  GeneratedScenario g;
  g.sc = base_scenario(topo.net, rng(), 200);
  g.sc.gfcm = topo.gfcm;

  simnet::Injection inj;
  inj.kind = simnet::InjectionKind::fault;
  inj.tick = 5;

  DomainId reporter;
  if (message_loss_variant) {
    // fault inside an involved domain, but that domain is unreachable
    std::size_t ix = 1 + rng() % (topo.involved.size() - 1);
    DomainId faulty = topo.involved[ix];
    inj.component = "c-" + faulty + "-0";
    g.injected.emplace_back(faulty, inj.component);
    reporter = topo.involved[0];
    simnet::LinkParams lost{1, 1.0, 0.0};
    for (const topology::Domain& d : g.sc.network.domains()) {
      if (d.id == faulty) continue;
      g.sc.link_overrides.emplace_back(d.id, faulty, lost);
      g.sc.link_overrides.emplace_back(faulty, d.id, lost);
    }
  } else {
    DomainId faulty = topo.bystanders[rng() % topo.bystanders.size()];
    inj.component = "c-" + faulty + "-0";
    g.injected.emplace_back(faulty, inj.component);
    reporter = topo.involved[rng() % topo.involved.size()];
  }
  g.sc.injections.push_back(inj);
  g.sc.actions.push_back(report_action(
      6, reporter, service_symptom(topo.target_service, "degraded"), topo.target_service));
  return g;
}

// A coalition with a mix of real injected faults and phantom alarms; every
// record gets a false-positive check, confirmed-false ones get removed.
struct FpScenario {
  scenario::Scenario sc;
  std::set<std::string> real_signatures;  // symptom signatures of real faults
  std::set<std::string> false_signatures; // symptom signatures of phantom alarms
};

inline std::string fault_id_at(std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "F-%04zu", n);
  return buf;
}

inline FpScenario gen_fp_scenario(std::mt19937_64& rng) {
  RandomTopo topo = random_topology(rng, TopoKind::heterarchy);
  FpScenario g;
  g.sc = base_scenario(topo.net, rng(), 260);
  g.sc.gfcm = topo.gfcm;

  // keep at least one involved component fault-free so phantoms have a home
  const int max_reals =
      std::min<int>(3, static_cast<int>(topo.involved.size()) - 1);
  const int reals = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_reals));
  const int phantoms = 1 + static_cast<int>(rng() % 3);
  Tick t = 5;
  std::set<ComponentId> used;
  std::vector<DomainId> phantom_origins;

  for (int i = 0; i < reals && used.size() < topo.closure.size(); ++i) {
    ComponentId c = topo.closure[rng() % topo.closure.size()];
    if (!used.insert(c).second) {
      --i;
      continue;
    }
    simnet::Injection inj;
    inj.kind = simnet::InjectionKind::fault;
    inj.tick = t;
    inj.component = c;
    g.sc.injections.push_back(inj);
    Symptom s = component_symptom(c, "dev-real-" + std::to_string(i));
    DomainId owner = g.sc.network.find_component(c)->owner;
    g.sc.actions.push_back(report_action(t + 1, owner, s, std::nullopt));
    g.real_signatures.insert(s.signature());
    t += 3;
  }
  for (int i = 0; i < phantoms; ++i) {
    // phantom alarms must not coincide with a really faulty component
    DomainId d;
    ComponentId c;
    do {
      d = topo.involved[rng() % topo.involved.size()];
      c = "c-" + d + "-0";
    } while (used.count(c));
    Symptom s = component_symptom(c, "dev-phantom-" + std::to_string(i));
    simnet::Injection inj;
    inj.kind = simnet::InjectionKind::false_alarm;
    inj.tick = t;
    inj.domain = d;
    inj.symptom = s;
    g.sc.injections.push_back(inj);
    g.sc.actions.push_back(report_action(t + 1, d, s, std::nullopt));
    g.false_signatures.insert(s.signature());
    phantom_origins.push_back(d);
    t += 3;
  }

  // check every record after all reports are in; reports open fault ids in
  // tick order, so the phantom ids are the trailing ones
  Tick at = 120;
  for (int i = 0; i < reals + phantoms; ++i) {
    ojson check;
    check["requester"] = topo.involved[0];
    check["faultId"] = fault_id_at(static_cast<std::size_t>(i) + 1);
    g.sc.actions.push_back(simple_action(at, "fp-check", check));
    at += 2;
  }
  at = 200;
  for (int i = 0; i < phantoms; ++i) {
    ojson rem;
    rem["actor"] = phantom_origins[static_cast<std::size_t>(i)];
    rem["faultId"] = fault_id_at(static_cast<std::size_t>(reals + i) + 1);
    g.sc.actions.push_back(simple_action(at, "fp-remove", rem));
    at += 2;
  }
  return g;
}

} // namespace iofm::test

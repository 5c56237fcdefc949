#include "iofm/scenario.hpp"

#include <fstream>
#include <sstream>

namespace iofm::scenario {

using faultmodel::Symptom;
using simnet::Injection;
using simnet::InjectionKind;
using simnet::LinkParams;
using topology::Component;
using topology::Domain;
using topology::Service;
using topology::ServicePart;

namespace {

simnet::Degradation degradation_from_json(const ojson& j) {
  simnet::Degradation d;
  d.availability_factor = j.value("availabilityFactor", 0.0);
  d.loss_add = j.value("lossAdd", 1.0);
  d.owd_add = j.value("owdAdd", 0.0);
  d.ipdv_add = j.value("ipdvAdd", 0.0);
  return d;
}

ojson degradation_to_json(const simnet::Degradation& d) {
  ojson j;
  j["availabilityFactor"] = d.availability_factor;
  j["lossAdd"] = d.loss_add;
  j["owdAdd"] = d.owd_add;
  j["ipdvAdd"] = d.ipdv_add;
  return j;
}

} // namespace

Scenario scenario_from_json(const ojson& j) {
  Scenario sc;
  sc.name = j.value("name", std::string{"unnamed"});
  if (j.contains("seed")) {
    sc.seed = j["seed"].get<std::uint64_t>();
    sc.seed_present = true;
  }
  sc.horizon = j.value("horizon", Tick{0});
  sc.auto_detect = j.value("autoDetect", false);

  // ----- topology ----------------------------------------------------------
  std::vector<Domain> domains;
  std::vector<Component> components;
  std::vector<ServicePart> parts;
  std::vector<Service> services;

  const ojson& topo = j.at("topology");
  for (const ojson& dj : topo.at("domains")) {
    Domain d;
    d.id = dj.at("id").get<std::string>();
    d.name = dj.value("name", d.id);
    d.local_format_id = dj.value("localFormat", std::string{"canonical"});
    for (const ojson& cj : dj.value("components", ojson::array())) {
      Component c;
      c.id = cj.at("id").get<std::string>();
      c.owner = d.id;
      c.kind = topology::component_kind_from_name(cj.value("kind", std::string{"network-element"}));
      d.components.push_back(c.id);
      components.push_back(std::move(c));
    }
    domains.push_back(std::move(d));
  }
  for (const ojson& pj : topo.value("serviceParts", ojson::array())) {
    ServicePart p;
    p.id = pj.at("id").get<std::string>();
    p.provider = pj.at("provider").get<std::string>();
    for (const ojson& c : pj.at("realizedBy")) p.realized_by.push_back(c.get<std::string>());
    if (pj.contains("baseline")) p.baseline = faultmodel::metrics_from_json(pj["baseline"]);
    parts.push_back(std::move(p));
  }
  for (const ojson& sj : topo.at("services")) {
    Service s;
    s.id = sj.at("id").get<std::string>();
    s.owner = sj.at("owner").get<std::string>();
    s.mode = topology::delivery_mode_from_name(sj.value("mode", std::string{"hierarchical"}));
    for (const ojson& p : sj.value("parts", ojson::array())) s.parts.push_back(p.get<std::string>());
    for (const ojson& sub : sj.value("subcontracts", ojson::array()))
      s.subcontracts.push_back(sub.get<std::string>());
    for (const ojson& c : sj.value("customers", ojson::array()))
      s.customers.push_back(c.get<std::string>());
    services.push_back(std::move(s));
  }

  // ----- SLA specs attach to services before the network is frozen ---------
  for (const ojson& slj : j.value("slaSpecs", ojson::array())) {
    ServiceId sid = slj.at("service").get<std::string>();
    faultmodel::SlaSpec spec = faultmodel::sla_from_json(slj);
    sc.slas[sid] = spec;
    for (Service& s : services)
      if (s.id == sid) s.sla = spec;
  }

  sc.network = topology::ProviderNetwork(std::move(domains), std::move(services), std::move(parts),
                                         std::move(components));

  // ----- roles and access ---------------------------------------------------
  if (j.contains("roles")) {
    const ojson& roles = j["roles"];
    if (roles.contains("gfcm")) {
      sc.gfcm.mode = orgmodel::gfcm_mode_from_name(
          roles["gfcm"].value("mode", std::string{"root"}));
      if (roles["gfcm"].contains("root"))
        sc.gfcm.root = roles["gfcm"]["root"].get<std::string>();
    }
    for (const ojson& gj : roles.value("grants", ojson::array())) {
      orgmodel::Grant g;
      g.requester = gj.at("requester").get<std::string>();
      g.target = gj.at("target").get<std::string>();
      g.capability = orgmodel::capability_from_name(gj.at("capability").get<std::string>());
      sc.grants.push_back(std::move(g));
    }
  }

  // ----- adapters -----------------------------------------------------------
  for (const ojson& aj : j.value("adapters", ojson::array())) {
    faultmodel::DomainFormatAdapter a;
    a.format_id = aj.at("formatId").get<std::string>();
    for (const ojson& fj : aj.value("fieldMap", ojson::array())) {
      faultmodel::FieldMapEntry e;
      e.local_name = fj.at("local").get<std::string>();
      e.canonical_name = fj.at("canonical").get<std::string>();
      e.unit_num = fj.value("unitNum", std::int64_t{1});
      e.unit_den = fj.value("unitDen", std::int64_t{1});
      a.field_map.push_back(std::move(e));
    }
    for (const ojson& lf : aj.value("lossyFields", ojson::array()))
      a.lossy_fields.push_back(lf.get<std::string>());
    sc.adapters.push_back(std::move(a));
  }

  // ----- link model ----------------------------------------------------------
  if (j.contains("linkModel")) {
    const ojson& lm = j["linkModel"];
    sc.link_defaults.delay = lm.value("defaultDelay", Tick{1});
    sc.link_defaults.loss = lm.value("defaultLoss", 0.0);
    sc.link_defaults.corrupt = lm.value("defaultCorrupt", 0.0);
    for (const ojson& ov : lm.value("overrides", ojson::array())) {
      LinkParams p = sc.link_defaults;
      p.delay = ov.value("delay", p.delay);
      p.loss = ov.value("loss", p.loss);
      p.corrupt = ov.value("corrupt", p.corrupt);
      sc.link_overrides.emplace_back(ov.at("from").get<std::string>(),
                                     ov.at("to").get<std::string>(), p);
    }
  }

  // ----- injections ----------------------------------------------------------
  for (const ojson& ij : j.value("injections", ojson::array())) {
    Injection inj;
    inj.tick = ij.at("tick").get<Tick>();
    std::string kind = ij.value("kind", std::string{"fault"});
    if (kind == "fault") {
      inj.kind = InjectionKind::fault;
      inj.component = ij.at("component").get<std::string>();
      if (ij.contains("repairAfter")) inj.repair_after = ij["repairAfter"].get<Tick>();
      if (ij.contains("degradation")) inj.degradation = degradation_from_json(ij["degradation"]);
    } else if (kind == "false-alarm") {
      inj.kind = InjectionKind::false_alarm;
      inj.domain = ij.at("domain").get<std::string>();
      inj.symptom = faultmodel::symptom_from_json(ij.at("symptom"));
    } else if (kind == "repair") {
      inj.kind = InjectionKind::repair;
      inj.component = ij.at("component").get<std::string>();
    } else {
      raise(Errc::parse_error, "unknown injection kind '" + kind + "'");
    }
    sc.injections.push_back(std::move(inj));
  }

  // ----- actions, subscriptions, maintenance, known errors -------------------
  for (const ojson& aj : j.value("actions", ojson::array())) {
    ScenarioAction a;
    a.tick = aj.at("tick").get<Tick>();
    a.type = aj.at("type").get<std::string>();
    a.params = aj;
    sc.actions.push_back(std::move(a));
  }
  for (const ojson& sj : j.value("subscriptions", ojson::array())) {
    protocol::Subscription s;
    s.subscriber = sj.at("subscriber").get<std::string>();
    s.publisher = sj.at("publisher").get<std::string>();
    s.topic = sj.at("topic").get<std::string>();
    s.since = sj.value("since", Tick{0});
    sc.subscriptions.push_back(std::move(s));
  }
  for (const ojson& mj : j.value("maintenance", ojson::array())) {
    MaintenanceTask m;
    m.domain = mj.at("domain").get<std::string>();
    m.component = mj.at("component").get<std::string>();
    m.start = mj.at("start").get<Tick>();
    m.duration = mj.at("duration").get<Tick>();
    m.note = mj.value("note", std::string{});
    sc.maintenance.push_back(std::move(m));
  }
  for (const ojson& kj : j.value("knownErrors", ojson::array())) {
    KnownErrorSeed k;
    k.domain = kj.at("domain").get<std::string>();
    k.symptom = faultmodel::symptom_from_json(kj.at("symptom"));
    k.cause_domain = kj.at("causeDomain").get<std::string>();
    k.cause_component = kj.at("causeComponent").get<std::string>();
    sc.known_errors.push_back(std::move(k));
  }

  if (j.contains("thresholds")) {
    const ojson& t = j["thresholds"];
    sc.thresholds.t_isolate = t.value("tIsolate", sc.thresholds.t_isolate);
    sc.thresholds.dedup_window = t.value("dedupWindow", sc.thresholds.dedup_window);
    sc.thresholds.monitor_timeout = t.value("monitorTimeout", sc.thresholds.monitor_timeout);
    sc.thresholds.repair_ticks = t.value("repairTicks", sc.thresholds.repair_ticks);
    sc.thresholds.max_age = t.value("maxAge", sc.thresholds.max_age);
    sc.thresholds.r03_threshold = t.value("r03Threshold", sc.thresholds.r03_threshold);
  }

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ojson j;
  try {
    j = ojson::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::parse_error, std::string(e.what()) + " in '" + path + "'");
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::parse_error, std::string(e.what()) + " in '" + path + "'");
  }
}

ojson scenario_to_json(const Scenario& sc) {
  ojson j;
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["horizon"] = sc.horizon;
  j["autoDetect"] = sc.auto_detect;

  ojson topo;
  ojson domains = ojson::array();
  for (const Domain& d : sc.network.domains()) {
    ojson dj;
    dj["id"] = d.id;
    dj["name"] = d.name;
    dj["localFormat"] = d.local_format_id;
    ojson comps = ojson::array();
    for (const ComponentId& cid : d.components) {
      const Component* c = sc.network.find_component(cid);
      ojson cj;
      cj["id"] = cid;
      cj["kind"] = c ? topology::component_kind_name(c->kind) : "network-element";
      comps.push_back(std::move(cj));
    }
    dj["components"] = std::move(comps);
    domains.push_back(std::move(dj));
  }
  topo["domains"] = std::move(domains);

  ojson parts = ojson::array();
  for (const ServicePart& p : sc.network.service_parts()) {
    ojson pj;
    pj["id"] = p.id;
    pj["provider"] = p.provider;
    pj["realizedBy"] = p.realized_by;
    pj["baseline"] = faultmodel::metrics_to_json(p.baseline);
    parts.push_back(std::move(pj));
  }
  topo["serviceParts"] = std::move(parts);

  ojson services = ojson::array();
  for (const Service& s : sc.network.services()) {
    ojson sj;
    sj["id"] = s.id;
    sj["owner"] = s.owner;
    sj["mode"] = topology::delivery_mode_name(s.mode);
    sj["parts"] = s.parts;
    sj["subcontracts"] = s.subcontracts;
    sj["customers"] = s.customers;
    services.push_back(std::move(sj));
  }
  topo["services"] = std::move(services);
  j["topology"] = std::move(topo);

  ojson roles;
  ojson gfcm;
  gfcm["mode"] = orgmodel::gfcm_mode_name(sc.gfcm.mode);
  if (sc.gfcm.root) gfcm["root"] = *sc.gfcm.root;
  roles["gfcm"] = std::move(gfcm);
  ojson grants = ojson::array();
  for (const orgmodel::Grant& g : sc.grants) {
    ojson gj;
    gj["requester"] = g.requester;
    gj["target"] = g.target;
    gj["capability"] = orgmodel::capability_name(g.capability);
    grants.push_back(std::move(gj));
  }
  roles["grants"] = std::move(grants);
  j["roles"] = std::move(roles);

  ojson adapters = ojson::array();
  for (const faultmodel::DomainFormatAdapter& a : sc.adapters) {
    ojson aj;
    aj["formatId"] = a.format_id;
    ojson fm = ojson::array();
    for (const faultmodel::FieldMapEntry& e : a.field_map) {
      ojson fj;
      fj["local"] = e.local_name;
      fj["canonical"] = e.canonical_name;
      fj["unitNum"] = e.unit_num;
      fj["unitDen"] = e.unit_den;
      fm.push_back(std::move(fj));
    }
    aj["fieldMap"] = std::move(fm);
    aj["lossyFields"] = a.lossy_fields;
    adapters.push_back(std::move(aj));
  }
  j["adapters"] = std::move(adapters);

  ojson lm;
  lm["defaultDelay"] = sc.link_defaults.delay;
  lm["defaultLoss"] = sc.link_defaults.loss;
  lm["defaultCorrupt"] = sc.link_defaults.corrupt;
  ojson overrides = ojson::array();
  for (const auto& [from, to, p] : sc.link_overrides) {
    ojson ov;
    ov["from"] = from;
    ov["to"] = to;
    ov["delay"] = p.delay;
    ov["loss"] = p.loss;
    ov["corrupt"] = p.corrupt;
    overrides.push_back(std::move(ov));
  }
  lm["overrides"] = std::move(overrides);
  j["linkModel"] = std::move(lm);

  ojson injections = ojson::array();
  for (const Injection& i : sc.injections) {
    ojson ij;
    ij["tick"] = i.tick;
    switch (i.kind) {
      case InjectionKind::fault:
        ij["kind"] = "fault";
        ij["component"] = i.component;
        if (i.repair_after) ij["repairAfter"] = *i.repair_after;
        ij["degradation"] = degradation_to_json(i.degradation);
        break;
      case InjectionKind::false_alarm:
        ij["kind"] = "false-alarm";
        ij["domain"] = i.domain;
        ij["symptom"] = faultmodel::symptom_to_json(*i.symptom);
        break;
      case InjectionKind::repair:
        ij["kind"] = "repair";
        ij["component"] = i.component;
        break;
    }
    injections.push_back(std::move(ij));
  }
  j["injections"] = std::move(injections);

  ojson actions = ojson::array();
  for (const ScenarioAction& a : sc.actions) actions.push_back(a.params);
  j["actions"] = std::move(actions);

  ojson subs = ojson::array();
  for (const protocol::Subscription& s : sc.subscriptions) {
    ojson sj;
    sj["subscriber"] = s.subscriber;
    sj["publisher"] = s.publisher;
    sj["topic"] = s.topic;
    subs.push_back(std::move(sj));
  }
  j["subscriptions"] = std::move(subs);

  ojson maint = ojson::array();
  for (const MaintenanceTask& m : sc.maintenance) {
    ojson mj;
    mj["domain"] = m.domain;
    mj["component"] = m.component;
    mj["start"] = m.start;
    mj["duration"] = m.duration;
    if (!m.note.empty()) mj["note"] = m.note;
    maint.push_back(std::move(mj));
  }
  j["maintenance"] = std::move(maint);

  ojson kes = ojson::array();
  for (const KnownErrorSeed& k : sc.known_errors) {
    ojson kj;
    kj["domain"] = k.domain;
    kj["symptom"] = faultmodel::symptom_to_json(k.symptom);
    kj["causeDomain"] = k.cause_domain;
    kj["causeComponent"] = k.cause_component;
    kes.push_back(std::move(kj));
  }
  j["knownErrors"] = std::move(kes);

  ojson slas = ojson::array();
  for (const auto& [sid, spec] : sc.slas) {
    ojson sj = faultmodel::sla_to_json(spec);
    ojson row;
    row["service"] = sid;
    for (auto& [k, v] : sj.items()) row[k] = v;
    slas.push_back(std::move(row));
  }
  j["slaSpecs"] = std::move(slas);

  ojson t;
  t["tIsolate"] = sc.thresholds.t_isolate;
  t["dedupWindow"] = sc.thresholds.dedup_window;
  t["monitorTimeout"] = sc.thresholds.monitor_timeout;
  t["repairTicks"] = sc.thresholds.repair_ticks;
  t["maxAge"] = sc.thresholds.max_age;
  t["r03Threshold"] = sc.thresholds.r03_threshold;
  j["thresholds"] = std::move(t);

  return j;
}

topology::ValidationReport validate_scenario(const Scenario& sc) {
  topology::ValidationReport report = topology::validate_network(sc.network);
  auto add = [&](const std::string& code, const std::string& detail) {
    report.push_back({code, detail});
  };

  if (!sc.seed_present) add("missing-seed", "scenario declares no seed");
  if (sc.horizon <= 0) add("invalid-horizon", "horizon must be positive");

  if (sc.gfcm.mode == orgmodel::GfcmMode::root) {
    try {
      orgmodel::RoleTable::resolve_root(sc.network, sc.gfcm);
    } catch (const Error& e) {
      add("gfcm-root", e.what());
    }
  }
  for (const std::string& p :
       orgmodel::validate_policy(orgmodel::AccessPolicy(sc.grants), sc.network, sc.gfcm))
    add("access-policy", p);

  for (const faultmodel::DomainFormatAdapter& a : sc.adapters)
    for (const std::string& p : faultmodel::validate_adapter(a))
      add("adapter", "'" + a.format_id + "': " + p);
  for (const topology::Domain& d : sc.network.domains()) {
    if (d.local_format_id == "canonical") continue;
    bool found = false;
    for (const faultmodel::DomainFormatAdapter& a : sc.adapters)
      if (a.format_id == d.local_format_id) found = true;
    if (!found)
      add("adapter", "domain '" + d.id + "' uses format '" + d.local_format_id +
                         "' with no adapter");
  }

  for (const auto& [from, to, p] : sc.link_overrides) {
    if (sc.network.find_domain(from) == nullptr)
      add("dangling-reference", "link override from unknown domain '" + from + "'");
    if (sc.network.find_domain(to) == nullptr)
      add("dangling-reference", "link override to unknown domain '" + to + "'");
    if (p.loss < 0 || p.loss > 1 || p.corrupt < 0 || p.corrupt > 1 || p.delay < 0)
      add("link-params", "link override " + from + "->" + to + " out of range");
  }

  for (const Injection& i : sc.injections) {
    if (i.kind == InjectionKind::false_alarm) {
      if (sc.network.find_domain(i.domain) == nullptr)
        add("dangling-reference", "false alarm in unknown domain '" + i.domain + "'");
    } else if (sc.network.find_component(i.component) == nullptr) {
      add("dangling-reference", "injection names unknown component '" + i.component + "'");
    }
  }

  for (const ScenarioAction& a : sc.actions) {
    auto has_domain = [&](const char* key) {
      if (!a.params.contains(key) || !a.params[key].is_string()) return;
      const std::string d = a.params[key].get<std::string>();
      if (d == "all") return; // keyword, not a domain
      if (sc.network.find_domain(d) == nullptr)
        add("dangling-reference",
            "action at tick " + std::to_string(a.tick) + " names unknown domain '" + d + "'");
    };
    has_domain("domain");
    has_domain("requester");
    has_domain("actor");
    has_domain("target");
    if (a.params.contains("service") && a.params["service"].is_string() &&
        sc.network.find_service(a.params["service"].get<std::string>()) == nullptr)
      add("dangling-reference", "action at tick " + std::to_string(a.tick) +
                                    " names unknown service '" +
                                    a.params["service"].get<std::string>() + "'");
  }

  for (const protocol::Subscription& s : sc.subscriptions) {
    if (sc.network.find_domain(s.subscriber) == nullptr)
      add("dangling-reference", "subscription from unknown domain '" + s.subscriber + "'");
    if (sc.network.find_domain(s.publisher) == nullptr)
      add("dangling-reference", "subscription to unknown domain '" + s.publisher + "'");
  }
  for (const MaintenanceTask& m : sc.maintenance) {
    if (sc.network.find_domain(m.domain) == nullptr)
      add("dangling-reference", "maintenance in unknown domain '" + m.domain + "'");
    if (sc.network.find_component(m.component) == nullptr)
      add("dangling-reference", "maintenance on unknown component '" + m.component + "'");
  }
  for (const KnownErrorSeed& k : sc.known_errors) {
    if (sc.network.find_domain(k.domain) == nullptr)
      add("dangling-reference", "known error for unknown domain '" + k.domain + "'");
    if (sc.network.find_component(k.cause_component) == nullptr)
      add("dangling-reference", "known error names unknown component '" + k.cause_component + "'");
  }
  for (const auto& [sid, spec] : sc.slas)
    if (sc.network.find_service(sid) == nullptr)
      add("dangling-reference", "SLA for unknown service '" + sid + "'");

  if (sc.thresholds.t_isolate <= 0) add("thresholds", "tIsolate must be positive");
  if (sc.thresholds.repair_ticks <= 0) add("thresholds", "repairTicks must be positive");

  return report;
}

simnet::LinkModel make_link_model(const Scenario& sc) {
  simnet::LinkModel lm(sc.link_defaults, sc.seed);
  for (const auto& [from, to, p] : sc.link_overrides) lm.set_override(from, to, p);
  return lm;
}

} // namespace iofm::scenario

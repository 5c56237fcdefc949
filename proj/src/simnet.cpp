#include "iofm/simnet.hpp"

#include <algorithm>
#include <limits>

namespace iofm::simnet {

const char* sim_event_kind_name(SimEventKind k) {
  switch (k) {
    case SimEventKind::deliver: return "deliver";
    case SimEventKind::inject_fault: return "inject-fault";
    case SimEventKind::inject_false_alarm: return "inject-false-alarm";
    case SimEventKind::repair: return "repair";
    case SimEventKind::timer: return "timer";
  }
  return "?";
}

const char* delivery_outcome_name(DeliveryOutcome o) {
  switch (o) {
    case DeliveryOutcome::delivered: return "delivered";
    case DeliveryOutcome::dropped: return "dropped";
    case DeliveryOutcome::corrupted: return "corrupted-and-discarded";
  }
  return "?";
}

std::uint64_t EventQueue::push(Tick tick, SimEvent ev) {
  ev.tick = tick;
  ev.seq = next_seq_++;
  heap_.push(std::move(ev));
  return next_seq_ - 1;
}

SimEvent EventQueue::pop() {
  SimEvent ev = heap_.top();
  heap_.pop();
  return ev;
}

void InjectionRegistry::add(Injection inj) {
  if (sealed_) raise(Errc::misuse, "injection after run start");
  injections_.push_back(std::move(inj));
}

void InjectionRegistry::seal() {
  if (sealed_) return;
  sealed_ = true;
  // Fault intervals: an injected fault is active from its tick until an
  // explicit repair injection or its own repair_after, else open-ended.
  std::vector<std::pair<Tick, ComponentId>> repairs;
  for (const Injection& i : injections_)
    if (i.kind == InjectionKind::repair) repairs.emplace_back(i.tick, i.component);
  std::sort(repairs.begin(), repairs.end());
  for (const Injection& i : injections_) {
    if (i.kind != InjectionKind::fault) continue;
    FaultInterval iv;
    iv.from = i.tick;
    iv.degradation = i.degradation;
    if (i.repair_after) iv.to = i.tick + *i.repair_after;
    for (const auto& [rt, rc] : repairs) {
      if (rc == i.component && rt >= i.tick && (!iv.to || rt < *iv.to)) {
        iv.to = rt;
        break;
      }
    }
    intervals_[i.component].push_back(iv);
  }
}

bool InjectionRegistry::fault_overlaps(const ComponentId& c, Tick from, Tick to) const {
  auto it = intervals_.find(c);
  if (it == intervals_.end()) return false;
  for (const FaultInterval& iv : it->second) {
    Tick end = iv.to.value_or(std::numeric_limits<Tick>::max());
    if (iv.from <= to && from < end) return true;
  }
  return false;
}

void LinkModel::set_override(const DomainId& from, const DomainId& to, LinkParams p) {
  overrides_[{from, to}] = p;
}

const LinkParams& LinkModel::params(const DomainId& from, const DomainId& to) const {
  auto it = overrides_.find({from, to});
  return it == overrides_.end() ? defaults_ : it->second;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

double LinkModel::draw(const DomainId& from, const DomainId& to) {
  auto key = std::make_pair(from, to);
  auto it = stream_state_.find(key);
  if (it == stream_state_.end()) {
    std::uint64_t init = seed_ ^ fnv1a64(from + "->" + to);
    it = stream_state_.emplace(key, init).first;
  }
  std::uint64_t v = splitmix64(it->second);
  return static_cast<double>(v >> 11) * (1.0 / 9007199254740992.0); // 53-bit mantissa
}

ojson alarm_to_json(const Alarm& a) {
  ojson j;
  j["symptom"] = faultmodel::symptom_to_json(a.symptom);
  j["since"] = a.since;
  return j;
}

SimNet::SimNet(const topology::ProviderNetwork& net, LinkModel links, InjectionRegistry injections)
    : net_(net), links_(std::move(links)), injections_(std::move(injections)) {
  injections_.seal();
}

void SimNet::schedule_injections() {
  for (const Injection& i : injections_.all()) {
    SimEvent ev;
    switch (i.kind) {
      case InjectionKind::fault:
        ev.kind = SimEventKind::inject_fault;
        ev.component = i.component;
        ev.degradation = i.degradation;
        queue_.push(i.tick, std::move(ev));
        if (i.repair_after) {
          SimEvent rep;
          rep.kind = SimEventKind::repair;
          rep.component = i.component;
          queue_.push(i.tick + *i.repair_after, std::move(rep));
        }
        break;
      case InjectionKind::false_alarm:
        ev.kind = SimEventKind::inject_false_alarm;
        ev.domain = i.domain;
        ev.symptom = i.symptom;
        queue_.push(i.tick, std::move(ev));
        break;
      case InjectionKind::repair:
        ev.kind = SimEventKind::repair;
        ev.component = i.component;
        queue_.push(i.tick, std::move(ev));
        break;
    }
  }
}

void SimNet::send(protocol::Envelope env) {
  if (net_.find_domain(env.receiver) == nullptr)
    raise(Errc::routing_error, "unknown receiver domain '" + env.receiver + "'");
  if (!protocol::envelope_checksum_ok(env))
    raise(Errc::precondition_failed, "stale checksum on envelope " + env.msg_id);

  const LinkParams& lp = links_.params(env.sender, env.receiver);
  DeliveryOutcome outcome = DeliveryOutcome::delivered;
  if (lp.loss > 0.0 && links_.draw(env.sender, env.receiver) < lp.loss)
    outcome = DeliveryOutcome::dropped;
  else if (lp.corrupt > 0.0 && links_.draw(env.sender, env.receiver) < lp.corrupt)
    outcome = DeliveryOutcome::corrupted;

  counters_.sent++;
  sent_by_domain_[env.sender]++;

  SimEvent ev;
  ev.kind = SimEventKind::deliver;
  ev.outcome = outcome;
  ev.envelope = std::move(env);
  queue_.push(now_ + std::max<Tick>(0, lp.delay), std::move(ev));
}

void SimNet::schedule_timer(Tick at, TimerToken token) {
  if (at < now_) raise(Errc::misuse, "timer scheduled in the past");
  SimEvent ev;
  ev.kind = SimEventKind::timer;
  ev.token = std::move(token);
  queue_.push(at, std::move(ev));
}

void SimNet::schedule_repair(Tick at, const ComponentId& c) {
  if (at < now_) raise(Errc::misuse, "repair scheduled in the past");
  SimEvent ev;
  ev.kind = SimEventKind::repair;
  ev.component = c;
  queue_.push(at, std::move(ev));
}

bool SimNet::fault_overlaps(const ComponentId& c, Tick from, Tick to) const {
  return injections_.fault_overlaps(c, from, to);
}

std::vector<Alarm> SimNet::dms_alarms(const DomainId& d) const {
  std::vector<Alarm> alarms;
  const topology::Domain* dom = net_.find_domain(d);
  if (dom == nullptr) raise(Errc::invalid_reference, "unknown domain '" + d + "'");
  for (const ComponentId& c : dom->components) {
    if (!down_.count(c)) continue;
    Alarm a;
    a.symptom.scope = faultmodel::SymptomScope::component;
    a.symptom.target = c;
    a.symptom.deviation = "component-down";
    auto it = down_since_.find(c);
    a.since = it == down_since_.end() ? now_ : it->second;
    alarms.push_back(std::move(a));
  }
  auto it = false_alarms_.find(d);
  if (it != false_alarms_.end())
    alarms.insert(alarms.end(), it->second.begin(), it->second.end());
  std::sort(alarms.begin(), alarms.end(), [](const Alarm& a, const Alarm& b) {
    return a.symptom.signature() < b.symptom.signature();
  });
  return alarms;
}

bool SimNet::clear_false_alarm(const DomainId& d, const faultmodel::Symptom& s) {
  auto it = false_alarms_.find(d);
  if (it == false_alarms_.end()) return false;
  auto& list = it->second;
  auto match = std::find_if(list.begin(), list.end(), [&](const Alarm& a) {
    return a.symptom.signature() == s.signature();
  });
  if (match == list.end()) return false;
  list.erase(match);
  return true;
}

faultmodel::MetricVector SimNet::measured_part(const topology::ServicePart& part) const {
  faultmodel::MetricVector m = part.baseline;
  std::vector<ComponentId> down;
  for (const ComponentId& c : part.realized_by)
    if (down_.count(c)) down.push_back(c);
  std::sort(down.begin(), down.end());
  for (const ComponentId& c : down) {
    auto it = active_degradation_.find(c);
    const Degradation deg = it == active_degradation_.end() ? Degradation{} : it->second;
    m.availability *= deg.availability_factor;
    m.loss = std::min(1.0, m.loss + deg.loss_add);
    m.owd += deg.owd_add;
    m.ipdv += deg.ipdv_add;
  }
  return m;
}

std::uint64_t SimNet::sent_by(const DomainId& d) const {
  auto it = sent_by_domain_.find(d);
  return it == sent_by_domain_.end() ? 0 : it->second;
}

SimEvent SimNet::step() {
  SimEvent ev = queue_.pop();
  now_ = ev.tick; // (tick, seq) pop order keeps the clock monotone
  switch (ev.kind) {
    case SimEventKind::inject_fault:
      down_.insert(ev.component);
      active_degradation_[ev.component] = ev.degradation;
      down_since_.emplace(ev.component, ev.tick);
      break;
    case SimEventKind::repair:
      down_.erase(ev.component);
      active_degradation_.erase(ev.component);
      down_since_.erase(ev.component);
      break;
    case SimEventKind::inject_false_alarm:
      if (ev.symptom) false_alarms_[ev.domain].push_back(Alarm{*ev.symptom, ev.tick});
      break;
    case SimEventKind::deliver:
      switch (ev.outcome) {
        case DeliveryOutcome::delivered: counters_.delivered++; break;
        case DeliveryOutcome::dropped: counters_.dropped++; break;
        case DeliveryOutcome::corrupted: counters_.corrupted++; break;
      }
      break;
    case SimEventKind::timer:
      break;
  }
  trace_event(ev);
  return ev;
}

void SimNet::trace_event(const SimEvent& ev) {
  ojson j;
  j["tick"] = ev.tick;
  j["seq"] = ev.seq;
  j["kind"] = sim_event_kind_name(ev.kind);
  switch (ev.kind) {
    case SimEventKind::deliver:
      j["outcome"] = delivery_outcome_name(ev.outcome);
      j["envelope"] = protocol::envelope_to_json(*ev.envelope);
      break;
    case SimEventKind::inject_fault:
    case SimEventKind::repair:
      j["component"] = ev.component;
      break;
    case SimEventKind::inject_false_alarm:
      j["domain"] = ev.domain;
      j["symptom"] = ev.symptom ? faultmodel::symptom_to_json(*ev.symptom) : ojson(nullptr);
      break;
    case SimEventKind::timer:
      j["owner"] = ev.token.kind;
      if (!ev.token.a.empty()) j["a"] = ev.token.a;
      if (!ev.token.b.empty()) j["b"] = ev.token.b;
      break;
  }
  trace_.push_back(j.dump());
}

} // namespace iofm::simnet

#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "iofm/fault.hpp"
#include "iofm/protocol.hpp"
#include "iofm/topology.hpp"

namespace iofm::simnet {

enum class SimEventKind { deliver, inject_fault, inject_false_alarm, repair, timer };

const char* sim_event_kind_name(SimEventKind k);

enum class DeliveryOutcome { delivered, dropped, corrupted };

const char* delivery_outcome_name(DeliveryOutcome o);

struct TimerToken {
  std::string kind;
  std::string a; // fault id, view id, or similar
  std::string b;
};

// Effect an active fault has on the metrics of the service parts its
// component realizes. Default is a hard failure.
struct Degradation {
  double availability_factor{0.0};
  double loss_add{1.0};
  double owd_add{0.0};
  double ipdv_add{0.0};
};

struct SimEvent {
  Tick tick{0};
  std::uint64_t seq{0};
  SimEventKind kind{SimEventKind::timer};
  // deliver
  std::optional<protocol::Envelope> envelope;
  DeliveryOutcome outcome{DeliveryOutcome::delivered};
  // inject_fault / repair
  ComponentId component;
  Degradation degradation;
  // inject_false_alarm
  DomainId domain;
  std::optional<faultmodel::Symptom> symptom;
  // timer
  TimerToken token;
};

// Priority queue over (tick, seq); seq is assigned at push so same-tick
// events execute in insertion order.
class EventQueue {
 public:
  std::uint64_t push(Tick tick, SimEvent ev);
  bool empty() const { return heap_.empty(); }
  const SimEvent& top() const { return heap_.top(); }
  SimEvent pop();
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_{0};
};

enum class InjectionKind { fault, false_alarm, repair };

struct Injection {
  Tick tick{0};
  InjectionKind kind{InjectionKind::fault};
  ComponentId component;
  std::optional<Tick> repair_after; // faults only: scheduled ground-truth repair
  Degradation degradation;
  DomainId domain;                          // false alarms
  std::optional<faultmodel::Symptom> symptom; // false alarms
};

// Ground truth for the validation oracles. Append-only while the scenario is
// loaded, sealed before the run starts.
class InjectionRegistry {
 public:
  void add(Injection inj);
  void seal();
  bool sealed() const { return sealed_; }

  const std::vector<Injection>& all() const { return injections_; }

  struct FaultInterval {
    Tick from{0};
    std::optional<Tick> to; // open-ended when never repaired
    Degradation degradation;
  };

  const std::map<ComponentId, std::vector<FaultInterval>>& fault_intervals() const {
    return intervals_;
  }

  // Any ground-truth fault on the component overlapping [from, to].
  bool fault_overlaps(const ComponentId& c, Tick from, Tick to) const;

 private:
  std::vector<Injection> injections_;
  std::map<ComponentId, std::vector<FaultInterval>> intervals_;
  bool sealed_{false};
};

struct LinkParams {
  Tick delay{1};
  double loss{0.0};
  double corrupt{0.0};
};

// Deterministic per-link pseudo-random streams: the stream for a link depends
// only on (seed, from, to), so unrelated scenario edits do not shift it.
class LinkModel {
 public:
  LinkModel() = default;
  LinkModel(LinkParams defaults, std::uint64_t seed) : defaults_(defaults), seed_(seed) {}

  void set_override(const DomainId& from, const DomainId& to, LinkParams p);
  const LinkParams& params(const DomainId& from, const DomainId& to) const;

  // Uniform draw in [0,1) from the link's stream; consumes one value.
  double draw(const DomainId& from, const DomainId& to);

  std::uint64_t seed() const { return seed_; }

 private:
  LinkParams defaults_{};
  std::map<std::pair<DomainId, DomainId>, LinkParams> overrides_;
  std::uint64_t seed_{0};
  std::map<std::pair<DomainId, DomainId>, std::uint64_t> stream_state_;
};

struct Alarm {
  faultmodel::Symptom symptom;
  Tick since{0};
};

ojson alarm_to_json(const Alarm& a);

// What the engine needs from the simulated world: virtual time, transport,
// timers, and domain monitoring state.
class SimHost {
 public:
  virtual ~SimHost() = default;
  virtual Tick now() const = 0;
  virtual void send(protocol::Envelope env) = 0;
  virtual void schedule_timer(Tick at, TimerToken token) = 0;
  virtual void schedule_repair(Tick at, const ComponentId& c) = 0;
  virtual bool component_down(const ComponentId& c) const = 0;
  virtual bool fault_overlaps(const ComponentId& c, Tick from, Tick to) const = 0;
  virtual std::vector<Alarm> dms_alarms(const DomainId& d) const = 0;
  virtual bool clear_false_alarm(const DomainId& d, const faultmodel::Symptom& s) = 0;
  virtual faultmodel::MetricVector measured_part(const topology::ServicePart& part) const = 0;
};

struct TransportCounters {
  std::uint64_t sent{0};
  std::uint64_t delivered{0};
  std::uint64_t dropped{0};
  std::uint64_t corrupted{0};
};

// The deterministic discrete-event world: virtual clock, lossy transport,
// ground-truth fault state, and per-domain alarm sets. The run loop pops
// events and dispatches them; everything here is single-threaded per run.
class SimNet : public SimHost {
 public:
  SimNet(const topology::ProviderNetwork& net, LinkModel links, InjectionRegistry injections);

  // Loads injection events into the queue; called once before the run.
  void schedule_injections();

  Tick now() const override { return now_; }
  void send(protocol::Envelope env) override;
  void schedule_timer(Tick at, TimerToken token) override;
  void schedule_repair(Tick at, const ComponentId& c) override;
  bool component_down(const ComponentId& c) const override { return down_.count(c) > 0; }
  bool fault_overlaps(const ComponentId& c, Tick from, Tick to) const override;
  std::vector<Alarm> dms_alarms(const DomainId& d) const override;
  bool clear_false_alarm(const DomainId& d, const faultmodel::Symptom& s) override;
  faultmodel::MetricVector measured_part(const topology::ServicePart& part) const override;

  bool pending() const { return !queue_.empty(); }
  Tick next_tick() const { return queue_.top().tick; }

  // Advances the clock to the event's tick, applies world-state effects
  // (ground truth, alarms), writes the trace line, and returns the event for
  // engine dispatch.
  SimEvent step();

  const std::vector<std::string>& trace_lines() const { return trace_; }
  const TransportCounters& counters() const { return counters_; }
  const InjectionRegistry& injections() const { return injections_; }
  std::uint64_t sent_by(const DomainId& d) const;

 private:
  void trace_event(const SimEvent& ev);

  const topology::ProviderNetwork& net_;
  LinkModel links_;
  InjectionRegistry injections_;
  EventQueue queue_;
  Tick now_{0};
  std::set<ComponentId> down_;
  std::map<ComponentId, Degradation> active_degradation_;
  std::map<ComponentId, Tick> down_since_;
  std::map<DomainId, std::vector<Alarm>> false_alarms_;
  std::vector<std::string> trace_;
  TransportCounters counters_;
  std::map<DomainId, std::uint64_t> sent_by_domain_;
};

} // namespace iofm::simnet

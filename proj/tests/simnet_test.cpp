#include <doctest.h>

#include <algorithm>

#include "iofm/simnet.hpp"
#include "support.hpp"

using namespace iofm;
using namespace iofm::simnet;
using namespace iofm::test;

TEST_CASE("events pop in (tick, seq) order") {
  EventQueue q;
  SimEvent a, b, c;
  a.kind = b.kind = c.kind = SimEventKind::timer;
  a.token = {"t", "a", ""};
  b.token = {"t", "b", ""};
  c.token = {"t", "c", ""};
  q.push(9, a);
  q.push(3, b);
  q.push(9, c);
  CHECK(q.pop().token.a == "b"); // tick 3 first
  CHECK(q.pop().token.a == "a"); // then tick 9 in insertion order
  CHECK(q.pop().token.a == "c");
}

TEST_CASE("large random event sets pop in sorted order") {
  std::mt19937_64 rng(12345);
  EventQueue q;
  std::vector<std::pair<Tick, std::uint64_t>> inserted;
  for (int i = 0; i < 100000; ++i) {
    Tick t = static_cast<Tick>(rng() % 5000);
    SimEvent ev;
    ev.kind = SimEventKind::timer;
    std::uint64_t seq = q.push(t, ev);
    inserted.emplace_back(t, seq);
  }
  std::sort(inserted.begin(), inserted.end()); // comparison-sort oracle
  for (const auto& expect : inserted) {
    SimEvent ev = q.pop();
    CHECK(ev.tick == expect.first);
    CHECK(ev.seq == expect.second);
  }
  CHECK(q.empty());
}

TEST_CASE("injecting into a sealed registry is a misuse error") {
  InjectionRegistry reg;
  Injection inj;
  inj.kind = InjectionKind::fault;
  inj.component = "c";
  reg.add(inj);
  reg.seal();
  CHECK_THROWS_AS(reg.add(inj), Error);
}

TEST_CASE("fault intervals close at repairs and answer overlap queries") {
  InjectionRegistry reg;
  Injection f;
  f.kind = InjectionKind::fault;
  f.tick = 10;
  f.component = "c1";
  f.repair_after = 20;
  reg.add(f);
  Injection open_ended;
  open_ended.kind = InjectionKind::fault;
  open_ended.tick = 50;
  open_ended.component = "c2";
  reg.add(open_ended);
  reg.seal();
  CHECK(reg.fault_overlaps("c1", 5, 12));
  CHECK(reg.fault_overlaps("c1", 25, 28));
  CHECK(!reg.fault_overlaps("c1", 31, 40));
  CHECK(reg.fault_overlaps("c2", 60, 1000));
  CHECK(!reg.fault_overlaps("c2", 0, 49));
  CHECK(!reg.fault_overlaps("cX", 0, 100));
}

namespace {

scenario::Scenario lossy_scenario(double loss, double corrupt, std::uint64_t seed) {
  NetBuilder b;
  b.domain("A").domain("B");
  b.service("svc", "A", topology::DeliveryMode::hierarchical, {});
  scenario::Scenario sc = base_scenario(b.build(), seed, 50);
  sc.link_defaults = LinkParams{1, loss, corrupt};
  return sc;
}

} // namespace

TEST_CASE("sent envelopes reconcile as delivered, dropped or corrupted") {
  scenario::Scenario sc = lossy_scenario(0.3, 0.2, 99);
  SimNet sim(sc.network, scenario::make_link_model(sc), InjectionRegistry{});
  const int n = 500;
  for (int i = 0; i < n; ++i)
    sim.send(protocol::make_envelope("M-" + std::to_string(i), "A", "B", 0,
                                     protocol::MessageKind::LocalizationRequest,
                                     ojson{{"faultId", "F-1"}}));
  std::map<std::string, int> outcomes;
  while (sim.pending()) {
    SimEvent ev = sim.step();
    if (ev.kind == SimEventKind::deliver)
      outcomes[delivery_outcome_name(ev.outcome)]++;
  }
  const TransportCounters& c = sim.counters();
  CHECK(c.sent == n);
  CHECK(c.delivered + c.dropped + c.corrupted == c.sent);
  CHECK(outcomes["delivered"] == static_cast<int>(c.delivered));
  CHECK(outcomes["dropped"] == static_cast<int>(c.dropped));
  CHECK(outcomes["corrupted-and-discarded"] == static_cast<int>(c.corrupted));
  CHECK(c.dropped > 0);
  CHECK(c.corrupted > 0);
}

TEST_CASE("per-link streams are deterministic under the same seed") {
  auto trace_once = [] {
    scenario::Scenario sc = lossy_scenario(0.5, 0.1, 4242);
    SimNet sim(sc.network, scenario::make_link_model(sc), InjectionRegistry{});
    for (int i = 0; i < 100; ++i)
      sim.send(protocol::make_envelope("M-" + std::to_string(i), "A", "B", 0,
                                       protocol::MessageKind::LocalizationRequest,
                                       ojson{{"faultId", "F-1"}}));
    while (sim.pending()) sim.step();
    return sim.trace_lines();
  };
  CHECK(trace_once() == trace_once());
}

TEST_CASE("the clock never moves backwards") {
  scenario::Scenario sc = lossy_scenario(0.0, 0.0, 7);
  SimNet sim(sc.network, scenario::make_link_model(sc), InjectionRegistry{});
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i)
    sim.schedule_timer(static_cast<Tick>(rng() % 100), TimerToken{"t", std::to_string(i), ""});
  Tick last = -1;
  while (sim.pending()) {
    SimEvent ev = sim.step();
    CHECK(ev.tick >= last);
    last = ev.tick;
    CHECK(sim.now() == ev.tick);
  }
}

TEST_CASE("DMS observation reflects ground truth and injected phantom alarms") {
  NetBuilder b;
  b.domain("D", 2);
  b.service("svc", "D", topology::DeliveryMode::hierarchical, {});
  topology::ProviderNetwork net = b.build();

  SUBCASE("no injections, no alarms") {
    SimNet sim(net, LinkModel{}, InjectionRegistry{});
    CHECK(sim.dms_alarms("D").empty());
  }

  SUBCASE("an injected fault on an owned component raises one alarm") {
    InjectionRegistry reg;
    Injection inj;
    inj.kind = InjectionKind::fault;
    inj.tick = 3;
    inj.component = "c-D-0";
    reg.add(inj);
    SimNet sim(net, LinkModel{}, std::move(reg));
    sim.schedule_injections();
    while (sim.pending()) sim.step();
    std::vector<Alarm> alarms = sim.dms_alarms("D");
    REQUIRE(alarms.size() == 1);
    CHECK(alarms[0].symptom.target == "c-D-0");
    CHECK(alarms[0].since == 3);
    CHECK(sim.fault_overlaps("c-D-0", 3, 10)); // ground truth backs it
  }

  SUBCASE("an injected false alarm shows up without ground truth") {
    InjectionRegistry reg;
    Injection inj;
    inj.kind = InjectionKind::false_alarm;
    inj.tick = 4;
    inj.domain = "D";
    inj.symptom = faultmodel::Symptom{faultmodel::SymptomScope::component, "c-D-1", "flap",
                                      std::nullopt};
    reg.add(inj);
    SimNet sim(net, LinkModel{}, std::move(reg));
    sim.schedule_injections();
    while (sim.pending()) sim.step();
    std::vector<Alarm> alarms = sim.dms_alarms("D");
    REQUIRE(alarms.size() == 1);
    CHECK(alarms[0].symptom.deviation == "flap");
    CHECK(!sim.fault_overlaps("c-D-1", 0, 100)); // no real deviation behind it
    // clearing removes it
    CHECK(sim.clear_false_alarm("D", alarms[0].symptom));
    CHECK(sim.dms_alarms("D").empty());
    CHECK(!sim.clear_false_alarm("D", alarms[0].symptom));
  }
}

TEST_CASE("degraded parts reflect active faults in measurements") {
  NetBuilder b;
  b.domain("D", 1);
  b.part("p", "D", {"c-D-0"}, faultmodel::MetricVector{5.0, 1.0, 0.001, 0.999});
  b.service("svc", "D", topology::DeliveryMode::hierarchical, {"p"});
  topology::ProviderNetwork net = b.build();

  InjectionRegistry reg;
  Injection inj;
  inj.kind = InjectionKind::fault;
  inj.tick = 1;
  inj.component = "c-D-0";
  inj.degradation = Degradation{0.5, 0.2, 10.0, 2.0};
  reg.add(inj);
  SimNet sim(net, LinkModel{}, std::move(reg));
  sim.schedule_injections();
  while (sim.pending()) sim.step();

  faultmodel::MetricVector m = sim.measured_part(*net.find_part("p"));
  CHECK(m.owd == doctest::Approx(15.0));
  CHECK(m.ipdv == doctest::Approx(3.0));
  CHECK(m.loss == doctest::Approx(0.201));
  CHECK(m.availability == doctest::Approx(0.4995));
}

TEST_CASE("stale timers in the past are rejected") {
  scenario::Scenario sc = lossy_scenario(0.0, 0.0, 7);
  SimNet sim(sc.network, scenario::make_link_model(sc), InjectionRegistry{});
  sim.schedule_timer(10, TimerToken{"t", "", ""});
  while (sim.pending()) sim.step();
  CHECK(sim.now() == 10);
  CHECK_THROWS_AS(sim.schedule_timer(5, TimerToken{"t", "", ""}), Error);
}

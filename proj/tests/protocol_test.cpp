#include <doctest.h>

#include "iofm/protocol.hpp"
#include "iofm/simnet.hpp"
#include "support.hpp"

using namespace iofm;
using namespace iofm::protocol;
using namespace iofm::test;

TEST_CASE("envelope wire format has the fixed key order and round-trips") {
  ojson payload;
  payload["faultId"] = "F-0001";
  payload["useCase"] = "L02";
  Envelope e = make_envelope("M-0001", "P3", "P0", 21, MessageKind::FaultReport, payload);
  ojson j = envelope_to_json(e);
  std::string wire = j.dump();

  const char* keys[] = {"\"msgId\"", "\"sender\"", "\"receiver\"", "\"sentAt\"", "\"kind\"",
                        "\"checksum\"", "\"payload\""};
  std::size_t pos = 0;
  for (const char* key : keys) {
    std::size_t at = wire.find(key, pos);
    REQUIRE(at != std::string::npos);
    pos = at;
  }
  CHECK(wire.find("correlationId") == std::string::npos); // one-way kind

  Envelope back = envelope_from_json(ojson::parse(wire));
  CHECK(back.msg_id == e.msg_id);
  CHECK(back.kind == e.kind);
  CHECK(back.checksum == e.checksum);
  CHECK(envelope_checksum_ok(back));
}

TEST_CASE("tampered payloads fail checksum verification") {
  Envelope e = make_envelope("M-1", "A", "B", 1, MessageKind::LocalizationRequest,
                             ojson{{"faultId", "F-1"}});
  CHECK(envelope_checksum_ok(e));
  e.payload["faultId"] = "F-2";
  CHECK(!envelope_checksum_ok(e));
}

TEST_CASE("responses require a correlation id and senders differ from receivers") {
  CHECK_THROWS_AS((void)make_envelope("M-1", "A", "A", 1, MessageKind::FaultReport, ojson{}),
                  Error);
  CHECK_THROWS_AS(
      (void)make_envelope("M-1", "A", "B", 1, MessageKind::LocalizationResponse,
                          ojson{{"faultId", "F-1"}, {"found", false}}),
      Error);
}

TEST_CASE("request and response kinds pair one to one") {
  std::set<MessageKind> responses;
  for (MessageKind req : {MessageKind::LocalizationRequest, MessageKind::ProgressQuery,
                          MessageKind::MonitorQuery, MessageKind::ReportRequest,
                          MessageKind::FalsePositiveQuery, MessageKind::DataChangeRequest}) {
    auto resp = response_kind_of(req);
    REQUIRE(resp.has_value());
    CHECK(is_response_kind(*resp));
    CHECK(responses.insert(*resp).second); // distinct
  }
  CHECK(!response_kind_of(MessageKind::Notify).has_value());
  CHECK(!is_response_kind(MessageKind::FaultReport));
}

TEST_CASE("payload validation lists the missing fields") {
  auto missing = validate_payload(MessageKind::MonitorResponse, ojson{{"viewId", "V-1"}});
  CHECK(missing == std::vector<std::string>{"alarms", "asOf"});
  CHECK(validate_payload(MessageKind::Notify,
                         ojson{{"topic", "t"}, {"event", ojson::object()}, {"asOf", 1}})
            .empty());
}

TEST_CASE("duplicate subscriptions are rejected") {
  SubscriptionTable table;
  table.add({"S1", "PUB", "fault-status", 0});
  CHECK_THROWS_AS(table.add({"S1", "PUB", "fault-status", 3}), Error);
  table.add({"S1", "PUB", "monitoring", 0}); // different topic is fine
}

TEST_CASE("publish yields one notification per matching subscriber") {
  SubscriptionTable table;
  table.add({"S1", "PUB", "fault-status", 0});
  table.add({"S2", "PUB", "fault-status", 0});
  table.add({"S3", "PUB", "monitoring", 0});
  std::uint64_t seq = 0;
  auto notes = make_notifications(table, "PUB", "fault-status", ojson{{"faultId", "F-1"}}, 7, seq);
  REQUIRE(notes.size() == 2);
  CHECK(notes[0].receiver == "S1");
  CHECK(notes[1].receiver == "S2");
  CHECK(notes[0].payload["asOf"] == 7);
  CHECK(make_notifications(table, "PUB", "other-topic", ojson::object(), 7, seq).empty());
}

namespace {

topology::ProviderNetwork pair_net() {
  NetBuilder b;
  b.domain("A").domain("B").domain("C");
  b.service("svc", "A", topology::DeliveryMode::hierarchical, {});
  return b.build();
}

} // namespace

TEST_CASE("delivery between a fixed pair is FIFO") {
  topology::ProviderNetwork net = pair_net();
  simnet::LinkModel links(simnet::LinkParams{3, 0.0, 0.0}, 1);
  simnet::SimNet sim(net, links, simnet::InjectionRegistry{});

  for (int i = 0; i < 100; ++i) {
    ojson payload;
    payload["seq"] = i; // sequence-number oracle
    sim.send(protocol::make_envelope("M-" + std::to_string(i), "A", "B", 0,
                                     MessageKind::Notify,
                                     ojson{{"topic", "t"}, {"event", payload}, {"asOf", 0}}));
  }
  int expect = 0;
  while (sim.pending()) {
    simnet::SimEvent ev = sim.step();
    if (ev.kind != simnet::SimEventKind::deliver) continue;
    CHECK(ev.envelope->payload["event"]["seq"] == expect);
    expect++;
  }
  CHECK(expect == 100);
}

TEST_CASE("fig1 run produces no orphan responses") {
  scenario::Scenario sc =
      scenario::load_scenario(std::string(IOFM_SCENARIO_DIR) + "/fig1-mixed.json");
  simrun::SimResult result = simrun::run_scenario(sc);

  std::set<MsgId> delivered_requests;
  for (const std::string& line : result.trace_lines) {
    ojson j = ojson::parse(line);
    if (j["kind"] != "deliver" || j["outcome"] != "delivered") continue;
    const ojson& env = j["envelope"];
    MessageKind kind = message_kind_from_name(env["kind"].get<std::string>());
    if (!is_response_kind(kind)) {
      delivered_requests.insert(env["msgId"].get<std::string>());
      continue;
    }
    REQUIRE(env.contains("correlationId"));
    CHECK(delivered_requests.count(env["correlationId"].get<std::string>()) == 1);
  }
}

TEST_CASE("push and pull reconstruct the same state after quiescence") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    topology::ProviderNetwork net = pair_net();
    simnet::LinkModel links(simnet::LinkParams{static_cast<Tick>(1 + rng() % 3), 0.0, 0.0},
                            rng());
    simnet::SimNet sim(net, links, simnet::InjectionRegistry{});
    SubscriptionTable table;
    table.add({"B", "A", "fault-status", 0});
    table.add({"C", "A", "fault-status", 0});

    std::map<std::string, std::string> truth; // publisher-side state
    std::uint64_t seq = 0;
    const char* states[] = {"Detected", "Localizing", "Isolated", "Repairing", "Resolved",
                            "Closed"};
    for (int i = 0; i < 25; ++i) {
      std::string fid = "F-" + std::to_string(rng() % 5);
      std::string st = states[rng() % 6];
      truth[fid] = st;
      ojson event;
      event["faultId"] = fid;
      event["state"] = st;
      for (Envelope& e : make_notifications(table, "A", "fault-status", event, i, seq))
        sim.send(std::move(e));
    }

    std::map<DomainId, std::map<std::string, std::string>> folded;
    while (sim.pending()) {
      simnet::SimEvent ev = sim.step();
      if (ev.kind != simnet::SimEventKind::deliver) continue;
      const ojson& event = ev.envelope->payload["event"];
      folded[ev.envelope->receiver][event["faultId"].get<std::string>()] =
          event["state"].get<std::string>();
    }
    // pull after quiescence: one query/response round trip with the truth
    ojson pulled = ojson::object();
    for (const auto& [fid, st] : truth) pulled[fid] = st;
    sim.send(make_envelope("M-pull-q", "B", "A", 100, MessageKind::ProgressQuery,
                           ojson{{"viewId", "V-pull"}, {"scope", "resolution"}}));
    sim.send(make_envelope("M-pull-r", "A", "B", 101, MessageKind::ProgressResponse,
                           ojson{{"viewId", "V-pull"}, {"entry", pulled}}, MsgId{"M-pull-q"}));
    std::map<std::string, std::string> via_pull;
    while (sim.pending()) {
      simnet::SimEvent ev = sim.step();
      if (ev.kind == simnet::SimEventKind::deliver &&
          ev.envelope->kind == MessageKind::ProgressResponse)
        for (const auto& [fid, st] : ev.envelope->payload["entry"].items())
          via_pull[fid] = st.get<std::string>();
    }

    CHECK(folded["B"] == truth);
    CHECK(folded["C"] == truth);
    CHECK(via_pull == truth);
  }
}

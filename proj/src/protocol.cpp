#include "iofm/protocol.hpp"

#include <algorithm>

namespace iofm::protocol {

namespace {

struct KindInfo {
  MessageKind kind;
  const char* name;
};

const KindInfo kKinds[] = {
    {MessageKind::FaultReport, "FaultReport"},
    {MessageKind::LocalizationRequest, "LocalizationRequest"},
    {MessageKind::LocalizationResponse, "LocalizationResponse"},
    {MessageKind::ProgressQuery, "ProgressQuery"},
    {MessageKind::ProgressResponse, "ProgressResponse"},
    {MessageKind::MonitorQuery, "MonitorQuery"},
    {MessageKind::MonitorResponse, "MonitorResponse"},
    {MessageKind::ReportRequest, "ReportRequest"},
    {MessageKind::ReportResponse, "ReportResponse"},
    {MessageKind::FalsePositiveQuery, "FalsePositiveQuery"},
    {MessageKind::FalsePositiveResponse, "FalsePositiveResponse"},
    {MessageKind::DataChangeRequest, "DataChangeRequest"},
    {MessageKind::DataChangeAck, "DataChangeAck"},
    {MessageKind::Subscribe, "Subscribe"},
    {MessageKind::Notify, "Notify"},
    {MessageKind::EscalationNotice, "EscalationNotice"},
};

} // namespace

const char* message_kind_name(MessageKind k) {
  for (const KindInfo& i : kKinds)
    if (i.kind == k) return i.name;
  return "?";
}

MessageKind message_kind_from_name(const std::string& name) {
  for (const KindInfo& i : kKinds)
    if (name == i.name) return i.kind;
  raise(Errc::parse_error, "unknown message kind '" + name + "'");
}

bool is_response_kind(MessageKind k) {
  switch (k) {
    case MessageKind::LocalizationResponse:
    case MessageKind::ProgressResponse:
    case MessageKind::MonitorResponse:
    case MessageKind::ReportResponse:
    case MessageKind::FalsePositiveResponse:
    case MessageKind::DataChangeAck:
      return true;
    default:
      return false;
  }
}

std::optional<MessageKind> response_kind_of(MessageKind request) {
  switch (request) {
    case MessageKind::LocalizationRequest: return MessageKind::LocalizationResponse;
    case MessageKind::ProgressQuery: return MessageKind::ProgressResponse;
    case MessageKind::MonitorQuery: return MessageKind::MonitorResponse;
    case MessageKind::ReportRequest: return MessageKind::ReportResponse;
    case MessageKind::FalsePositiveQuery: return MessageKind::FalsePositiveResponse;
    case MessageKind::DataChangeRequest: return MessageKind::DataChangeAck;
    default: return std::nullopt;
  }
}

std::string payload_checksum(const ojson& payload) { return checksum_hex(payload.dump()); }

Envelope make_envelope(MsgId id, DomainId sender, DomainId receiver, Tick sent_at,
                       MessageKind kind, ojson payload, std::optional<MsgId> correlation) {
  if (sender == receiver)
    raise(Errc::misuse, "envelope sender equals receiver ('" + sender + "')");
  if (is_response_kind(kind) && !correlation)
    raise(Errc::misuse, std::string("response kind ") + message_kind_name(kind) +
                            " without correlation id");
  Envelope e;
  e.msg_id = std::move(id);
  e.sender = std::move(sender);
  e.receiver = std::move(receiver);
  e.sent_at = sent_at;
  e.kind = kind;
  e.correlation_id = std::move(correlation);
  e.payload = std::move(payload);
  e.checksum = payload_checksum(e.payload);
  return e;
}

ojson envelope_to_json(const Envelope& e) {
  ojson j;
  j["msgId"] = e.msg_id;
  j["sender"] = e.sender;
  j["receiver"] = e.receiver;
  j["sentAt"] = e.sent_at;
  j["kind"] = message_kind_name(e.kind);
  if (e.correlation_id) j["correlationId"] = *e.correlation_id;
  j["checksum"] = e.checksum;
  j["payload"] = e.payload;
  return j;
}

Envelope envelope_from_json(const ojson& j) {
  Envelope e;
  e.msg_id = j.at("msgId").get<std::string>();
  e.sender = j.at("sender").get<std::string>();
  e.receiver = j.at("receiver").get<std::string>();
  e.sent_at = j.at("sentAt").get<Tick>();
  e.kind = message_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("correlationId") && !j["correlationId"].is_null())
    e.correlation_id = j["correlationId"].get<std::string>();
  e.checksum = j.at("checksum").get<std::string>();
  e.payload = j.at("payload");
  return e;
}

bool envelope_checksum_ok(const Envelope& e) { return e.checksum == payload_checksum(e.payload); }

std::vector<std::string> validate_payload(MessageKind kind, const ojson& payload) {
  std::vector<std::string> missing;
  auto need = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (!payload.contains(k)) missing.push_back(k);
  };
  switch (kind) {
    case MessageKind::FaultReport: need({"faultId", "useCase"}); break;
    case MessageKind::LocalizationRequest: need({"faultId"}); break;
    case MessageKind::LocalizationResponse: need({"faultId", "found"}); break;
    case MessageKind::ProgressQuery: need({"viewId", "scope"}); break;
    case MessageKind::ProgressResponse: need({"viewId", "entry"}); break;
    case MessageKind::MonitorQuery: need({"viewId"}); break;
    case MessageKind::MonitorResponse: need({"viewId", "alarms", "asOf"}); break;
    case MessageKind::ReportRequest: need({"viewId", "from", "to"}); break;
    case MessageKind::ReportResponse: need({"viewId", "row"}); break;
    case MessageKind::FalsePositiveQuery: need({"faultId"}); break;
    case MessageKind::FalsePositiveResponse: need({"faultId", "verdict"}); break;
    case MessageKind::DataChangeRequest: need({"faultId", "patch"}); break;
    case MessageKind::DataChangeAck: need({"faultId", "accepted"}); break;
    case MessageKind::Subscribe: need({"topic"}); break;
    case MessageKind::Notify: need({"topic", "event", "asOf"}); break;
    case MessageKind::EscalationNotice: need({"faultId", "reason"}); break;
  }
  return missing;
}

void SubscriptionTable::add(const Subscription& s) {
  for (const Subscription& existing : subs_)
    if (existing.subscriber == s.subscriber && existing.publisher == s.publisher &&
        existing.topic == s.topic)
      raise(Errc::misuse, "duplicate subscription " + s.subscriber + " -> " + s.publisher + " (" +
                              s.topic + ")");
  subs_.push_back(s);
}

std::vector<DomainId> SubscriptionTable::subscribers(const DomainId& publisher,
                                                     const std::string& topic) const {
  std::vector<DomainId> out;
  for (const Subscription& s : subs_)
    if (s.publisher == publisher && s.topic == topic) out.push_back(s.subscriber);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Envelope> make_notifications(const SubscriptionTable& table, const DomainId& publisher,
                                         const std::string& topic, const ojson& event, Tick tick,
                                         std::uint64_t& msg_seq) {
  std::vector<Envelope> out;
  for (const DomainId& sub : table.subscribers(publisher, topic)) {
    if (sub == publisher) continue;
    ojson payload;
    payload["topic"] = topic;
    payload["event"] = event;
    payload["asOf"] = tick;
    out.push_back(make_envelope("M-" + std::to_string(++msg_seq), publisher, sub, tick,
                                MessageKind::Notify, std::move(payload)));
  }
  return out;
}

} // namespace iofm::protocol

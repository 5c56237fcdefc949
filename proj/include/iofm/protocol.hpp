#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iofm/errors.hpp"
#include "iofm/ids.hpp"
#include "iofm/jsonio.hpp"

namespace iofm::protocol {

enum class MessageKind {
  FaultReport,
  LocalizationRequest,
  LocalizationResponse,
  ProgressQuery,
  ProgressResponse,
  MonitorQuery,
  MonitorResponse,
  ReportRequest,
  ReportResponse,
  FalsePositiveQuery,
  FalsePositiveResponse,
  DataChangeRequest,
  DataChangeAck,
  Subscribe,
  Notify,
  EscalationNotice,
};

const char* message_kind_name(MessageKind k);
MessageKind message_kind_from_name(const std::string& name);

bool is_response_kind(MessageKind k);
// Response kind answering the given request kind; nullopt for one-way kinds.
std::optional<MessageKind> response_kind_of(MessageKind request);

// Integrity-protected inter-domain message. The checksum covers the canonical
// payload serialization; correlationId must be present on every response.
struct Envelope {
  MsgId msg_id;
  DomainId sender;
  DomainId receiver;
  Tick sent_at{0};
  MessageKind kind{MessageKind::FaultReport};
  std::optional<MsgId> correlation_id;
  std::string checksum;
  ojson payload;
};

std::string payload_checksum(const ojson& payload);

Envelope make_envelope(MsgId id, DomainId sender, DomainId receiver, Tick sent_at,
                       MessageKind kind, ojson payload,
                       std::optional<MsgId> correlation = std::nullopt);

// Wire format, fixed key order: msgId, sender, receiver, sentAt, kind,
// correlationId (omitted on one-way kinds), checksum, payload.
ojson envelope_to_json(const Envelope& e);
Envelope envelope_from_json(const ojson& j);

bool envelope_checksum_ok(const Envelope& e);

// Required payload fields per message kind; violations are listed.
std::vector<std::string> validate_payload(MessageKind kind, const ojson& payload);

struct Subscription {
  DomainId subscriber;
  DomainId publisher;
  std::string topic; // "fault-status" or "monitoring"
  Tick since{0};

  bool operator==(const Subscription&) const = default;
};

class SubscriptionTable {
 public:
  // Duplicate (subscriber, publisher, topic) is rejected.
  void add(const Subscription& s);
  const std::vector<Subscription>& all() const { return subs_; }
  std::vector<DomainId> subscribers(const DomainId& publisher, const std::string& topic) const;

 private:
  std::vector<Subscription> subs_;
};

// One Notify envelope per matching subscriber; the payload carries the event
// and an asOf staleness stamp so receivers can reject outdated data.
std::vector<Envelope> make_notifications(const SubscriptionTable& table, const DomainId& publisher,
                                         const std::string& topic, const ojson& event, Tick tick,
                                         std::uint64_t& msg_seq);

} // namespace iofm::protocol

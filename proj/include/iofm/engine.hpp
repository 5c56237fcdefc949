#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iofm/adapter.hpp"
#include "iofm/orgmodel.hpp"
#include "iofm/registry.hpp"
#include "iofm/scenario.hpp"
#include "iofm/simnet.hpp"
#include "iofm/topology.hpp"

namespace iofm::engine {

enum class UseCase { L01, L02, L03, P01, P02, M01, M02, M03, R01, R02, R03, F01, F02 };

constexpr std::array<UseCase, 13> all_use_cases() {
  return {UseCase::L01, UseCase::L02, UseCase::L03, UseCase::P01, UseCase::P02,
          UseCase::M01, UseCase::M02, UseCase::M03, UseCase::R01, UseCase::R02,
          UseCase::R03, UseCase::F01, UseCase::F02};
}

const char* use_case_name(UseCase u);
UseCase use_case_from_name(const std::string& name);

// Which use cases a delivery structure supports. A pure hierarchy has no
// undefined-domain localization, no overall monitoring and no false-positive
// handling across domains; a pure heterarchy has no known-domain forwarding.
struct CapabilityMatrix {
  topology::TopologyClass topo_class{topology::TopologyClass::hierarchy};
  std::map<UseCase, bool> supported;
};

CapabilityMatrix capability_matrix(const topology::ProviderNetwork& net);

// Requirement rows of the phase-coverage matrix: the 13 use cases plus data
// presentation ("FM-01") and controlled data change ("FM-02"), each mapped to
// the lifecycle phases its activity touches. The engine stamps these tags
// into the audit log as the corresponding flows execute.
const std::vector<std::pair<std::string, std::vector<faultmodel::LifecyclePhase>>>& phase_rows();

struct LocalizationOutcome {
  enum class Result { pending, isolated, escalated, false_positive };

  FaultId fault_id;
  Result result{Result::pending};
  DomainId domain;
  ComponentId component;
  Tick elapsed_ticks{0};
  std::uint64_t message_count{0};
};

const char* outcome_result_name(LocalizationOutcome::Result r);

struct MonitorEntry {
  DomainId domain;
  std::vector<simnet::Alarm> alarms;
  bool responded{false};
  bool denied{false};
  Tick as_of{0};
  bool stale{false};
};

struct MonitoringView {
  std::string view_id;
  std::string scope_kind; // "domain" | "overall" | "service"
  std::string scope_id;
  DomainId requester;
  Tick requested_at{0};
  Tick assembled_at{0};
  bool partial{false};
  std::vector<MonitorEntry> entries;
};

struct ProgressItem {
  FaultId fault_id;
  faultmodel::LifecycleState state{faultmodel::LifecycleState::Detected};
  Tick last_tick{0};
};

struct MaintenanceStatus {
  ComponentId component;
  Tick start{0};
  Tick duration{0};
  std::string status; // "scheduled" | "in-progress" | "completed"
};

struct ProgressEntry {
  DomainId domain;
  bool responded{false};
  bool denied{false};
  Tick as_of{0};
  bool stale{false};
  std::vector<ProgressItem> items;
  std::vector<MaintenanceStatus> maintenance;
};

struct ProgressView {
  std::string view_id;
  std::string scope; // "resolution" | "maintenance"
  DomainId requester;
  std::optional<DomainId> target; // absent = all domains
  Tick requested_at{0};
  Tick assembled_at{0};
  std::vector<ProgressEntry> entries;
};

struct StatisticsRow {
  DomainId domain;
  std::uint64_t fault_count{0};
  std::optional<double> mean_tt_isolate;
  std::optional<double> mean_tt_repair;
  std::uint64_t messages_sent{0};
  bool responded{true};
};

struct StatisticsReport {
  Tick from{0};
  Tick to{0};
  bool incomplete{false};
  std::vector<StatisticsRow> rows;
  Tick assembled_at{0};
};

struct QosRow {
  ServiceId service;
  std::string metric;
  double measured{0};
  double bound{0};
  bool violated{false};
};

struct QosReport {
  Tick at{0};
  std::vector<QosRow> rows;
};

struct TrendRow {
  DomainId domain;
  double slope{0};
  double intercept{0};
  std::optional<Tick> breach_tick;
};

struct TrendReport {
  Tick from{0};
  Tick to{0};
  double threshold{0};
  std::vector<TrendRow> rows;
};

struct LinearFit {
  double slope{0};
  double intercept{0};
};

// Ordinary least squares over (x, y) points.
LinearFit linear_fit(std::span<const std::pair<double, double>> points);

struct UseCaseExecution {
  std::string use_case;
  Tick tick{0};
  std::string status; // "started" | "completed" | error code
  ojson detail;
};

// Orchestrates the fault-management use cases over the simulated provider
// network: detection entry points, localization coordination, progress and
// monitoring views, reporting, false-positive handling and controlled data
// change. One engine instance per simulation run, driven by the event loop.
class Engine {
 public:
  Engine(const scenario::Scenario& sc, simnet::SimHost& host);

  // --- customer management -------------------------------------------------
  FaultId open_fault_report(const CustomerId& customer, const ServiceId& service,
                            const faultmodel::Symptom& symptom, Tick tick);

  // --- detection via DMS alarms or a DFM's manual report -------------------
  FaultId report_alarm(const DomainId& domain, const faultmodel::Symptom& symptom,
                       std::optional<ServiceId> suspected, orgmodel::RoleKind reporter, Tick tick);

  // Ingest a fault report in a domain's native format through its adapter.
  FaultId report_local_document(const DomainId& domain, const std::string& format_id,
                                const faultmodel::LocalDocument& doc, Tick tick);

  // --- localization scoped to one known domain -----------------------------
  void localize_specific_domain(const FaultId& fault, const DomainId& target, Tick tick);

  // --- progress management --------------------------------------------------
  std::string progress_query(const DomainId& requester, const std::string& scope,
                             std::optional<DomainId> target, Tick tick);

  // --- monitoring -----------------------------------------------------------
  std::string monitor_domain(const DomainId& requester, const DomainId& target, Tick tick);
  std::string monitor_overall(const DomainId& requester, Tick tick);
  std::string monitor_service(const DomainId& requester, const ServiceId& service, Tick tick);

  // --- reporting ------------------------------------------------------------
  std::string report_statistics(const DomainId& requester, Tick from, Tick to, Tick tick);
  QosReport report_qos(const DomainId& requester, Tick tick);
  TrendReport report_trend(const DomainId& requester, Tick from, Tick to, Tick tick);

  // --- false positives --------------------------------------------------------
  void false_positive_check(const DomainId& requester, const FaultId& fault, Tick tick);
  void false_positive_remove(const DomainId& actor, const FaultId& fault, Tick tick);

  // --- controlled data change -------------------------------------------------
  faultmodel::FaultRecord data_change(const DomainId& actor, const FaultId& fault,
                                      const DataPatch& patch, Tick tick);
  void request_data_change(const DomainId& requester, const FaultId& fault, const DataPatch& patch,
                           Tick tick);

  // --- plot-data export (visual presentation surface) -------------------------
  void export_plot_data(Tick tick);

  // --- subscriptions ----------------------------------------------------------
  void subscribe(const DomainId& subscriber, const DomainId& publisher, const std::string& topic,
                 Tick tick);

  // --- event-loop callbacks ----------------------------------------------------
  void on_deliver(const protocol::Envelope& env, Tick tick);
  void on_corrupted(const protocol::Envelope& env, Tick tick);
  void on_timer(const simnet::TimerToken& token, Tick tick);
  void on_component_repaired(const ComponentId& c, Tick tick);
  void on_injected_fault(const ComponentId& c, Tick tick);
  void on_injected_false_alarm(const DomainId& d, const faultmodel::Symptom& s, Tick tick);

  void finalize(Tick horizon);

  // Scripted action that the engine rejected (capability, access, scope, ...):
  // recorded in the use-case log and audit trail, the run continues.
  void record_rejection(const std::string& activity, Tick tick, const std::string& code,
                        ojson detail);

  // --- state access --------------------------------------------------------
  const FaultRegistry& registry() const { return registry_; }
  const orgmodel::RoleTable& roles() const { return roles_; }
  const orgmodel::AccessPolicy& policy() const { return policy_; }
  const std::map<FaultId, LocalizationOutcome>& outcomes() const { return outcomes_; }
  const std::vector<MonitoringView>& monitoring_views() const { return monitoring_views_; }
  const std::vector<ProgressView>& progress_views() const { return progress_views_; }
  const std::vector<StatisticsReport>& statistics_reports() const { return statistics_reports_; }
  const std::vector<QosReport>& qos_reports() const { return qos_reports_; }
  const std::vector<TrendReport>& trend_reports() const { return trend_reports_; }
  const std::vector<UseCaseExecution>& use_case_log() const { return use_case_log_; }
  const ojson& plot_data() const { return plot_data_; }
  const std::map<DomainId, std::map<FaultId, std::string>>& notify_state() const {
    return notify_state_;
  }
  std::optional<FaultId> find_fault_by_service(const ServiceId& s) const;
  std::optional<FaultId> find_fault_by_origin(const DomainId& d) const;

  // Distinct (requirement row, phase) pairs stamped into the audit log.
  std::set<std::pair<std::string, std::string>> observed_coverage() const;

  const CapabilityMatrix& capabilities() const { return caps_; }

 private:
  struct LocalizationTask {
    UseCase use_case{UseCase::L01};
    Tick started{0};
    DomainId gfcm;
    std::set<DomainId> queried;
    std::deque<DomainId> descent;
    std::set<MsgId> open_requests;
    bool round2_done{false};
    bool concluded{false};
    bool deadline_scheduled{false};
  };

  struct PendingView {
    std::string view_id;
    UseCase use_case{UseCase::M01};
    DomainId requester;
    std::string scope_kind;
    std::string scope_id;
    Tick requested_at{0};
    std::set<DomainId> expected;
    std::map<DomainId, MonitorEntry> monitor_entries;
    std::map<DomainId, ProgressEntry> progress_entries;
    std::map<DomainId, StatisticsRow> stat_rows;
    Tick from{0};
    Tick to{0};
    bool assembled{false};
  };

  // entry/flow helpers
  FaultId open_or_attach(const DomainId& origin, orgmodel::RoleKind reporter,
                         std::optional<ServiceId> suspected, const faultmodel::Symptom& symptom,
                         Tick tick, const std::string& via);
  void start_l01(const FaultId& fault, Tick tick);
  void start_l02(const FaultId& fault, Tick tick);
  void start_l03_descent(const FaultId& fault, Tick tick);
  void gfcm_receive_report(const FaultId& fault, UseCase uc,
                           const std::optional<DomainId>& target, Tick tick);
  void dispatch_next_l03(const FaultId& fault, Tick tick);
  std::optional<ComponentId> dfo_search(const DomainId& domain,
                                        const faultmodel::FaultRecord& record, Tick tick);
  void isolate_fault(const FaultId& fault, const DomainId& domain, const ComponentId& component,
                     Tick tick);
  void escalate_fault(const FaultId& fault, Tick tick);
  void ensure_isolation_deadline(const FaultId& fault, Tick tick);
  void do_l02_round2(const FaultId& fault, Tick tick);
  void conclude_if_exhausted(const FaultId& fault, Tick tick);
  void apply_fp_verdict(const FaultId& fault, Tick tick);

  // protocol helpers
  MsgId send_envelope(protocol::MessageKind kind, const DomainId& sender, const DomainId& receiver,
                      ojson payload, Tick tick, std::optional<MsgId> correlation = std::nullopt);
  void publish_fault_status(const faultmodel::FaultRecord& record, Tick tick);
  void transition_record(const FaultId& fault, faultmodel::LifecycleState to,
                         const orgmodel::RoleBinding& actor, Tick tick);

  // view helpers
  std::string new_view_id();
  void request_monitor_entries(PendingView& pv, Tick tick);
  void try_assemble(const std::string& view_id, Tick tick, bool deadline);
  MonitorEntry local_monitor_entry(const DomainId& d, Tick tick) const;
  ProgressEntry local_progress_entry(const DomainId& d, const std::string& scope, Tick tick) const;
  StatisticsRow local_statistics_row(const DomainId& d, Tick from, Tick to) const;
  QosReport compute_qos(Tick tick) const;
  TrendReport compute_trend(Tick from, Tick to) const;
  StatisticsReport offline_statistics(Tick from, Tick to) const;
  faultmodel::MetricVector measure_service(const ServiceId& id) const;

  // misc helpers
  void tag_phase(const std::string& row, faultmodel::LifecyclePhase phase, Tick tick);
  void tag_row(const std::string& row, Tick tick);
  void log_use_case(const std::string& uc, Tick tick, const std::string& status, ojson detail);
  void require_capability(UseCase uc) const;
  void require_report_access(const DomainId& requester, const std::set<DomainId>& targets) const;
  orgmodel::RoleBinding gfcm_binding(const FaultId& fault, Tick tick) const;
  const faultmodel::FaultRecord& must_record(const FaultId& fault) const;
  void count_fault_message(const ojson& payload);
  std::deque<DomainId> descent_order(const ServiceId& service, const std::set<DomainId>& skip) const;
  const faultmodel::DomainFormatAdapter* find_adapter(const std::string& format_id) const;

  const scenario::Scenario& sc_;
  const topology::ProviderNetwork& net_;
  simnet::SimHost& host_;
  scenario::Thresholds cfg_;
  orgmodel::AccessPolicy policy_;
  orgmodel::GfcmPolicy gfcm_policy_;
  orgmodel::RoleTable roles_;
  CapabilityMatrix caps_;
  FaultRegistry registry_;
  protocol::SubscriptionTable subs_;

  std::map<DomainId, std::map<std::string, std::pair<DomainId, ComponentId>>> known_errors_;
  std::map<std::string, FaultId> dedup_index_;
  std::map<FaultId, LocalizationTask> tasks_;
  std::map<FaultId, LocalizationOutcome> outcomes_;
  std::map<std::string, PendingView> pending_views_;
  // msg id of an outstanding request -> (kind tag, routing id)
  std::map<MsgId, std::pair<std::string, std::string>> pending_correlation_;

  std::vector<MonitoringView> monitoring_views_;
  std::vector<ProgressView> progress_views_;
  std::vector<StatisticsReport> statistics_reports_;
  std::vector<QosReport> qos_reports_;
  std::vector<TrendReport> trend_reports_;
  std::vector<UseCaseExecution> use_case_log_;
  std::map<DomainId, std::map<FaultId, std::string>> notify_state_;
  ojson plot_data_;

  std::uint64_t fault_seq_{0};
  std::uint64_t msg_seq_{0};
  std::uint64_t view_seq_{0};
  std::map<DomainId, std::uint64_t> sent_by_domain_;
};

} // namespace iofm::engine

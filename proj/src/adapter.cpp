#include "iofm/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace iofm::faultmodel {

namespace {

const std::vector<std::string> kCanonicalFields = {
    "faultId",  "originDomain", "reporterRole", "suspectedService", "symptoms",
    "state",    "isFalsePositive", "createdAt", "updatedAt",        "history",
    "owd",      "ipdv",         "loss",         "availability"};

bool is_metric_field(const std::string& f) {
  return f == "owd" || f == "ipdv" || f == "loss" || f == "availability";
}

bool is_tick_field(const std::string& f) { return f == "createdAt" || f == "updatedAt"; }

std::string format_double(double v) { return ojson(v).dump(); }

double parse_double(const std::string& field, const std::string& raw) {
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    raise(Errc::conversion_error, "field '" + field + "': not a number: '" + raw + "'");
  }
}

} // namespace

const std::vector<std::string>& adapter_canonical_fields() { return kCanonicalFields; }

DomainFormatAdapter identity_adapter(std::string format_id) {
  DomainFormatAdapter a;
  a.format_id = std::move(format_id);
  for (const std::string& f : kCanonicalFields) a.field_map.push_back({f, f, 1, 1});
  return a;
}

std::vector<std::string> validate_adapter(const DomainFormatAdapter& adapter) {
  std::vector<std::string> problems;
  std::set<std::string> locals, canonicals;
  for (const FieldMapEntry& e : adapter.field_map) {
    if (!locals.insert(e.local_name).second)
      problems.push_back("duplicate local field '" + e.local_name + "'");
    if (!canonicals.insert(e.canonical_name).second)
      problems.push_back("duplicate canonical field '" + e.canonical_name + "'");
    if (std::find(kCanonicalFields.begin(), kCanonicalFields.end(), e.canonical_name) ==
        kCanonicalFields.end())
      problems.push_back("unknown canonical field '" + e.canonical_name + "'");
    if (e.unit_num == 0 || e.unit_den == 0)
      problems.push_back("zero unit factor on '" + e.canonical_name + "'");
    if (e.unit_num != 1 || e.unit_den != 1) {
      if (!is_metric_field(e.canonical_name) && !is_tick_field(e.canonical_name))
        problems.push_back("unit factor on non-numeric field '" + e.canonical_name + "'");
    }
  }
  for (const std::string& f : adapter.lossy_fields)
    if (std::find(kCanonicalFields.begin(), kCanonicalFields.end(), f) == kCanonicalFields.end())
      problems.push_back("lossy field '" + f + "' is not a canonical field");
  return problems;
}

namespace {

// Canonical flat view of a record. Absent optional content is the empty
// string so that every mapped field is always present in a local document.
std::map<std::string, std::string> flatten(const FaultRecord& r) {
  std::map<std::string, std::string> flat;
  flat["faultId"] = r.fault_id;
  flat["originDomain"] = r.origin_domain;
  flat["reporterRole"] = orgmodel::role_name(r.reporter_role);
  flat["suspectedService"] = r.suspected_service.value_or("");
  ojson symptoms = ojson::array();
  for (const Symptom& s : r.symptoms) symptoms.push_back(symptom_to_json(s));
  flat["symptoms"] = symptoms.dump();
  flat["state"] = state_name(r.state);
  flat["isFalsePositive"] = fp_mark_name(r.false_positive);
  flat["createdAt"] = std::to_string(r.created_at);
  flat["updatedAt"] = std::to_string(r.updated_at);
  ojson history = ojson::array();
  for (const HistoryEvent& e : r.history) history.push_back(history_event_to_json(e));
  flat["history"] = history.dump();
  const MetricVector* m =
      (!r.symptoms.empty() && r.symptoms.front().observed) ? &*r.symptoms.front().observed : nullptr;
  flat["owd"] = m ? format_double(m->owd) : "";
  flat["ipdv"] = m ? format_double(m->ipdv) : "";
  flat["loss"] = m ? format_double(m->loss) : "";
  flat["availability"] = m ? format_double(m->availability) : "";
  return flat;
}

} // namespace

OutboundResult convert_outbound(const DomainFormatAdapter& adapter, const FaultRecord& record) {
  std::map<std::string, std::string> flat = flatten(record);
  OutboundResult out;
  std::set<std::string> lossy(adapter.lossy_fields.begin(), adapter.lossy_fields.end());
  for (const FieldMapEntry& e : adapter.field_map) {
    auto it = flat.find(e.canonical_name);
    if (it == flat.end()) continue;
    if (lossy.count(e.canonical_name)) {
      if (!it->second.empty()) out.dropped_fields.push_back(e.canonical_name);
      continue;
    }
    std::string value = it->second;
    if (!value.empty() && (e.unit_num != 1 || e.unit_den != 1)) {
      if (is_metric_field(e.canonical_name)) {
        double v = parse_double(e.canonical_name, value);
        value = format_double(v * static_cast<double>(e.unit_den) /
                              static_cast<double>(e.unit_num));
      } else if (is_tick_field(e.canonical_name)) {
        double v = parse_double(e.canonical_name, value);
        value = std::to_string(static_cast<Tick>(std::llround(
            v * static_cast<double>(e.unit_den) / static_cast<double>(e.unit_num))));
      }
    }
    out.document[e.local_name] = value;
  }
  return out;
}

InboundResult convert_inbound(const DomainFormatAdapter& adapter, const LocalDocument& local) {
  std::set<std::string> lossy(adapter.lossy_fields.begin(), adapter.lossy_fields.end());
  std::map<std::string, std::string> flat;
  for (const FieldMapEntry& e : adapter.field_map) {
    if (lossy.count(e.canonical_name)) continue;
    auto it = local.find(e.local_name);
    if (it == local.end())
      raise(Errc::conversion_error,
            "missing mapped field '" + e.local_name + "' (canonical '" + e.canonical_name + "')");
    std::string value = it->second;
    if (!value.empty() && (e.unit_num != 1 || e.unit_den != 1)) {
      if (is_metric_field(e.canonical_name)) {
        double v = parse_double(e.canonical_name, value);
        value = format_double(v * static_cast<double>(e.unit_num) /
                              static_cast<double>(e.unit_den));
      } else if (is_tick_field(e.canonical_name)) {
        double v = parse_double(e.canonical_name, value);
        value = std::to_string(static_cast<Tick>(std::llround(
            v * static_cast<double>(e.unit_num) / static_cast<double>(e.unit_den))));
      }
    }
    flat[e.canonical_name] = value;
  }

  auto required = [&](const char* field) -> std::string {
    auto it = flat.find(field);
    if (it == flat.end() || it->second.empty())
      raise(Errc::conversion_error, std::string("missing required field '") + field + "'");
    return it->second;
  };
  auto optional_field = [&](const char* field) -> std::optional<std::string> {
    auto it = flat.find(field);
    if (it == flat.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  FaultRecord r;
  r.fault_id = required("faultId");
  r.origin_domain = required("originDomain");
  r.reporter_role = orgmodel::role_from_name(required("reporterRole"));
  r.suspected_service = optional_field("suspectedService");
  r.state = state_from_name(required("state"));
  if (auto fp = optional_field("isFalsePositive"))
    r.false_positive = fp_mark_from_name(*fp);
  try {
    r.created_at = std::stoll(required("createdAt"));
    r.updated_at = std::stoll(required("updatedAt"));
  } catch (const std::exception&) {
    raise(Errc::conversion_error, "createdAt/updatedAt not numeric");
  }

  if (auto symptoms = optional_field("symptoms")) {
    ojson arr = ojson::parse(*symptoms, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
      raise(Errc::conversion_error, "field 'symptoms' is not a JSON array");
    for (const ojson& s : arr) r.symptoms.push_back(symptom_from_json(s));
  }
  if (auto history = optional_field("history")) {
    ojson arr = ojson::parse(*history, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
      raise(Errc::conversion_error, "field 'history' is not a JSON array");
    for (const ojson& e : arr) r.history.push_back(history_event_from_json(e));
  }

  // Flat measurements land on the primary symptom, synthesizing one if the
  // local format has no structured symptom list.
  std::optional<MetricVector> observed;
  if (auto owd = optional_field("owd")) {
    MetricVector m;
    m.owd = parse_double("owd", *owd);
    if (auto v = optional_field("ipdv")) m.ipdv = parse_double("ipdv", *v);
    if (auto v = optional_field("loss")) m.loss = parse_double("loss", *v);
    if (auto v = optional_field("availability")) m.availability = parse_double("availability", *v);
    observed = m;
  }
  if (observed) {
    if (!metrics_in_range(*observed))
      raise(Errc::range_error, "converted metrics out of range");
    if (r.symptoms.empty()) {
      Symptom s;
      s.scope = r.suspected_service ? SymptomScope::service : SymptomScope::component;
      s.target = r.suspected_service.value_or("");
      s.deviation = "metric-deviation";
      s.observed = observed;
      r.symptoms.push_back(s);
    } else {
      r.symptoms.front().observed = observed;
    }
  }
  for (const Symptom& s : r.symptoms)
    if (s.observed && !metrics_in_range(*s.observed))
      raise(Errc::range_error, "symptom metrics out of range after conversion");

  std::sort(r.symptoms.begin(), r.symptoms.end(), symptom_less);
  refresh_integrity_tag(r);
  return InboundResult{std::move(r), adapter.format_id};
}

} // namespace iofm::faultmodel

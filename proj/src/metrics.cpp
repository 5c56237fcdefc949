#include "iofm/metrics.hpp"

#include "iofm/errors.hpp"

namespace iofm::faultmodel {

bool metrics_in_range(const MetricVector& m) {
  return m.owd >= 0.0 && m.ipdv >= 0.0 && m.loss >= 0.0 && m.loss <= 1.0 &&
         m.availability >= 0.0 && m.availability <= 1.0;
}

MetricVector aggregate_chain(std::span<const MetricVector> parts) {
  if (parts.empty()) raise(Errc::empty_input, "aggregate_chain over empty part list");
  if (parts.size() == 1) return parts.front(); // chain of one is that part, exactly
  MetricVector out;
  out.availability = 1.0;
  double pass = 1.0; // probability a packet survives the whole chain
  for (const MetricVector& p : parts) {
    out.owd += p.owd;
    out.ipdv += p.ipdv;
    pass *= (1.0 - p.loss);
    out.availability *= p.availability;
  }
  out.loss = 1.0 - pass;
  return out;
}

ojson metrics_to_json(const MetricVector& m) {
  ojson j;
  j["owd"] = m.owd;
  j["ipdv"] = m.ipdv;
  j["loss"] = m.loss;
  j["availability"] = m.availability;
  return j;
}

MetricVector metrics_from_json(const ojson& j) {
  MetricVector m;
  m.owd = j.value("owd", 0.0);
  m.ipdv = j.value("ipdv", 0.0);
  m.loss = j.value("loss", 0.0);
  m.availability = j.value("availability", 1.0);
  return m;
}

ojson sla_to_json(const SlaSpec& s) {
  ojson j = ojson::object();
  if (s.max_owd) j["maxOwd"] = *s.max_owd;
  if (s.max_ipdv) j["maxIpdv"] = *s.max_ipdv;
  if (s.max_loss) j["maxLoss"] = *s.max_loss;
  if (s.min_availability) j["minAvailability"] = *s.min_availability;
  return j;
}

SlaSpec sla_from_json(const ojson& j) {
  SlaSpec s;
  if (j.contains("maxOwd")) s.max_owd = j["maxOwd"].get<double>();
  if (j.contains("maxIpdv")) s.max_ipdv = j["maxIpdv"].get<double>();
  if (j.contains("maxLoss")) s.max_loss = j["maxLoss"].get<double>();
  if (j.contains("minAvailability")) s.min_availability = j["minAvailability"].get<double>();
  return s;
}

} // namespace iofm::faultmodel

#pragma once

#include <optional>
#include <span>

#include "iofm/jsonio.hpp"

namespace iofm::faultmodel {

// IPPM-style per-hop measurement set. Delays are in milliseconds, loss and
// availability are ratios in [0,1].
struct MetricVector {
  double owd{0.0};
  double ipdv{0.0};
  double loss{0.0};
  double availability{1.0};

  bool operator==(const MetricVector&) const = default;
};

bool metrics_in_range(const MetricVector& m);

// Chain composition over concatenated service parts: delays add, loss and
// availability compose multiplicatively. ipdv addition is an approximation.
MetricVector aggregate_chain(std::span<const MetricVector> parts);

ojson metrics_to_json(const MetricVector& m);
MetricVector metrics_from_json(const ojson& j);

// Per-service bounds checked by QoS reporting. Absent bound = unconstrained.
struct SlaSpec {
  std::optional<double> max_owd;
  std::optional<double> max_ipdv;
  std::optional<double> max_loss;
  std::optional<double> min_availability;

  bool operator==(const SlaSpec&) const = default;
};

ojson sla_to_json(const SlaSpec& s);
SlaSpec sla_from_json(const ojson& j);

} // namespace iofm::faultmodel

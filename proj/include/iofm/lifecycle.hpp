#pragma once

#include <array>
#include <string>

namespace iofm::faultmodel {

enum class LifecycleState {
  Detected,
  Localizing,
  Isolated,
  Repairing,
  Resolved,
  Closed,
  FalsePositive,
  Escalated,
};

enum class LifecyclePhase { Detection, Isolation, Repair, ForecastPrevention };

constexpr std::array<LifecycleState, 8> all_states() {
  return {LifecycleState::Detected,  LifecycleState::Localizing, LifecycleState::Isolated,
          LifecycleState::Repairing, LifecycleState::Resolved,   LifecycleState::Closed,
          LifecycleState::FalsePositive, LifecycleState::Escalated};
}

constexpr std::array<LifecyclePhase, 4> all_phases() {
  return {LifecyclePhase::Detection, LifecyclePhase::Isolation, LifecyclePhase::Repair,
          LifecyclePhase::ForecastPrevention};
}

bool transition_allowed(LifecycleState from, LifecycleState to);

// Total mapping: every state belongs to exactly one phase. Closed records
// feed trend analysis, hence ForecastPrevention.
LifecyclePhase phase_of(LifecycleState s);

const char* state_name(LifecycleState s);
LifecycleState state_from_name(const std::string& name);
const char* phase_name(LifecyclePhase p);
LifecyclePhase phase_from_name(const std::string& name);

} // namespace iofm::faultmodel

#include "iofm/lifecycle.hpp"

#include "iofm/errors.hpp"

namespace iofm::faultmodel {

bool transition_allowed(LifecycleState from, LifecycleState to) {
  using S = LifecycleState;
  switch (from) {
    case S::Detected: return to == S::Localizing;
    case S::Localizing:
      return to == S::Isolated || to == S::Escalated || to == S::FalsePositive;
    case S::Escalated: return to == S::Isolated || to == S::Closed;
    case S::Isolated: return to == S::Repairing;
    case S::Repairing: return to == S::Resolved;
    case S::Resolved: return to == S::Closed;
    case S::FalsePositive: return to == S::Closed;
    case S::Closed: return false;
  }
  return false;
}

LifecyclePhase phase_of(LifecycleState s) {
  using S = LifecycleState;
  switch (s) {
    case S::Detected: return LifecyclePhase::Detection;
    case S::Localizing:
    case S::Isolated:
    case S::Escalated:
    case S::FalsePositive: return LifecyclePhase::Isolation;
    case S::Repairing:
    case S::Resolved: return LifecyclePhase::Repair;
    case S::Closed: return LifecyclePhase::ForecastPrevention;
  }
  return LifecyclePhase::Detection;
}

const char* state_name(LifecycleState s) {
  switch (s) {
    case LifecycleState::Detected: return "Detected";
    case LifecycleState::Localizing: return "Localizing";
    case LifecycleState::Isolated: return "Isolated";
    case LifecycleState::Repairing: return "Repairing";
    case LifecycleState::Resolved: return "Resolved";
    case LifecycleState::Closed: return "Closed";
    case LifecycleState::FalsePositive: return "FalsePositive";
    case LifecycleState::Escalated: return "Escalated";
  }
  return "?";
}

LifecycleState state_from_name(const std::string& name) {
  for (LifecycleState s : all_states())
    if (name == state_name(s)) return s;
  raise(Errc::parse_error, "unknown lifecycle state '" + name + "'");
}

const char* phase_name(LifecyclePhase p) {
  switch (p) {
    case LifecyclePhase::Detection: return "Detection";
    case LifecyclePhase::Isolation: return "Isolation";
    case LifecyclePhase::Repair: return "Repairing";
    case LifecyclePhase::ForecastPrevention: return "Forecast/Prevention";
  }
  return "?";
}

LifecyclePhase phase_from_name(const std::string& name) {
  for (LifecyclePhase p : all_phases())
    if (name == phase_name(p)) return p;
  raise(Errc::parse_error, "unknown lifecycle phase '" + name + "'");
}

} // namespace iofm::faultmodel

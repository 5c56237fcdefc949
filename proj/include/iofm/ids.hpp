#pragma once

#include <cstdint>
#include <string>

namespace iofm {

// Simulation time is an integer tick counter; there is no wall-clock coupling.
using Tick = std::int64_t;

using DomainId      = std::string;
using ComponentId   = std::string;
using ServiceId     = std::string;
using ServicePartId = std::string;
using CustomerId    = std::string;
using FaultId       = std::string;
using MsgId         = std::string;

} // namespace iofm

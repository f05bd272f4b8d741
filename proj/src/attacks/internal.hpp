#pragma once

#include "igaff/attacks/config.hpp"
#include "igaff/models/victim.hpp"

namespace igaff {

/// Shared precondition checks for both attacks.
void check_attack_inputs(const Batch& x, const Labels& y, const VictimModel& model, const AttackConfig& cfg);

}  // namespace igaff

#pragma once

#include <utility>

#include "recnego/contracts.hpp"

namespace recnego {

/// Nash bargaining solution over two contract spaces: the contract (in the
/// first agent's frame) maximizing the product of both agents' surpluses
/// over their reservation values, restricted to contracts where neither
/// surplus is negative. The second agent values each contract mirrored,
/// since one loan reads with opposite signs on its two sides. When no
/// contract grants both sides a non-negative surplus, the no-deal contract
/// with the reservation utilities is returned. Ties keep the earliest
/// contract in canonical domain order.
std::pair<EnergyContract, std::pair<double, double>> nash_solution(
    const ContractSpace& space_a, const ContractSpace& space_b,
    const std::pair<double, double>& reservations);

/// Euclidean distance between two points of the joint utility space.
double nash_distance(const std::pair<double, double>& outcome,
                     const std::pair<double, double>& nash);

}  // namespace recnego

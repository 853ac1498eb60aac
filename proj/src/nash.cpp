#include "recnego/nash.hpp"

#include <cmath>

namespace recnego {

std::pair<EnergyContract, std::pair<double, double>> nash_solution(
    const ContractSpace& space_a, const ContractSpace& space_b,
    const std::pair<double, double>& reservations) {
    if (!(space_a.domain == space_b.domain))
        throw ArgumentError("nash_solution: spaces span different negotiation domains");
    const NegotiationDomain& domain = space_a.domain;

    int best = -1;
    double best_product = -1.0;
    for (int flat = 0; flat < domain.size(); ++flat) {
        const double surplus_a = space_a.by_domain[static_cast<std::size_t>(flat)] - reservations.first;
        const double surplus_b =
            space_b.by_domain[static_cast<std::size_t>(domain.mirror_index(flat))] -
            reservations.second;
        if (surplus_a < 0.0 || surplus_b < 0.0) continue;
        const double product = surplus_a * surplus_b;
        if (product > best_product) {
            best_product = product;
            best = flat;
        }
    }
    if (best < 0) return {EnergyContract{0.0, domain.delay_min()}, reservations};
    const EnergyContract contract = domain.contract_at(best);
    return {contract,
            {space_a.by_domain[static_cast<std::size_t>(best)],
             space_b.by_domain[static_cast<std::size_t>(domain.mirror_index(best))]}};
}

double nash_distance(const std::pair<double, double>& outcome,
                     const std::pair<double, double>& nash) {
    return std::hypot(outcome.first - nash.first, outcome.second - nash.second);
}

}  // namespace recnego

#include "recnego/negotiation.hpp"

namespace recnego {

std::optional<EnergyContract> make_offer(ContractSpace& space, double aspiration) {
    if (space.exhausted()) return std::nullopt;
    const auto& [contract, utility] = space.ordered[space.cursor];
    if (utility < aspiration) return std::nullopt;
    ++space.cursor;
    return contract;
}

bool accept_offer(const ContractSpace& space, const EnergyContract& offer, double aspiration) {
    return space.utility_of(offer.mirrored()) > aspiration;
}

SessionOutcome negotiate(AgentState& a, AgentState& b, const SessionConfig& cfg,
                         const NegotiationDomain& domain, const ScenarioSet& scn_a,
                         const ScenarioSet& scn_b, std::vector<TranscriptRow>* transcript) {
    cfg.validate();
    if (scn_a.base.start_index != cfg.period || scn_b.base.start_index != cfg.period ||
        scn_a.horizon() != scn_b.horizon() ||
        scn_a.base.granularity_minutes != scn_b.base.granularity_minutes)
        throw ProtocolError("negotiate: agents hold inconsistent planning views");

    ContractSpace space_a = build_contract_space(a, domain, scn_a);
    ContractSpace space_b = build_contract_space(b, domain, scn_b);
    const double asp_a =
        a.aspiration_floor ? *a.aspiration_floor : aspiration_value(space_a, a.aspiration_quantile);
    const double asp_b =
        b.aspiration_floor ? *b.aspiration_floor : aspiration_value(space_b, b.aspiration_quantile);
    const EnergyContract no_deal{0.0, domain.delay_min()};
    const double res_a = space_a.utility_of(no_deal);
    const double res_b = space_b.utility_of(no_deal);

    SessionOutcome out;
    out.agent_a = a.id;
    out.agent_b = b.id;
    out.period = cfg.period;
    out.reservations = {res_a, res_b};
    out.aspirations = {asp_a, asp_b};

    bool spent_a = false;
    bool spent_b = false;
    int round = 0;
    while (round < cfg.deadline_rounds && !out.agreed) {
        const bool a_proposes = round % 2 == 0;
        ContractSpace& proposer_space = a_proposes ? space_a : space_b;
        const ContractSpace& receiver_space = a_proposes ? space_b : space_a;
        const double proposer_asp = a_proposes ? asp_a : asp_b;
        const double receiver_asp = a_proposes ? asp_b : asp_a;

        const std::optional<EnergyContract> offer = make_offer(proposer_space, proposer_asp);
        if (offer) {
            const bool accepted = accept_offer(receiver_space, *offer, receiver_asp);
            if (transcript)
                transcript->push_back({round + 1, a_proposes ? a.id : b.id, true, *offer,
                                       proposer_space.ordered[proposer_space.cursor - 1].second,
                                       accepted ? "accept" : "reject"});
            if (accepted) {
                out.agreed = true;
                out.agreement = *offer;
                out.proposed_by = a_proposes ? 0 : 1;
            }
        } else {
            if (transcript)
                transcript->push_back({round + 1, a_proposes ? a.id : b.id, false, {}, 0.0, "none"});
            (a_proposes ? spent_a : spent_b) = true;
        }
        ++round;
        if (spent_a && spent_b) break;  // neither side will ever propose again
    }
    out.rounds_used = round;

    if (out.agreed) {
        const EnergyContract in_a_frame = out.proposed_by == 0 ? *out.agreement : out.agreement->mirrored();
        out.utilities = {space_a.utility_of(in_a_frame), space_b.utility_of(in_a_frame.mirrored())};
        a.ledger = apply_contract(a.ledger, b.id, cfg.period, in_a_frame, a.link);
        b.ledger = apply_contract(b.ledger, a.id, cfg.period, in_a_frame.mirrored(), b.link);
    } else {
        out.utilities = out.reservations;
    }

    const auto [nash_contract, nash_point] = nash_solution(space_a, space_b, out.reservations);
    (void)nash_contract;
    out.nash_point = nash_point;
    out.nash_distance = nash_distance(out.utilities, nash_point);
    out.nodeal_distance = nash_distance(out.reservations, nash_point);
    return out;
}

}  // namespace recnego

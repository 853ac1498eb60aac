#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recnego/nash.hpp"

namespace recnego {

struct SessionConfig {
    int deadline_rounds = 5000;
    int period = 0;

    void validate() const {
        if (deadline_rounds < 1) throw ArgumentError("SessionConfig: deadline must be >= 1");
    }
};

/// Result of one bilateral session. The agreement is stored in the
/// proposer's frame; utilities, reservations and the Nash point are always
/// ordered (agent A, agent B).
struct SessionOutcome {
    std::string agent_a;
    std::string agent_b;
    int period = 0;
    bool agreed = false;
    std::optional<EnergyContract> agreement;
    int proposed_by = -1;  // 0 = agent A, 1 = agent B
    int rounds_used = 0;
    std::pair<double, double> utilities{0.0, 0.0};
    std::pair<double, double> reservations{0.0, 0.0};
    std::pair<double, double> aspirations{0.0, 0.0};
    std::pair<double, double> nash_point{0.0, 0.0};
    double nash_distance = 0.0;    // outcome to Nash point
    double nodeal_distance = 0.0;  // no-deal point to Nash point
};

/// One transcript line per round, exportable as CSV.
struct TranscriptRow {
    int round = 0;
    std::string proposer;
    bool has_offer = false;
    EnergyContract offer{};
    double proposer_utility = 0.0;
    std::string response;  // "accept", "reject" or "none"
};

/// Pop the best not-yet-proposed contract; absent once the head of the
/// ordered space falls below the aspiration value (or the space is spent).
std::optional<EnergyContract> make_offer(ContractSpace& space, double aspiration);

/// Receiver-side response: true iff the mirrored offer's utility strictly
/// exceeds the receiver's aspiration value. ProtocolError for offers
/// outside the shared domain.
bool accept_offer(const ContractSpace& space, const EnergyContract& offer, double aspiration);

/// Alternating-offers session between two agents at one period. A proposes
/// on even rounds, B on odd ones; stops at acceptance, at the deadline, or
/// early once both sides have run out of aspirational offers. On agreement
/// both ledgers are amended; a failed session leaves them untouched.
SessionOutcome negotiate(AgentState& a, AgentState& b, const SessionConfig& cfg,
                         const NegotiationDomain& domain, const ScenarioSet& scn_a,
                         const ScenarioSet& scn_b, std::vector<TranscriptRow>* transcript = nullptr);

}  // namespace recnego

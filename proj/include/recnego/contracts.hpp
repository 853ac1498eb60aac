#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recnego/prosumer.hpp"
#include "recnego/scenarios.hpp"

namespace recnego {

/// Everything one agent brings to a negotiation period: its forecast over
/// the planning horizon, flexibility, committed exchanges and preferences.
/// Contracts are always evaluated in this agent's own frame (q > 0 exports).
struct AgentState {
    std::string id;
    TimeSeries predicted_net;  // horizon view, start_index = negotiation period
    Battery battery;
    ExchangeLedger ledger;
    LinkParams link;
    CriterionWeights weights;
    double aspiration_quantile = 0.8;
    // absolute aspiration utility; when set it wins over the quantile
    std::optional<double> aspiration_floor;
};

/// Utility-ordered enumeration of the negotiation domain for one agent and
/// period. `ordered` is sorted descending by expected utility (ties: smaller
/// |q|, then smaller tau, then positive q first); `by_domain` stores the same
/// utilities in canonical domain order for O(1) lookup by offer.
struct ContractSpace {
    NegotiationDomain domain;
    std::vector<std::pair<EnergyContract, double>> ordered;
    std::vector<double> by_domain;
    std::size_t cursor = 0;

    bool exhausted() const { return cursor >= ordered.size(); }

    /// Expected utility of a domain member; ProtocolError for outsiders.
    double utility_of(const EnergyContract& c) const {
        const int flat = domain.index_of(c);
        if (flat < 0) throw ProtocolError("offer outside the negotiation domain");
        return by_domain[static_cast<std::size_t>(flat)];
    }
};

/// Per-scenario dispatch of the naive policy, vectorized across scenarios.
/// Row s of each member matches naive_dispatch run on scenario s alone.
struct ScenarioDispatch {
    Eigen::ArrayXXd dispatch;   // |S| x w, kW
    Eigen::ArrayXXd residual;   // |S| x w, kW
    Eigen::ArrayXXd soc_paths;  // |S| x (w+1), kWh
};

ScenarioDispatch scenario_dispatch(const Battery& b, const ScenarioSet& scn,
                                   const Eigen::ArrayXd& exchange_kw);

/// Loss-in-flexibility cost per scenario: sum of the dispatch row plus the
/// offset energy Theta needed to bring the final SOC back to the initial one
/// (deficit refilled at charge efficiency, excess credited at discharge
/// efficiency). Inputs are per-step energies.
Eigen::ArrayXd evaluate_flex_loss(const Eigen::ArrayXXd& dispatch, const Eigen::ArrayXXd& soc_paths,
                                  const Battery& b);

/// Autarky cost per scenario: total absolute residual energy traded outside.
Eigen::ArrayXd evaluate_autarky(const Eigen::ArrayXXd& residual);

/// Probability-weighted utility of one contract under uncertainty: amend the
/// committed exchange with the contract legs, dispatch every scenario, score
/// both criteria and negate the weighted cost.
double expected_utility(const AgentState& agent, const EnergyContract& contract,
                        const ScenarioSet& scn, const CriterionWeights& weights);

/// Evaluate every contract in the domain once and return the ordered space.
ContractSpace build_contract_space(const AgentState& agent, const NegotiationDomain& domain,
                                   const ScenarioSet& scn);

/// Utility at the given quantile of the space's empirical utility
/// distribution (linear interpolation between order statistics).
double aspiration_value(const ContractSpace& space, double quantile);

/// Utility of the no-exchange plan, the fallback on failed negotiations.
double reservation_value(const AgentState& agent, const ScenarioSet& scn);

}  // namespace recnego

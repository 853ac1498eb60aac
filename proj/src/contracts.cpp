#include "recnego/contracts.hpp"

#include <algorithm>
#include <cmath>

namespace recnego {

namespace {

// Workspace shared across the evaluations of one contract space so the hot
// loop performs no allocation after the first contract.
struct Evaluator {
    Evaluator(const AgentState& agent, const ScenarioSet& scn, const CriterionWeights& weights)
        : agent(agent),
          scn(scn),
          weights(weights),
          scenario_count(scn.count()),
          horizon(scn.horizon()),
          dt(scn.base.dt_hours()) {
        this->weights.validate();
        base_exchange = agent.ledger.window_kw(scn.base.start_index, static_cast<int>(horizon), dt);
        exchange = base_exchange;
        dispatch.resize(scenario_count, horizon);
        residual.resize(scenario_count, horizon);
        soc_paths.resize(scenario_count, horizon + 1);
        energy.resize(scenario_count, horizon);
        flow.resize(scenario_count);
        step.resize(scenario_count);
        soc.resize(scenario_count);
    }

    double operator()(const EnergyContract& contract) {
        if (std::abs(contract.quantity_kwh) > agent.link.max_loan_kwh() + 1e-12)
            throw ContractError("expected_utility: contract quantity exceeds link limit z*L");
        amend_exchange(contract);
        run_dispatch();
        restore_exchange(contract);

        energy = dispatch * dt;
        const Eigen::ArrayXd flex = evaluate_flex_loss(energy, soc_paths, agent.battery);
        energy = residual * dt;
        const Eigen::ArrayXd autarky = evaluate_autarky(energy);
        return (scn.probabilities * -(weights.w_flex * flex + weights.w_autarky * autarky)).sum();
    }

    void amend_exchange(const EnergyContract& c) {
        if (c.is_no_deal()) return;
        const double leg = c.quantity_kwh / dt;
        exchange[0] += leg;
        if (c.return_delay < horizon) exchange[c.return_delay] -= leg;
    }

    void restore_exchange(const EnergyContract& c) {
        if (c.is_no_deal()) return;
        exchange[0] = base_exchange[0];
        if (c.return_delay < horizon) exchange[c.return_delay] = base_exchange[c.return_delay];
    }

    // Column-vectorized naive dispatch; arithmetic mirrors naive_dispatch()
    // term for term so each scenario row matches the scalar policy bitwise.
    void run_dispatch() {
        const Battery& b = agent.battery;
        const double smin = b.soc_min_kwh();
        const double smax = b.soc_max_kwh();
        const double eps = b.degradation_kwh_per_step;
        const double charge_denom = b.eff_charge * dt;
        const double inv_eff_d = 1.0 / b.eff_discharge;

        soc.setConstant(b.soc_kwh);
        soc_paths.col(0) = soc;
        for (Eigen::Index l = 0; l < horizon; ++l) {
            flow = (scn.deviations.col(l) + scn.base.values[l]) + exchange[l];
            step = (flow < 0.0)
                       .select((-flow).min(b.charge_rate_kw)
                                   .min(((smax - soc + eps) / charge_denom).max(0.0)),
                               (flow > 0.0)
                                   .select(-flow.min(b.discharge_rate_kw)
                                                .min(((soc - smin - eps) * b.eff_discharge / dt)
                                                         .max(0.0)),
                                           0.0));
            // trickle-charge guard against degradation dragging SOC under the floor
            step = (soc + (step >= 0.0).select(step * b.eff_charge * dt, step * inv_eff_d * dt) -
                        eps <
                    smin)
                       .select(step.max(((smin - soc + eps) / charge_denom).min(b.charge_rate_kw)),
                               step);
            soc = (soc + (step >= 0.0).select(step * b.eff_charge * dt, step * inv_eff_d * dt) - eps)
                      .max(smin)
                      .min(smax);
            dispatch.col(l) = step;
            residual.col(l) = flow + step;
            soc_paths.col(l + 1) = soc;
        }
    }

    const AgentState& agent;
    const ScenarioSet& scn;
    CriterionWeights weights;
    Eigen::Index scenario_count;
    Eigen::Index horizon;
    double dt;
    Eigen::ArrayXd base_exchange;
    Eigen::ArrayXd exchange;
    Eigen::ArrayXXd dispatch;
    Eigen::ArrayXXd residual;
    Eigen::ArrayXXd soc_paths;
    Eigen::ArrayXXd energy;
    Eigen::ArrayXd flow;
    Eigen::ArrayXd step;
    Eigen::ArrayXd soc;
};

}  // namespace

ScenarioDispatch scenario_dispatch(const Battery& b, const ScenarioSet& scn,
                                   const Eigen::ArrayXd& exchange_kw) {
    if (exchange_kw.size() != scn.horizon())
        throw ArgumentError("scenario_dispatch: exchange length must equal the horizon");
    AgentState probe;
    probe.battery = b;
    Evaluator eval(probe, scn, CriterionWeights{});
    eval.exchange = exchange_kw;
    eval.run_dispatch();
    return {std::move(eval.dispatch), std::move(eval.residual), std::move(eval.soc_paths)};
}

Eigen::ArrayXd evaluate_flex_loss(const Eigen::ArrayXXd& dispatch, const Eigen::ArrayXXd& soc_paths,
                                  const Battery& b) {
    if (soc_paths.rows() != dispatch.rows() || soc_paths.cols() != dispatch.cols() + 1)
        throw ArgumentError("evaluate_flex_loss: soc_paths must be |S| x (w+1)");
    const Eigen::ArrayXd deficit = soc_paths.col(0) - soc_paths.col(soc_paths.cols() - 1);
    return dispatch.rowwise().sum() +
           (deficit > 0.0).select(deficit / b.eff_charge, deficit * b.eff_discharge);
}

Eigen::ArrayXd evaluate_autarky(const Eigen::ArrayXXd& residual) {
    return residual.abs().rowwise().sum();
}

double expected_utility(const AgentState& agent, const EnergyContract& contract,
                        const ScenarioSet& scn, const CriterionWeights& weights) {
    Evaluator eval(agent, scn, weights);
    return eval(contract);
}

ContractSpace build_contract_space(const AgentState& agent, const NegotiationDomain& domain,
                                   const ScenarioSet& scn) {
    if (domain.size() < 1) throw ArgumentError("build_contract_space: empty domain");
    ContractSpace space{domain, {}, {}, 0};
    space.by_domain.resize(static_cast<std::size_t>(domain.size()));

    Evaluator eval(agent, scn, agent.weights);
    space.ordered.reserve(space.by_domain.size());
    for (int flat = 0; flat < domain.size(); ++flat) {
        const EnergyContract c = domain.contract_at(flat);
        const double u = eval(c);
        space.by_domain[static_cast<std::size_t>(flat)] = u;
        space.ordered.emplace_back(c, u);
    }
    // descending utility; ties favour the least committing contract
    std::sort(space.ordered.begin(), space.ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        const double qa = std::abs(a.first.quantity_kwh);
        const double qb = std::abs(b.first.quantity_kwh);
        if (qa != qb) return qa < qb;
        if (a.first.return_delay != b.first.return_delay)
            return a.first.return_delay < b.first.return_delay;
        return a.first.quantity_kwh > b.first.quantity_kwh;
    });
    return space;
}

double aspiration_value(const ContractSpace& space, double quantile) {
    if (space.ordered.empty()) throw StateError("aspiration_value: empty contract space");
    if (quantile < 0.0 || quantile > 1.0)
        throw ArgumentError("aspiration_value: quantile must be in [0, 1]");
    const std::size_t n = space.ordered.size();
    // `ordered` is descending; order statistics are read from the tail up
    const auto ascending = [&](std::size_t i) { return space.ordered[n - 1 - i].second; };
    const double pos = quantile * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return ascending(lo) + frac * (ascending(hi) - ascending(lo));
}

double reservation_value(const AgentState& agent, const ScenarioSet& scn) {
    return expected_utility(agent, EnergyContract{0.0, 2}, scn, agent.weights);
}

}  // namespace recnego

#include "recnego/prosumer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recnego {

void Battery::validate() const {
    if (capacity_kwh < 0.0) throw ArgumentError("Battery: capacity must be >= 0");
    if (soc_min_frac < 0.0 || soc_max_frac > 1.0 || soc_min_frac > soc_max_frac)
        throw ArgumentError("Battery: need 0 <= soc_min_frac <= soc_max_frac <= 1");
    if (charge_rate_kw <= 0.0 || discharge_rate_kw <= 0.0)
        throw ArgumentError("Battery: rates must be strictly positive");
    if (eff_charge <= 0.0 || eff_charge > 1.0 || eff_discharge <= 0.0 || eff_discharge > 1.0)
        throw ArgumentError("Battery: efficiencies must be in (0, 1]");
    if (degradation_kwh_per_step < 0.0)
        throw ArgumentError("Battery: degradation must be >= 0");
    if (soc_kwh < soc_min_kwh() - 1e-12 || soc_kwh > soc_max_kwh() + 1e-12)
        throw ArgumentError("Battery: initial SOC outside the operating window");
}

namespace {

double soc_after(const Battery& b, double p_kw, double dt_hours) {
    const double eta = p_kw >= 0.0 ? b.eff_charge : 1.0 / b.eff_discharge;
    return b.soc_kwh + eta * p_kw * dt_hours - b.degradation_kwh_per_step;
}

// Snap tolerance for boundary-exact dispatches computed by the policy; real
// violations are orders of magnitude larger and still rejected.
double bound_slack(const Battery& b) { return 1e-9 * std::max(1.0, b.capacity_kwh); }

}  // namespace

std::pair<double, double> feasible_dispatch_range(const Battery& b, double dt_hours) {
    const double eps = b.degradation_kwh_per_step;
    const double lift = b.soc_min_kwh() - b.soc_kwh + eps;  // > 0: charging required
    double lo;
    if (lift > 0.0) {
        lo = lift / (b.eff_charge * dt_hours);
    } else {
        lo = std::max(-b.discharge_rate_kw, lift * b.eff_discharge / dt_hours);
    }
    const double hi =
        std::min(b.charge_rate_kw, (b.soc_max_kwh() - b.soc_kwh + eps) / (b.eff_charge * dt_hours));
    return {lo, hi};
}

Battery battery_step(const Battery& b, double dispatch_kw, double dt_hours) {
    if (dt_hours <= 0.0) throw ArgumentError("battery_step: dt_hours must be positive");
    const auto [lo, hi] = feasible_dispatch_range(b, dt_hours);
    const double rate = dispatch_kw >= 0.0 ? b.charge_rate_kw : b.discharge_rate_kw;
    double soc = soc_after(b, dispatch_kw, dt_hours);
    const double slack = bound_slack(b);
    if (std::abs(dispatch_kw) > rate + 1e-12 || soc < b.soc_min_kwh() - slack ||
        soc > b.soc_max_kwh() + slack) {
        std::ostringstream msg;
        msg << "battery_step: dispatch " << dispatch_kw << " kW infeasible, feasible range [" << lo
            << ", " << hi << "] kW";
        throw DispatchError(msg.str(), lo, hi);
    }
    Battery next = b;
    next.soc_kwh = std::clamp(soc, b.soc_min_kwh(), b.soc_max_kwh());
    return next;
}

DispatchResult naive_dispatch(const Battery& b, const TimeSeries& net, const TimeSeries& exchange) {
    if (net.size() != exchange.size())
        throw ArgumentError("naive_dispatch: net and exchange must share length");
    const Eigen::Index n = net.size();
    const double dt = net.dt_hours();
    const double eps = b.degradation_kwh_per_step;

    DispatchResult out;
    out.soc_path.resize(n + 1);
    Eigen::ArrayXd dispatch(n), residual(n);

    Battery state = b;
    out.soc_path[0] = state.soc_kwh;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double flow = net.values[t] + exchange.values[t];
        double p = 0.0;
        if (flow < 0.0) {
            const double headroom = (state.soc_max_kwh() - state.soc_kwh + eps) / (state.eff_charge * dt);
            p = std::min({-flow, state.charge_rate_kw, std::max(0.0, headroom)});
        } else if (flow > 0.0) {
            const double avail = (state.soc_kwh - state.soc_min_kwh() - eps) * state.eff_discharge / dt;
            p = -std::min({flow, state.discharge_rate_kw, std::max(0.0, avail)});
        }
        // Unconditional degradation can drag SOC under the floor on idle or
        // weak-charge steps; raise to the minimum feasible trickle charge.
        if (soc_after(state, p, dt) < state.soc_min_kwh()) {
            const double required = (state.soc_min_kwh() - state.soc_kwh + eps) / (state.eff_charge * dt);
            p = std::max(p, std::min(required, state.charge_rate_kw));
        }
        state = battery_step(state, p, dt);
        dispatch[t] = p;
        residual[t] = flow + p;
        out.soc_path[t + 1] = state.soc_kwh;
    }
    out.dispatch = TimeSeries(std::move(dispatch), net.start_index, net.granularity_minutes);
    out.residual = TimeSeries(std::move(residual), net.start_index, net.granularity_minutes);
    out.battery = state;
    return out;
}

double ExchangeLedger::energy_at(int period) const {
    double total = 0.0;
    for (const auto& e : entries)
        if (e.period == period) total += e.energy_kwh;
    return total;
}

double ExchangeLedger::total_with(const std::string& peer) const {
    double total = 0.0;
    for (const auto& e : entries)
        if (e.counterparty == peer) total += e.energy_kwh;
    return total;
}

Eigen::ArrayXd ExchangeLedger::window_kw(int start, int length, double dt_hours) const {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(length);
    for (const auto& e : entries) {
        const int offset = e.period - start;
        if (offset >= 0 && offset < length) out[offset] += e.energy_kwh / dt_hours;
    }
    return out;
}

ExchangeLedger apply_contract(const ExchangeLedger& ledger, const std::string& peer, int t,
                              const EnergyContract& contract, const LinkParams& link) {
    if (std::abs(contract.quantity_kwh) > link.max_loan_kwh() + 1e-12) {
        std::ostringstream msg;
        msg << "apply_contract: |q| = " << std::abs(contract.quantity_kwh)
            << " kWh exceeds link limit z*L = " << link.max_loan_kwh();
        throw ContractError(msg.str());
    }
    ExchangeLedger next = ledger;
    if (contract.is_no_deal()) return next;
    next.entries.push_back({peer, t, contract.quantity_kwh});
    next.entries.push_back({peer, t + contract.return_delay, -contract.quantity_kwh});
    return next;
}

}  // namespace recnego

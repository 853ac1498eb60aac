#pragma once

#include <string>
#include <vector>

#include "recnego/contract.hpp"
#include "recnego/time_series.hpp"

namespace recnego {

/// Battery energy storage with a hard SOC operating window.
/// Degradation eps_b is subtracted every step regardless of activity.
struct Battery {
    double capacity_kwh = 0.0;
    double soc_kwh = 0.0;
    double soc_min_frac = 0.0;
    double soc_max_frac = 1.0;
    double charge_rate_kw = 1.0;
    double discharge_rate_kw = 1.0;
    double eff_charge = 1.0;
    double eff_discharge = 1.0;
    double degradation_kwh_per_step = 0.0;

    double soc_min_kwh() const { return soc_min_frac * capacity_kwh; }
    double soc_max_kwh() const { return soc_max_frac * capacity_kwh; }

    void validate() const;
};

/// One SOC update: soc' = soc + eta * dispatch * dt - eps_b, where eta is
/// eff_charge when dispatch >= 0 and 1/eff_discharge otherwise. A step that
/// would leave the SOC window is rejected with the feasible dispatch range;
/// it is never silently clamped.
Battery battery_step(const Battery& b, double dispatch_kw, double dt_hours);

/// Feasible dispatch range [lo, hi] (kW) for one step, rate limits included.
/// lo can be positive when degradation forces a minimum trickle charge.
std::pair<double, double> feasible_dispatch_range(const Battery& b, double dt_hours);

struct DispatchResult {
    TimeSeries dispatch;        // kW, >= 0 charging
    TimeSeries residual;        // kW, net + exchange + dispatch
    Eigen::ArrayXd soc_path;    // kWh, length n+1, soc_path[0] = initial SOC
    Battery battery;            // state after the last step
};

/// Greedy per-period policy: charge from surplus, discharge into deficit,
/// both capped by rate and by the SOC window. Always feasible by
/// construction; SOC never leaves [soc_min, soc_max].
DispatchResult naive_dispatch(const Battery& b, const TimeSeries& net, const TimeSeries& exchange);

/// Physical link between two prosumers. The limit caps the loan volume
/// (|q| <= z * L); efficiency does not scale delivered energy.
struct LinkParams {
    double link_limit_kw = 5.0;  // L_{i,j}
    double link_efficiency = 1.0;  // z

    double max_loan_kwh() const { return link_efficiency * link_limit_kw; }

    void validate() const {
        if (link_limit_kw <= 0.0)
            throw ArgumentError("LinkParams: link_limit_kw must be positive");
        if (link_efficiency <= 0.0 || link_efficiency > 1.0)
            throw ArgumentError("LinkParams: link_efficiency must be in (0, 1]");
    }
};

/// Per-agent record of committed exchanges. Entry +q at period t means this
/// agent exports q kWh at t; every loan writes the paired return entry -q at
/// t + tau, so entries sum to zero per counterparty.
struct ExchangeLedger {
    struct Entry {
        std::string counterparty;
        int period = 0;
        double energy_kwh = 0.0;
    };

    std::vector<Entry> entries;

    /// Total committed energy (kWh) at one period, over all counterparties.
    double energy_at(int period) const;

    /// Net position against one counterparty (zero when all loans are paired).
    double total_with(const std::string& peer) const;

    /// Committed exchange power (kW) over [start, start + length) periods.
    Eigen::ArrayXd window_kw(int start, int length, double dt_hours) const;
};

/// Record an agreed loan in this agent's ledger: (t, +q) and (t + tau, -q).
/// The caller applies the mirrored contract to the counterparty's ledger.
/// q = 0 is the no-deal contract and leaves the ledger untouched.
ExchangeLedger apply_contract(const ExchangeLedger& ledger, const std::string& peer, int t,
                              const EnergyContract& contract, const LinkParams& link);

}  // namespace recnego

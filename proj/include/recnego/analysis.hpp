#pragma once

#include <map>
#include <string>
#include <vector>

#include "recnego/community.hpp"

namespace recnego {

/// Realized performance of one agent over the full run: the negated weighted
/// sum of flexibility loss (dispatched energy plus the SOC restoration
/// offset) and autarky (total absolute residual energy).
double performance(const AgentRecord& agent);

/// Nash social welfare of strategy s over baseline h: the product of the
/// per-agent performance gains. Products reach ~1e19 for paper-scale runs,
/// so the signed log-magnitude is carried alongside the raw value.
struct NashWelfare {
    double value = 0.0;
    double log10_magnitude = 0.0;
    int sign = 0;
};

struct PeakStats {
    Eigen::ArrayXd intra_kw;    // per-period total |P2P flow| inside the REC
    Eigen::ArrayXd pcc_abs_kw;  // per-period |community residual| at the PCC
    double intra_mean = 0.0;
    double intra_max = 0.0;
    double pcc_mean = 0.0;
    double pcc_max = 0.0;
};

/// Per-period aggregates of exchanged power: loans are converted from kWh
/// entries to kW at the profile granularity, summed as |net flow| per
/// unordered agent pair, and the PCC series is taken absolute.
PeakStats peak_exchange_stats(const std::vector<std::pair<std::string, ExchangeLedger>>& ledgers,
                              const TimeSeries& pcc);

struct WelfareReport {
    std::vector<std::string> agent_ids;
    std::map<Strategy, std::vector<double>> xi;  // aligned with agent_ids
    std::map<Strategy, double> sw;
    std::map<std::pair<Strategy, Strategy>, NashWelfare> nw;  // key (s, h) for nw_{s|h}
    std::vector<SessionOutcome> sessions;  // from the negotiating run, if present
    std::map<Strategy, PeakStats> peaks;
    std::map<std::string, PeerStats> stats;  // from the negotiating run
    double dt_hours = 1.0;
};

/// Cross-strategy welfare metrics over runs that share the agent set:
/// utilitarian social welfare per strategy and Nash social welfare for every
/// improvement pair (s over h, s later in the strategy order).
WelfareReport social_welfare(const std::map<Strategy, RunResult>& results);

/// Serialize the report as CSV files into out_dir: welfare.csv,
/// nash_distances.csv, exchanges_by_hour.csv, peaks.csv, peer_graph.csv.
/// Re-exporting the same report is byte-identical.
void export_reports(const WelfareReport& report, const std::string& out_dir);

}  // namespace recnego

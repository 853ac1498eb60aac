#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "recnego/negotiation.hpp"
#include "recnego/profile_io.hpp"

namespace recnego {

/// The three evaluated strategies: trade nothing, control the battery
/// individually, or negotiate energy loans and then control the battery.
enum class Strategy { no_flexibility, individual_control, negotiation_and_control };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

/// Per-opponent negotiation history of one agent. The fairness signal is the
/// running mean of the Euclidean distance from the session outcome to the
/// Nash point; failures contribute the no-deal point's distance.
struct PeerStats {
    struct Record {
        int sessions = 0;
        int successes = 0;
        double mean_nash_distance = 0.0;
    };

    std::map<std::string, Record> by_opponent;

    void record(const std::string& opponent, bool success, double distance);
};

/// Epsilon-greedy peer choice: a uniformly random candidate with probability
/// epsilon, otherwise the candidate with the smallest mean Nash distance.
/// Unseen candidates count as distance 0 so new peers get explored; ties
/// fall to fewer sessions, then the lexicographically smallest id.
std::string select_peer(const PeerStats& stats, const std::vector<std::string>& candidates,
                        double epsilon, std::mt19937_64& rng);

/// Pair up agents for one period: visit them in seeded-random order, each
/// still-unmatched agent picks among the unmatched others. With an odd
/// count, one agent stays solo and falls back to individual control.
std::vector<std::pair<std::string, std::string>> match_period(
    const std::vector<std::string>& agent_ids, const std::map<std::string, PeerStats>& stats,
    double epsilon, std::mt19937_64& rng);

/// Static per-agent configuration.
struct AgentSpec {
    std::string id;
    Battery battery;
    LinkParams link;
    CriterionWeights weights;
    double aspiration_quantile = 0.8;
};

struct RunConfig {
    Strategy strategy = Strategy::negotiation_and_control;
    double epsilon = 0.1;
    int horizon_periods = 96;
    int total_periods = 0;  // 0: everything the profiles cover minus the horizon
    std::uint64_t seed = 0;
    int scenario_count = 100;
    double noise_frac = 0.05;     // pseudo-prediction noise, fraction of peak |net|
    double gp_sigma_frac = 0.05;  // scenario std, fraction of peak |base|
    double gp_rho = 0.7;          // consecutive-lag correlation
    int quantity_levels = 15;
    int deadline_rounds = 5000;
    int jobs = 1;

    void validate() const;
};

/// Realized series of one agent over the simulated span.
struct AgentRecord {
    std::string id;
    TimeSeries dispatch;      // kW
    TimeSeries residual;      // kW
    Eigen::ArrayXd soc_path;  // kWh, length total_periods + 1
    ExchangeLedger ledger;
    Battery battery;  // state after the last period
    CriterionWeights weights;
};

struct RunResult {
    std::vector<AgentRecord> agents;
    std::vector<SessionOutcome> sessions;
    std::map<std::string, PeerStats> stats;
    RunConfig config;
};

/// Rolling-horizon simulation: per period (s2 only) match peers and
/// negotiate on predicted profiles, then (s1, s2) dispatch batteries on the
/// realized net demand. Deterministic for a fixed seed, including jobs > 1.
RunResult run_simulation(const std::vector<AgentProfile>& profiles,
                         const std::vector<AgentSpec>& specs, const RunConfig& cfg);

}  // namespace recnego

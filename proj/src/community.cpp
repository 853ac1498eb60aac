#include "recnego/community.hpp"

#include <algorithm>
#include <future>

namespace recnego {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::no_flexibility: return "s0";
        case Strategy::individual_control: return "s1";
        case Strategy::negotiation_and_control: return "s2";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "s0" || name == "no_flexibility") return Strategy::no_flexibility;
    if (name == "s1" || name == "individual_control") return Strategy::individual_control;
    if (name == "s2" || name == "negotiation_and_control") return Strategy::negotiation_and_control;
    throw ArgumentError("unknown strategy '" + name + "'");
}

void PeerStats::record(const std::string& opponent, bool success, double distance) {
    Record& r = by_opponent[opponent];
    ++r.sessions;
    if (success) ++r.successes;
    r.mean_nash_distance += (distance - r.mean_nash_distance) / r.sessions;
}

std::string select_peer(const PeerStats& stats, const std::vector<std::string>& candidates,
                        double epsilon, std::mt19937_64& rng) {
    if (candidates.empty()) throw StateError("select_peer: no candidates");
    if (epsilon < 0.0 || epsilon > 1.0) throw ArgumentError("select_peer: epsilon must be in [0, 1]");
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return candidates[pick(rng)];
    }
    const std::string* best = nullptr;
    double best_distance = 0.0;
    int best_sessions = 0;
    for (const std::string& id : candidates) {
        const auto it = stats.by_opponent.find(id);
        const double distance = it == stats.by_opponent.end() ? 0.0 : it->second.mean_nash_distance;
        const int sessions = it == stats.by_opponent.end() ? 0 : it->second.sessions;
        if (best == nullptr || distance < best_distance ||
            (distance == best_distance &&
             (sessions < best_sessions || (sessions == best_sessions && id < *best)))) {
            best = &id;
            best_distance = distance;
            best_sessions = sessions;
        }
    }
    return *best;
}

std::vector<std::pair<std::string, std::string>> match_period(
    const std::vector<std::string>& agent_ids, const std::map<std::string, PeerStats>& stats,
    double epsilon, std::mt19937_64& rng) {
    if (agent_ids.size() < 2) throw ArgumentError("match_period: need at least 2 agents");
    std::vector<std::size_t> order(agent_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    static const PeerStats no_history;
    std::vector<bool> matched(agent_ids.size(), false);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::size_t idx : order) {
        if (matched[idx]) continue;
        std::vector<std::string> candidates;
        for (std::size_t j = 0; j < agent_ids.size(); ++j)
            if (j != idx && !matched[j]) candidates.push_back(agent_ids[j]);
        if (candidates.empty()) break;  // odd agent out, individual control this period
        const auto it = stats.find(agent_ids[idx]);
        const std::string peer =
            select_peer(it == stats.end() ? no_history : it->second, candidates, epsilon, rng);
        matched[idx] = true;
        matched[static_cast<std::size_t>(
            std::find(agent_ids.begin(), agent_ids.end(), peer) - agent_ids.begin())] = true;
        pairs.emplace_back(agent_ids[idx], peer);
    }
    return pairs;
}

void RunConfig::validate() const {
    if (epsilon < 0.0 || epsilon > 1.0) throw ArgumentError("RunConfig: epsilon must be in [0, 1]");
    if (horizon_periods < 2) throw ArgumentError("RunConfig: horizon must be >= 2 periods");
    if (scenario_count < 1) throw ArgumentError("RunConfig: scenario_count must be >= 1");
    if (quantity_levels < 1 || quantity_levels % 2 == 0)
        throw ArgumentError("RunConfig: quantity_levels must be odd and >= 1");
    if (deadline_rounds < 1) throw ArgumentError("RunConfig: deadline_rounds must be >= 1");
    if (noise_frac < 0.0 || gp_sigma_frac < 0.0)
        throw ArgumentError("RunConfig: noise fractions must be >= 0");
    if (jobs < 1) throw ArgumentError("RunConfig: jobs must be >= 1");
}

namespace {

// splitmix64 finalizer; derives independent substream seeds
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 0x2545F4914F6CDD1DULL);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

TimeSeries slice(const TimeSeries& ts, int offset, int length) {
    return TimeSeries(ts.values.segment(offset, length), ts.start_index + offset,
                      ts.granularity_minutes);
}

}  // namespace

RunResult run_simulation(const std::vector<AgentProfile>& profiles,
                         const std::vector<AgentSpec>& specs, const RunConfig& cfg) {
    cfg.validate();
    if (profiles.empty() || profiles.size() != specs.size())
        throw ArgumentError("run_simulation: profiles and agent specs must align");
    const std::size_t n = profiles.size();
    const Eigen::Index length = profiles[0].load.size();
    const int start = profiles[0].load.start_index;
    const int gran = profiles[0].load.granularity_minutes;
    for (std::size_t i = 0; i < n; ++i) {
        profiles[i].validate();
        specs[i].battery.validate();
        specs[i].link.validate();
        specs[i].weights.validate();
        if (profiles[i].agent_id != specs[i].id)
            throw ArgumentError("run_simulation: profile/spec id mismatch at position " +
                                std::to_string(i));
        if (profiles[i].load.size() != length || profiles[i].load.start_index != start ||
            profiles[i].load.granularity_minutes != gran)
            throw ArgumentError("run_simulation: profiles must share range and granularity");
    }
    const int w = cfg.horizon_periods;
    const int total = cfg.total_periods > 0 ? cfg.total_periods : static_cast<int>(length) - w;
    if (total < 1 || total + w > length)
        throw ArgumentError("run_simulation: total_periods must satisfy 1 <= total <= length - horizon");
    const double dt = profiles[0].load.dt_hours();

    // the loan volume cap, and with it the quantity grid, is community-wide
    double max_loan = specs[0].link.max_loan_kwh();
    for (const auto& spec : specs) max_loan = std::min(max_loan, spec.link.max_loan_kwh());
    const NegotiationDomain domain(cfg.quantity_levels, max_loan, 2, w);

    std::vector<TimeSeries> actual(n), predicted(n);
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = profiles[i].agent_id;
        actual[i] = net_demand(profiles[i].load, profiles[i].pv);
        const double peak = actual[i].values.abs().maxCoeff();
        predicted[i] = pseudo_predict(actual[i], cfg.noise_frac * peak, mix_seed(cfg.seed, 1, i));
    }

    RunResult result;
    result.config = cfg;
    result.config.total_periods = total;
    std::vector<Eigen::ArrayXd> dispatch(n), residual(n);
    std::vector<Eigen::ArrayXd> soc(n);
    std::vector<Battery> battery(n);
    std::vector<ExchangeLedger> ledgers(n);
    for (std::size_t i = 0; i < n; ++i) {
        dispatch[i] = Eigen::ArrayXd::Zero(total);
        residual[i] = Eigen::ArrayXd::Zero(total);
        soc[i] = Eigen::ArrayXd::Constant(total + 1, specs[i].battery.soc_kwh);
        battery[i] = specs[i].battery;
        result.stats.emplace(ids[i], PeerStats{});
    }

    const bool negotiating = cfg.strategy == Strategy::negotiation_and_control && n >= 2;
    const bool dispatching = cfg.strategy != Strategy::no_flexibility;

    for (int t = 0; t < total; ++t) {
        const int period = start + t;
        if (negotiating) {
            std::mt19937_64 match_rng(mix_seed(cfg.seed, 2, static_cast<std::uint64_t>(t)));
            const auto pairs = match_period(ids, result.stats, cfg.epsilon, match_rng);

            const auto run_session = [&](const std::pair<std::string, std::string>& pair) {
                const std::size_t ia = static_cast<std::size_t>(
                    std::find(ids.begin(), ids.end(), pair.first) - ids.begin());
                const std::size_t ib = static_cast<std::size_t>(
                    std::find(ids.begin(), ids.end(), pair.second) - ids.begin());
                AgentState sa{ids[ia], slice(predicted[ia], t, w), battery[ia], ledgers[ia],
                              specs[ia].link, specs[ia].weights, specs[ia].aspiration_quantile};
                AgentState sb{ids[ib], slice(predicted[ib], t, w), battery[ib], ledgers[ib],
                              specs[ib].link, specs[ib].weights, specs[ib].aspiration_quantile};
                const ScenarioSet scn_a = generate_scenarios(
                    sa.predicted_net, GpParams::scaled(sa.predicted_net, cfg.gp_sigma_frac, cfg.gp_rho),
                    cfg.scenario_count, mix_seed(cfg.seed, 3, mix_seed(ia, static_cast<std::uint64_t>(t))));
                const ScenarioSet scn_b = generate_scenarios(
                    sb.predicted_net, GpParams::scaled(sb.predicted_net, cfg.gp_sigma_frac, cfg.gp_rho),
                    cfg.scenario_count, mix_seed(cfg.seed, 3, mix_seed(ib, static_cast<std::uint64_t>(t))));
                SessionConfig session{cfg.deadline_rounds, period};
                SessionOutcome outcome = negotiate(sa, sb, session, domain, scn_a, scn_b);
                return std::tuple<SessionOutcome, std::size_t, std::size_t, ExchangeLedger,
                                  ExchangeLedger>{outcome, ia, ib, std::move(sa.ledger),
                                                  std::move(sb.ledger)};
            };

            std::vector<std::tuple<SessionOutcome, std::size_t, std::size_t, ExchangeLedger,
                                   ExchangeLedger>>
                outcomes(pairs.size());
            if (cfg.jobs > 1 && pairs.size() > 1) {
                std::vector<std::future<void>> futures;
                std::atomic<std::size_t> next{0};
                const int workers = std::min<int>(cfg.jobs, static_cast<int>(pairs.size()));
                for (int j = 0; j < workers; ++j)
                    futures.push_back(std::async(std::launch::async, [&] {
                        for (std::size_t k = next++; k < pairs.size(); k = next++)
                            outcomes[k] = run_session(pairs[k]);
                    }));
                for (auto& f : futures) f.get();
            } else {
                for (std::size_t k = 0; k < pairs.size(); ++k) outcomes[k] = run_session(pairs[k]);
            }
            // write-back and learning updates in pair order keeps runs
            // bit-identical regardless of the worker count
            for (auto& [outcome, ia, ib, ledger_a, ledger_b] : outcomes) {
                ledgers[ia] = std::move(ledger_a);
                ledgers[ib] = std::move(ledger_b);
                result.stats[ids[ia]].record(ids[ib], outcome.agreed, outcome.nash_distance);
                result.stats[ids[ib]].record(ids[ia], outcome.agreed, outcome.nash_distance);
                result.sessions.push_back(std::move(outcome));
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double ex_kw = negotiating ? ledgers[i].energy_at(period) / dt : 0.0;
            if (!dispatching) {
                residual[i][t] = actual[i].values[t];
                soc[i][t + 1] = soc[i][t];
                continue;
            }
            const TimeSeries net_now(Eigen::ArrayXd::Constant(1, actual[i].values[t]), period, gran);
            const TimeSeries ex_now(Eigen::ArrayXd::Constant(1, ex_kw), period, gran);
            const DispatchResult step = naive_dispatch(battery[i], net_now, ex_now);
            dispatch[i][t] = step.dispatch.values[0];
            residual[i][t] = step.residual.values[0];
            battery[i] = step.battery;
            soc[i][t + 1] = battery[i].soc_kwh;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        result.agents.push_back({ids[i], TimeSeries(std::move(dispatch[i]), start, gran),
                                 TimeSeries(std::move(residual[i]), start, gran), std::move(soc[i]),
                                 std::move(ledgers[i]), battery[i], specs[i].weights});
    }
    return result;
}

}  // namespace recnego

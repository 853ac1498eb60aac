#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "recnego/analysis.hpp"
#include "recnego/config.hpp"

namespace {

using namespace recnego;

bool log_enabled() {
    const char* level = std::getenv("RECNEGO_LOG");
    return level != nullptr && std::string(level) == "debug";
}

void log_line(const std::string& message) {
    if (log_enabled()) std::cerr << "[recnego] " << message << "\n";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> epsilon;
    std::optional<int> periods;
    int jobs = 1;
    std::string out = "results";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out = true) {
    cmd->add_option("--config", opts.config, "Run configuration file (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "Override the config seed");
    cmd->add_option("--strategy", opts.strategy, "Strategy: s0, s1 or s2 (or long names)");
    cmd->add_option("--epsilon", opts.epsilon, "Override the peer-selection epsilon");
    cmd->add_option("--periods", opts.periods, "Override the number of simulated periods");
    cmd->add_option("--jobs", opts.jobs, "Parallel sessions per period (default 1)");
    if (with_out) cmd->add_option("--out", opts.out, "Output directory");
}

SimulationSetup load_with_overrides(const CommonOptions& opts) {
    SimulationSetup setup = load_setup(opts.config);
    if (opts.seed) setup.run.seed = *opts.seed;
    if (opts.strategy) setup.run.strategy = strategy_from_string(*opts.strategy);
    if (opts.epsilon) setup.run.epsilon = *opts.epsilon;
    if (opts.periods) setup.run.total_periods = *opts.periods;
    setup.run.jobs = opts.jobs;
    return setup;
}

void write_series_csv(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw ExportError("cannot open '" + path.string() + "'");
    out << "agent_id,t,dispatch_kw,residual_kw,soc_kwh\n";
    for (const auto& agent : result.agents) {
        for (Eigen::Index t = 0; t < agent.dispatch.size(); ++t) {
            out << agent.id << ',' << agent.dispatch.start_index + t << ','
                << fmt(agent.dispatch.values[t]) << ',' << fmt(agent.residual.values[t]) << ','
                << fmt(agent.soc_path[t + 1]) << '\n';
        }
    }
}

void write_sessions_csv(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw ExportError("cannot open '" + path.string() + "'");
    out << "period,agent_a,agent_b,agreed,rounds,q_kwh,return_delay,distance\n";
    for (const auto& s : result.sessions) {
        out << s.period << ',' << s.agent_a << ',' << s.agent_b << ',' << (s.agreed ? 1 : 0) << ','
            << s.rounds_used << ',';
        if (s.agreed && s.agreement)
            out << fmt(s.agreement->quantity_kwh) << ',' << s.agreement->return_delay;
        else
            out << ',';
        out << ',' << fmt(s.nash_distance) << '\n';
    }
}

int cmd_simulate(const CommonOptions& opts) {
    SimulationSetup setup = load_with_overrides(opts);
    log_line("simulate: strategy " + to_string(setup.run.strategy));
    const RunResult result = run_simulation(setup.profiles, setup.specs, setup.run);
    std::filesystem::create_directories(opts.out);
    write_series_csv(std::filesystem::path(opts.out) / "series.csv", result);
    write_sessions_csv(std::filesystem::path(opts.out) / "sessions.csv", result);
    double sw = 0.0;
    for (const auto& agent : result.agents) {
        const double xi = performance(agent);
        sw += xi;
        std::cout << "xi," << agent.id << ',' << fmt(xi) << '\n';
    }
    std::cout << "sw," << to_string(setup.run.strategy) << ',' << fmt(sw) << '\n';
    return 0;
}

int cmd_compare(const CommonOptions& opts) {
    SimulationSetup setup = load_with_overrides(opts);
    std::map<Strategy, RunResult> results;
    for (const Strategy strategy : {Strategy::no_flexibility, Strategy::individual_control,
                                    Strategy::negotiation_and_control}) {
        setup.run.strategy = strategy;
        log_line("compare: running " + to_string(strategy));
        results[strategy] = run_simulation(setup.profiles, setup.specs, setup.run);
    }
    const WelfareReport report = social_welfare(results);
    export_reports(report, opts.out);
    for (const auto& [strategy, sw] : report.sw)
        std::cout << "sw," << to_string(strategy) << ',' << fmt(sw) << '\n';
    for (const auto& [pair, nw] : report.nw)
        std::cout << "nw," << to_string(pair.first) << '|' << to_string(pair.second) << ','
                  << fmt(nw.value) << ",log10=" << fmt(nw.log10_magnitude) << '\n';
    std::cout << "reports," << opts.out << '\n';
    return 0;
}

// builds the period-local view one agent brings into a standalone session
AgentState agent_view(const SimulationSetup& setup, std::size_t index, int period) {
    const AgentProfile& profile = setup.profiles[index];
    const AgentSpec& spec = setup.specs[index];
    const TimeSeries net = net_demand(profile.load, profile.pv);
    const double peak = net.values.abs().maxCoeff();
    const TimeSeries predicted =
        pseudo_predict(net, setup.run.noise_frac * peak, setup.run.seed ^ (index + 1));
    const int offset = period - net.start_index;
    const int w = setup.run.horizon_periods;
    if (offset < 0 || offset + w > net.size())
        throw ArgumentError("period " + std::to_string(period) + " leaves no full horizon");
    return {spec.id,
            TimeSeries(predicted.values.segment(offset, w), period, net.granularity_minutes),
            spec.battery,
            ExchangeLedger{},
            spec.link,
            spec.weights,
            spec.aspiration_quantile};
}

std::size_t profile_index(const SimulationSetup& setup, const std::string& id) {
    for (std::size_t i = 0; i < setup.profiles.size(); ++i)
        if (setup.profiles[i].agent_id == id) return i;
    throw ArgumentError("unknown agent id '" + id + "'");
}

int cmd_negotiate_once(const CommonOptions& opts, const std::string& id_a, const std::string& id_b,
                       std::optional<int> period_opt, const std::string& transcript_path) {
    SimulationSetup setup = load_with_overrides(opts);
    if (setup.profiles.size() < 2) throw ConfigError("negotiate-once needs at least two profiles");
    const std::size_t ia = id_a.empty() ? 0 : profile_index(setup, id_a);
    const std::size_t ib = id_b.empty() ? 1 : profile_index(setup, id_b);
    if (ia == ib) throw ArgumentError("negotiate-once needs two distinct agents");
    const int period = period_opt.value_or(setup.profiles[0].load.start_index);

    AgentState a = agent_view(setup, ia, period);
    AgentState b = agent_view(setup, ib, period);
    const int w = setup.run.horizon_periods;
    double max_loan = std::min(a.link.max_loan_kwh(), b.link.max_loan_kwh());
    const NegotiationDomain domain(setup.run.quantity_levels, max_loan, 2, w);
    const ScenarioSet scn_a = generate_scenarios(
        a.predicted_net, GpParams::scaled(a.predicted_net, setup.run.gp_sigma_frac, setup.run.gp_rho),
        setup.run.scenario_count, setup.run.seed ^ 0xA1);
    const ScenarioSet scn_b = generate_scenarios(
        b.predicted_net, GpParams::scaled(b.predicted_net, setup.run.gp_sigma_frac, setup.run.gp_rho),
        setup.run.scenario_count, setup.run.seed ^ 0xB2);

    std::vector<TranscriptRow> transcript;
    const SessionConfig session{setup.run.deadline_rounds, period};
    const SessionOutcome outcome = negotiate(a, b, session, domain, scn_a, scn_b, &transcript);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!transcript_path.empty()) {
        file.open(transcript_path);
        if (!file) throw ExportError("cannot open '" + transcript_path + "'");
        out = &file;
    }
    *out << "period,agents,round,proposer,q,tau,proposer_utility,response\n";
    for (const auto& row : transcript) {
        *out << period << ',' << a.id << '|' << b.id << ',' << row.round << ',' << row.proposer
             << ',';
        if (row.has_offer)
            *out << fmt(row.offer.quantity_kwh) << ',' << row.offer.return_delay << ','
                 << fmt(row.proposer_utility);
        else
            *out << ",,";
        *out << ',' << row.response << '\n';
    }
    std::cout << "agreed," << (outcome.agreed ? 1 : 0) << '\n';
    if (outcome.agreed)
        std::cout << "agreement,q=" << fmt(outcome.agreement->quantity_kwh)
                  << ",tau=" << outcome.agreement->return_delay << ",proposed_by="
                  << (outcome.proposed_by == 0 ? a.id : b.id) << '\n';
    std::cout << "rounds," << outcome.rounds_used << '\n';
    std::cout << "utilities," << fmt(outcome.utilities.first) << ',' << fmt(outcome.utilities.second)
              << '\n';
    std::cout << "nash_distance," << fmt(outcome.nash_distance) << '\n';
    return 0;
}

int cmd_nash_oracle(const CommonOptions& opts, const std::string& id_a, const std::string& id_b,
                    std::optional<int> period_opt) {
    SimulationSetup setup = load_with_overrides(opts);
    if (setup.profiles.size() < 2) throw ConfigError("nash-oracle needs at least two profiles");
    const std::size_t ia = id_a.empty() ? 0 : profile_index(setup, id_a);
    const std::size_t ib = id_b.empty() ? 1 : profile_index(setup, id_b);
    const int period = period_opt.value_or(setup.profiles[0].load.start_index);

    AgentState a = agent_view(setup, ia, period);
    AgentState b = agent_view(setup, ib, period);
    const NegotiationDomain domain(setup.run.quantity_levels,
                                   std::min(a.link.max_loan_kwh(), b.link.max_loan_kwh()), 2,
                                   setup.run.horizon_periods);
    const ScenarioSet scn_a = generate_scenarios(
        a.predicted_net, GpParams::scaled(a.predicted_net, setup.run.gp_sigma_frac, setup.run.gp_rho),
        setup.run.scenario_count, setup.run.seed ^ 0xA1);
    const ScenarioSet scn_b = generate_scenarios(
        b.predicted_net, GpParams::scaled(b.predicted_net, setup.run.gp_sigma_frac, setup.run.gp_rho),
        setup.run.scenario_count, setup.run.seed ^ 0xB2);
    const ContractSpace space_a = build_contract_space(a, domain, scn_a);
    const ContractSpace space_b = build_contract_space(b, domain, scn_b);
    const EnergyContract no_deal{0.0, domain.delay_min()};
    const std::pair<double, double> reservations{space_a.utility_of(no_deal),
                                                 space_b.utility_of(no_deal)};
    const auto [contract, point] = nash_solution(space_a, space_b, reservations);
    std::cout << "period," << period << '\n';
    std::cout << "agents," << a.id << '|' << b.id << '\n';
    std::cout << "reservations," << fmt(reservations.first) << ',' << fmt(reservations.second)
              << '\n';
    std::cout << "nash_contract,q=" << fmt(contract.quantity_kwh) << ",tau=" << contract.return_delay
              << '\n';
    std::cout << "nash_point," << fmt(point.first) << ',' << fmt(point.second) << '\n';
    return 0;
}

int cmd_gen_profiles(int agents, int length, std::uint64_t seed, int granularity,
                     const std::string& out) {
    const auto profiles = synth_complementary(agents, length, seed, granularity);
    write_profiles(out, profiles);
    std::cout << "wrote," << out << ",agents=" << agents << ",length=" << length << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Peer-to-peer energy loan negotiation simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts, cmp_opts, neg_opts, nash_opts;
    std::string neg_a, neg_b, nash_a, nash_b, transcript_path;
    std::optional<int> neg_period, nash_period;
    int gen_agents = 2, gen_length = 672, gen_granularity = 15;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "profiles.csv";

    CLI::App* simulate = app.add_subcommand("simulate", "Run one strategy end-to-end");
    add_common(simulate, sim_opts);

    CLI::App* compare =
        app.add_subcommand("compare", "Run s0/s1/s2 on shared seeds and export the welfare report");
    add_common(compare, cmp_opts);

    CLI::App* negotiate_once =
        app.add_subcommand("negotiate-once", "Run a single pairwise session with transcript");
    add_common(negotiate_once, neg_opts, false);
    negotiate_once->add_option("--a", neg_a, "First agent id (default: first profile)");
    negotiate_once->add_option("--b", neg_b, "Second agent id (default: second profile)");
    negotiate_once->add_option("--period", neg_period, "Negotiation period");
    negotiate_once->add_option("--out", transcript_path, "Write the transcript CSV here");

    CLI::App* nash_oracle =
        app.add_subcommand("nash-oracle", "Print the Nash point for a period and pair");
    add_common(nash_oracle, nash_opts, false);
    nash_oracle->add_option("--a", nash_a, "First agent id");
    nash_oracle->add_option("--b", nash_b, "Second agent id");
    nash_oracle->add_option("--period", nash_period, "Period");

    CLI::App* gen = app.add_subcommand("gen-profiles", "Write synthetic complementary profiles");
    gen->add_option("--agents", gen_agents, "Number of agents (>= 2)");
    gen->add_option("--length", gen_length, "Number of periods");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--granularity", gen_granularity, "Granularity in minutes");
    gen->add_option("--out", gen_out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (compare->parsed()) return cmd_compare(cmp_opts);
        if (negotiate_once->parsed())
            return cmd_negotiate_once(neg_opts, neg_a, neg_b, neg_period, transcript_path);
        if (nash_oracle->parsed()) return cmd_nash_oracle(nash_opts, nash_a, nash_b, nash_period);
        if (gen->parsed())
            return cmd_gen_profiles(gen_agents, gen_length, gen_seed, gen_granularity, gen_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

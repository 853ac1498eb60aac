#include "recnego/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace recnego {

double performance(const AgentRecord& agent) {
    const double dt = agent.dispatch.dt_hours();
    const double dispatched = (agent.dispatch.values * dt).sum();
    const double delta = agent.soc_path[0] - agent.soc_path[agent.soc_path.size() - 1];
    const double theta =
        delta > 0.0 ? delta / agent.battery.eff_charge : delta * agent.battery.eff_discharge;
    const double autarky = (agent.residual.values.abs() * dt).sum();
    return -(agent.weights.w_flex * (dispatched + theta) + agent.weights.w_autarky * autarky);
}

PeakStats peak_exchange_stats(const std::vector<std::pair<std::string, ExchangeLedger>>& ledgers,
                              const TimeSeries& pcc) {
    const Eigen::Index total = pcc.size();
    const int start = pcc.start_index;
    const double dt = pcc.dt_hours();

    // net kWh per unordered pair and period, each loan counted once
    std::map<std::pair<std::pair<std::string, std::string>, int>, double> pair_flow;
    for (const auto& [owner, ledger] : ledgers) {
        for (const auto& entry : ledger.entries) {
            if (!(owner < entry.counterparty)) continue;
            pair_flow[{{owner, entry.counterparty}, entry.period}] += entry.energy_kwh;
        }
    }
    PeakStats stats;
    stats.intra_kw = Eigen::ArrayXd::Zero(total);
    for (const auto& [key, kwh] : pair_flow) {
        const int offset = key.second - start;
        if (offset >= 0 && offset < total) stats.intra_kw[offset] += std::abs(kwh) / dt;
    }
    stats.pcc_abs_kw = pcc.values.abs();
    if (total > 0) {
        stats.intra_mean = stats.intra_kw.mean();
        stats.intra_max = stats.intra_kw.maxCoeff();
        stats.pcc_mean = stats.pcc_abs_kw.mean();
        stats.pcc_max = stats.pcc_abs_kw.maxCoeff();
    }
    return stats;
}

WelfareReport social_welfare(const std::map<Strategy, RunResult>& results) {
    WelfareReport report;
    if (results.empty()) return report;

    const RunResult& first = results.begin()->second;
    for (const auto& agent : first.agents) report.agent_ids.push_back(agent.id);
    report.dt_hours = first.agents.empty() ? 1.0 : first.agents[0].residual.dt_hours();

    for (const auto& [strategy, result] : results) {
        if (result.agents.size() != report.agent_ids.size())
            throw ArgumentError("social_welfare: strategies cover different agent sets");
        std::vector<double> xi;
        std::vector<std::pair<std::string, ExchangeLedger>> ledgers;
        Eigen::ArrayXd pcc;
        for (std::size_t i = 0; i < result.agents.size(); ++i) {
            const AgentRecord& agent = result.agents[i];
            if (agent.id != report.agent_ids[i])
                throw ArgumentError("social_welfare: strategies cover different agent sets");
            xi.push_back(performance(agent));
            ledgers.emplace_back(agent.id, agent.ledger);
            if (i == 0)
                pcc = agent.residual.values;
            else
                pcc += agent.residual.values;
        }
        report.sw[strategy] = std::accumulate(xi.begin(), xi.end(), 0.0);
        report.xi[strategy] = std::move(xi);
        if (!result.agents.empty()) {
            const TimeSeries pcc_series(std::move(pcc), result.agents[0].residual.start_index,
                                        result.agents[0].residual.granularity_minutes);
            report.peaks[strategy] = peak_exchange_stats(ledgers, pcc_series);
        }
        if (strategy == Strategy::negotiation_and_control) {
            report.sessions = result.sessions;
            report.stats = result.stats;
        }
    }

    // nw_{s|h} for every ordered improvement pair present
    for (auto s = results.begin(); s != results.end(); ++s) {
        for (auto h = results.begin(); h != results.end(); ++h) {
            if (!(static_cast<int>(s->first) > static_cast<int>(h->first))) continue;
            NashWelfare nw;
            nw.sign = 1;
            nw.value = 1.0;
            nw.log10_magnitude = 0.0;
            for (std::size_t i = 0; i < report.agent_ids.size(); ++i) {
                const double factor = report.xi[s->first][i] - report.xi[h->first][i];
                if (factor == 0.0) {
                    nw.sign = 0;
                    break;
                }
                nw.sign *= factor > 0.0 ? 1 : -1;
                nw.log10_magnitude += std::log10(std::abs(factor));
                nw.value *= factor;
            }
            if (nw.sign == 0) {
                nw.value = 0.0;
                nw.log10_magnitude = -std::numeric_limits<double>::infinity();
            }
            report.nw[{s->first, h->first}] = nw;
        }
    }
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ExportError("export_reports: cannot open '" + path.string() + "'");
    return out;
}

}  // namespace

void export_reports(const WelfareReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ExportError("export_reports: cannot create '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);

    {
        auto out = open_out(dir / "welfare.csv");
        out << "metric,agent_id,strategy,value\n";
        for (const auto& [strategy, xi] : report.xi)
            for (std::size_t i = 0; i < xi.size(); ++i)
                out << "xi," << report.agent_ids[i] << ',' << to_string(strategy) << ','
                    << fmt(xi[i]) << '\n';
        for (const auto& [strategy, sw] : report.sw)
            out << "sw,," << to_string(strategy) << ',' << fmt(sw) << '\n';
        for (const auto& [pair, nw] : report.nw) {
            const std::string key = to_string(pair.first) + "|" + to_string(pair.second);
            out << "nw,," << key << ',' << fmt(nw.value) << '\n';
            out << "nw_log10,," << key << ',' << fmt(nw.log10_magnitude) << '\n';
            out << "nw_sign,," << key << ',' << nw.sign << '\n';
        }
    }
    {
        auto out = open_out(dir / "nash_distances.csv");
        out << "period,agent_a,agent_b,agreed,rounds,proposed_by,q_kwh,return_delay,distance,"
               "nodeal_distance\n";
        for (const auto& s : report.sessions) {
            out << s.period << ',' << s.agent_a << ',' << s.agent_b << ',' << (s.agreed ? 1 : 0)
                << ',' << s.rounds_used << ',';
            if (s.agreed && s.agreement) {
                out << (s.proposed_by == 0 ? s.agent_a : s.agent_b) << ','
                    << fmt(s.agreement->quantity_kwh) << ',' << s.agreement->return_delay;
            } else {
                out << ",,";
            }
            out << ',' << fmt(s.nash_distance) << ',' << fmt(s.nodeal_distance) << '\n';
        }
    }
    {
        auto out = open_out(dir / "exchanges_by_hour.csv");
        out << "hour,quantity_kwh\n";
        for (const auto& s : report.sessions) {
            if (!s.agreed || !s.agreement) continue;
            const int hour =
                static_cast<int>(std::floor(s.period * report.dt_hours)) % 24;
            out << hour << ',' << fmt(std::abs(s.agreement->quantity_kwh)) << '\n';
        }
    }
    {
        auto out = open_out(dir / "peaks.csv");
        out << "period";
        for (const auto& [strategy, peaks] : report.peaks)
            out << ",intra_" << to_string(strategy) << "_kw,pcc_" << to_string(strategy) << "_kw";
        out << '\n';
        Eigen::Index total = 0;
        for (const auto& [strategy, peaks] : report.peaks)
            total = std::max(total, peaks.intra_kw.size());
        for (Eigen::Index t = 0; t < total; ++t) {
            out << t;
            for (const auto& [strategy, peaks] : report.peaks)
                out << ',' << fmt(peaks.intra_kw[t]) << ',' << fmt(peaks.pcc_abs_kw[t]);
            out << '\n';
        }
        if (total > 0) {
            out << "mean";
            for (const auto& [strategy, peaks] : report.peaks)
                out << ',' << fmt(peaks.intra_mean) << ',' << fmt(peaks.pcc_mean);
            out << "\nmax";
            for (const auto& [strategy, peaks] : report.peaks)
                out << ',' << fmt(peaks.intra_max) << ',' << fmt(peaks.pcc_max);
            out << '\n';
        }
    }
    {
        auto out = open_out(dir / "peer_graph.csv");
        out << "agent_a,agent_b,sessions,successes,mean_nash_distance\n";
        for (const auto& [id, stats] : report.stats) {
            for (const auto& [opponent, record] : stats.by_opponent) {
                if (!(id < opponent)) continue;
                out << id << ',' << opponent << ',' << record.sessions << ',' << record.successes
                    << ',' << fmt(record.mean_nash_distance) << '\n';
            }
        }
    }
}

}  // namespace recnego

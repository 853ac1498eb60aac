#include "recnego/profile_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace recnego {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_real(const std::string& text, int row, const char* column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "row " << row << ", column " << column << ": cannot parse '" << text << "' as a real";
        throw IngestionError(msg.str());
    }
}

long parse_period(const std::string& text, int row) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "row " << row << ", column t: cannot parse '" << text << "' as a period index";
        throw IngestionError(msg.str());
    }
}

}  // namespace

std::vector<AgentProfile> load_profiles(const std::string& path, int granularity_minutes) {
    if (granularity_minutes <= 0)
        throw ArgumentError("load_profiles: granularity_minutes must be positive");
    std::ifstream in(path);
    if (!in) throw IngestionError("load_profiles: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw IngestionError("load_profiles: empty file '" + path + "'");
    const std::vector<std::string> header = split_csv(line);
    const std::vector<std::string> expected{"agent_id", "t", "load_kw", "pv_kw"};
    for (const auto& column : expected) {
        if (std::find(header.begin(), header.end(), column) == header.end())
            throw IngestionError("load_profiles: missing column '" + column + "'");
    }
    std::size_t col[4];
    for (std::size_t i = 0; i < 4; ++i)
        col[i] = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), expected[i]) - header.begin());

    struct Sample {
        double load, pv;
    };
    std::map<std::string, std::map<long, Sample>> by_agent;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "row " << row << ": expected " << header.size() << " fields, found "
                << fields.size();
            throw IngestionError(msg.str());
        }
        const std::string& id = fields[col[0]];
        const long t = parse_period(fields[col[1]], row);
        const double load = parse_real(fields[col[2]], row, "load_kw");
        const double pv = parse_real(fields[col[3]], row, "pv_kw");
        if (!by_agent[id].emplace(t, Sample{load, pv}).second) {
            std::ostringstream msg;
            msg << "row " << row << ": duplicate sample for agent '" << id << "' at t = " << t;
            throw IngestionError(msg.str());
        }
    }
    if (by_agent.empty()) throw IngestionError("load_profiles: no samples in '" + path + "'");

    std::vector<AgentProfile> profiles;
    long t0 = 0;
    Eigen::Index length = -1;
    for (const auto& [id, samples] : by_agent) {
        const long first = samples.begin()->first;
        const long last = samples.rbegin()->first;
        if (last - first + 1 != static_cast<long>(samples.size()))
            throw IngestionError("load_profiles: agent '" + id + "' has gaps in its period range");
        if (length < 0) {
            t0 = first;
            length = static_cast<Eigen::Index>(samples.size());
        } else if (first != t0 || static_cast<Eigen::Index>(samples.size()) != length) {
            throw IngestionError("load_profiles: agent '" + id +
                                 "' covers a different period range than the others");
        }
        Eigen::ArrayXd load(length), pv(length);
        Eigen::Index i = 0;
        for (const auto& [t, sample] : samples) {
            load[i] = sample.load;
            pv[i] = sample.pv;
            ++i;
        }
        profiles.push_back({id, TimeSeries(std::move(load), static_cast<int>(t0), granularity_minutes),
                            TimeSeries(std::move(pv), static_cast<int>(t0), granularity_minutes)});
    }
    return profiles;
}

void write_profiles(const std::string& path, const std::vector<AgentProfile>& profiles) {
    std::ofstream out(path);
    if (!out) throw ExportError("write_profiles: cannot open '" + path + "' for writing");
    out << "agent_id,t,load_kw,pv_kw\n";
    char buf[64];
    for (const auto& p : profiles) {
        p.validate();
        for (Eigen::Index i = 0; i < p.load.size(); ++i) {
            out << p.agent_id << ',' << p.load.start_index + i << ',';
            std::snprintf(buf, sizeof buf, "%.17g", p.load.values[i]);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", p.pv.values[i]);
            out << buf << '\n';
        }
    }
    if (!out) throw ExportError("write_profiles: failed to write '" + path + "'");
}

TimeSeries pseudo_predict(const TimeSeries& actual, double noise_std_kw, std::uint64_t seed) {
    if (noise_std_kw < 0.0) throw ArgumentError("pseudo_predict: noise_std must be >= 0");
    TimeSeries predicted = actual;
    if (noise_std_kw == 0.0) return predicted;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_std_kw);
    for (Eigen::Index i = 0; i < predicted.size(); ++i) predicted.values[i] += gauss(rng);
    return predicted;
}

namespace {

double total_positive(const std::vector<Eigen::ArrayXd>& loads,
                      const std::vector<Eigen::ArrayXd>& pvs, double pv_scale, bool negative) {
    double total = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const Eigen::ArrayXd net = loads[i] - pv_scale * pvs[i];
        total += negative ? (-net).max(0.0).sum() : net.max(0.0).sum();
    }
    return total;
}

}  // namespace

std::vector<AgentProfile> synth_complementary(int n_agents, int length, std::uint64_t seed,
                                              int granularity_minutes) {
    if (n_agents < 2) throw ArgumentError("synth_complementary: need at least 2 agents");
    if (length < 1) throw ArgumentError("synth_complementary: length must be >= 1");

    std::vector<AgentProfile> profiles;
    if (n_agents == 2) {
        // classic lender/borrower pair, tiled to the requested length
        const double pattern_a[5] = {1.0, 1.0, -2.0, 1.0, -1.0};
        const double pattern_b[5] = {-2.0, 1.0, -1.0, -1.0, 2.0};
        for (int k = 0; k < 2; ++k) {
            const double* pattern = k == 0 ? pattern_a : pattern_b;
            Eigen::ArrayXd load(length), pv(length);
            for (int t = 0; t < length; ++t) {
                const double net = pattern[t % 5];
                load[t] = std::max(net, 0.0);
                pv[t] = std::max(-net, 0.0);
            }
            profiles.push_back({k == 0 ? "A" : "B",
                                TimeSeries(std::move(load), 0, granularity_minutes),
                                TimeSeries(std::move(pv), 0, granularity_minutes)});
        }
        return profiles;
    }

    // PV-heavy agents produce around midday; load-heavy ones peak in the
    // evening. The PV scale is then balanced so community-wide surplus and
    // deficit roughly cancel and loans have something to move.
    const int day = length >= 96 ? 96 : length;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    std::vector<Eigen::ArrayXd> loads, pvs;
    for (int k = 0; k < n_agents; ++k) {
        const bool pv_heavy = k % 2 == 0;
        const double load_amp = 0.4 * jitter(rng);
        const double pv_amp = (pv_heavy ? 1.6 : 0.2) * jitter(rng);
        const double evening_amp = (pv_heavy ? 0.3 : 1.0) * jitter(rng);
        const double phase = 0.15 * jitter(rng);
        Eigen::ArrayXd load(length), pv(length);
        for (int t = 0; t < length; ++t) {
            const double x = static_cast<double>(t % day) / day;  // fraction of the day
            const double midday = std::exp(-std::pow((x - 0.5) / 0.15, 2));
            const double evening = std::exp(-std::pow((x - 0.8 - 0.05 * phase) / 0.1, 2));
            load[t] = load_amp + evening_amp * evening;
            pv[t] = pv_amp * midday;
        }
        loads.push_back(std::move(load));
        pvs.push_back(std::move(pv));
    }
    // bisection on the global PV scale: surplus - deficit is decreasing in it
    double lo = 0.05, hi = 20.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double pos = total_positive(loads, pvs, mid, false);
        const double neg = total_positive(loads, pvs, mid, true);
        (pos > neg ? lo : hi) = mid;
    }
    const double scale = 0.5 * (lo + hi);
    const int width = n_agents > 9 ? (n_agents > 99 ? 3 : 2) : 1;
    for (int k = 0; k < n_agents; ++k) {
        pvs[static_cast<std::size_t>(k)] *= scale;
        std::string id = std::to_string(k + 1);
        id = "agent" + std::string(static_cast<std::size_t>(width) - std::min(id.size(), static_cast<std::size_t>(width)), '0') + id;
        profiles.push_back({id,
                            TimeSeries(std::move(loads[static_cast<std::size_t>(k)]), 0, granularity_minutes),
                            TimeSeries(std::move(pvs[static_cast<std::size_t>(k)]), 0, granularity_minutes)});
    }
    return profiles;
}

}  // namespace recnego

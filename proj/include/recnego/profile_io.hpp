#pragma once

#include <string>
#include <vector>

#include "recnego/time_series.hpp"

namespace recnego {

struct AgentProfile {
    std::string agent_id;
    TimeSeries load;
    TimeSeries pv;

    void validate() const {
        load.validate();
        pv.validate();
        if (load.size() != pv.size() || load.granularity_minutes != pv.granularity_minutes)
            throw ArgumentError("AgentProfile: load and pv must share granularity and length");
    }
};

/// Read per-agent load and PV series from a CSV with columns
/// agent_id,t,load_kw,pv_kw. All agents must cover the same contiguous
/// period range. Profiles are returned sorted by agent id.
std::vector<AgentProfile> load_profiles(const std::string& path, int granularity_minutes);

/// Inverse of load_profiles; values round-trip bit-exactly.
void write_profiles(const std::string& path, const std::vector<AgentProfile>& profiles);

/// Forecast stand-in: the actual signal plus i.i.d. Gaussian noise.
/// A pure function of (actual, noise_std, seed).
TimeSeries pseudo_predict(const TimeSeries& actual, double noise_std_kw, std::uint64_t seed);

/// Synthesize anti-phase test profiles: some agents PV-heavy around midday,
/// the others load-heavy in the evening, with aggregate surplus and deficit
/// balanced so that negotiation gains exist. n = 2 reproduces the classic
/// two-agent lending pattern {1,1,-2,1,-1} / {-2,1,-1,-1,2} tiled to length.
std::vector<AgentProfile> synth_complementary(int n_agents, int length, std::uint64_t seed,
                                              int granularity_minutes = 15);

}  // namespace recnego

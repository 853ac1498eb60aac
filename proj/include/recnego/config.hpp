#pragma once

#include <string>
#include <vector>

#include "recnego/community.hpp"

namespace recnego {

/// A fully resolved run: defaults, per-agent specifications and profiles,
/// ready for run_simulation.
struct SimulationSetup {
    RunConfig run;
    int granularity_minutes = 15;
    std::vector<AgentProfile> profiles;
    std::vector<AgentSpec> specs;
};

/// Load a declarative JSON run configuration. Profiles come either from a
/// CSV referenced by the file (resolved relative to it) or from the
/// synthetic generator. Every profile needs an agent spec: `agent_defaults`
/// fills the gaps, `agents` entries override per id. Throws ConfigError on
/// any problem.
SimulationSetup load_setup(const std::string& config_path);

}  // namespace recnego

#include "recnego/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace recnego {

namespace {

using nlohmann::json;

Battery battery_from(const json& j) {
    Battery b;
    b.capacity_kwh = j.value("capacity_kwh", 6.8);
    b.soc_min_frac = j.value("soc_min_frac", 0.2);
    b.soc_max_frac = j.value("soc_max_frac", 0.9);
    b.soc_kwh = j.value("soc_init_frac", 0.5) * b.capacity_kwh;
    b.charge_rate_kw = j.value("charge_rate_kw", 1.3);
    b.discharge_rate_kw = j.value("discharge_rate_kw", 3.3);
    b.eff_charge = j.value("eff_charge", 0.9);
    b.eff_discharge = j.value("eff_discharge", 0.9);
    b.degradation_kwh_per_step = j.value("degradation_frac", 0.0004) * b.capacity_kwh;
    return b;
}

AgentSpec spec_from(const std::string& id, const json& defaults, const json& overrides) {
    json merged = defaults;
    merged.update(overrides);
    AgentSpec spec;
    spec.id = id;
    spec.aspiration_quantile = merged.value("aspiration_quantile", 0.8);
    spec.weights.w_flex = merged.value("w_flex", 0.5);
    spec.weights.w_autarky = merged.value("w_autarky", 1.0 - spec.weights.w_flex);
    json battery = defaults.value("battery", json::object());
    battery.update(merged.value("battery", json::object()));
    spec.battery = battery_from(battery);
    return spec;
}

}  // namespace

SimulationSetup load_setup(const std::string& config_path) {
    namespace fs = std::filesystem;
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    try {
        SimulationSetup setup;
        setup.granularity_minutes = j.value("granularity_minutes", 15);
        if (setup.granularity_minutes <= 0) throw ConfigError("granularity_minutes must be positive");
        const double horizon_hours = j.value("horizon_hours", 24.0);
        setup.run.horizon_periods =
            static_cast<int>(horizon_hours * 60.0 / setup.granularity_minutes + 0.5);
        setup.run.total_periods = j.value("periods", 0);
        setup.run.seed = j.value("seed", std::uint64_t{0});
        setup.run.epsilon = j.value("epsilon", 0.1);
        setup.run.scenario_count = j.value("scenario_count", 100);
        setup.run.quantity_levels = j.value("quantity_levels", 15);
        setup.run.deadline_rounds = j.value("deadline_rounds", 5000);
        setup.run.noise_frac = j.value("noise_frac", 0.05);
        if (j.contains("gp")) {
            setup.run.gp_sigma_frac = j["gp"].value("sigma_frac", 0.05);
            setup.run.gp_rho = j["gp"].value("rho", 0.7);
        }
        LinkParams link;
        if (j.contains("link")) {
            link.link_limit_kw = j["link"].value("limit_kw", 5.0);
            link.link_efficiency = j["link"].value("efficiency", 1.0);
        }
        link.validate();

        const json profiles_cfg = j.value("profiles", json::object());
        if (profiles_cfg.contains("csv")) {
            fs::path path = profiles_cfg["csv"].get<std::string>();
            if (path.is_relative()) path = fs::path(config_path).parent_path() / path;
            setup.profiles = load_profiles(path.string(), setup.granularity_minutes);
        } else if (profiles_cfg.contains("synthetic")) {
            const json& synth = profiles_cfg["synthetic"];
            setup.profiles = synth_complementary(
                synth.value("agents", 2), synth.value("length", 672),
                synth.value("seed", setup.run.seed), setup.granularity_minutes);
        } else {
            throw ConfigError("profiles: need either a 'csv' path or a 'synthetic' block");
        }

        const json defaults = j.value("agent_defaults", json::object());
        std::map<std::string, json> overrides;
        for (const json& entry : j.value("agents", json::array())) {
            if (!entry.contains("id")) throw ConfigError("agents[] entries need an 'id'");
            overrides[entry["id"].get<std::string>()] = entry;
        }
        for (const auto& profile : setup.profiles) {
            const auto it = overrides.find(profile.agent_id);
            setup.specs.push_back(spec_from(profile.agent_id, defaults,
                                            it == overrides.end() ? json::object() : it->second));
            setup.specs.back().link = link;
        }
        for (const auto& [id, unused] : overrides) {
            (void)unused;
            bool known = false;
            for (const auto& profile : setup.profiles) known |= profile.agent_id == id;
            if (!known) throw ConfigError("agents[] references unknown profile id '" + id + "'");
        }

        // fail fast on inconsistent values instead of midway through a run
        setup.run.validate();
        for (const auto& spec : setup.specs) {
            spec.battery.validate();
            spec.weights.validate();
            if (spec.aspiration_quantile < 0.0 || spec.aspiration_quantile > 1.0)
                throw ConfigError("aspiration_quantile must be in [0, 1] for agent '" + spec.id + "'");
        }
        return setup;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

}  // namespace recnego

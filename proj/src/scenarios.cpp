#include "recnego/scenarios.hpp"

#include <cmath>
#include <random>

namespace recnego {

GpParams GpParams::scaled(const TimeSeries& base, double sigma_frac, double rho) {
    if (sigma_frac < 0.0) throw ArgumentError("GpParams::scaled: sigma_frac must be >= 0");
    const double peak = base.size() > 0 ? base.values.abs().maxCoeff() : 0.0;
    const auto w = static_cast<double>(base.size());
    GpParams params;
    params.lag_stds.resize(base.size());
    for (Eigen::Index l = 0; l < base.size(); ++l)
        params.lag_stds[l] = sigma_frac * peak * (1.0 + static_cast<double>(l) / w);
    params.step_correlation = rho;
    params.validate();
    return params;
}

ScenarioSet generate_scenarios(const TimeSeries& base, const GpParams& params, int count,
                               std::uint64_t seed) {
    params.validate();
    if (count < 1) throw ArgumentError("generate_scenarios: count must be >= 1");
    if (params.lag_stds.size() != base.size())
        throw ArgumentError("generate_scenarios: lag_stds length must equal base length");

    const Eigen::Index w = base.size();
    const double rho = params.step_correlation;
    const double fresh = std::sqrt(1.0 - rho * rho);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ScenarioSet scn;
    scn.base = base;
    scn.deviations.resize(count, w);
    scn.probabilities = Eigen::ArrayXd::Constant(count, 1.0 / count);
    for (int s = 0; s < count; ++s) {
        double prev = 0.0;
        double prev_std = 0.0;
        for (Eigen::Index l = 0; l < w; ++l) {
            const double sigma = params.lag_stds[l];
            double d;
            if (l == 0 || prev_std == 0.0) {
                d = sigma * gauss(rng);
            } else {
                d = rho * prev * sigma / prev_std + sigma * fresh * gauss(rng);
            }
            scn.deviations(s, l) = d;
            prev = d;
            prev_std = sigma;
        }
    }
    return scn;
}

Eigen::ArrayXXd scenario_residual(const ScenarioSet& scn, const TimeSeries& exchange,
                                  const Eigen::ArrayXXd& battery_dispatch) {
    const Eigen::Index w = scn.horizon();
    if (exchange.size() != w || battery_dispatch.cols() != w ||
        battery_dispatch.rows() != scn.count())
        throw ArgumentError("scenario_residual: dimension mismatch");
    Eigen::ArrayXXd residual = scn.deviations + battery_dispatch;
    residual.rowwise() += (scn.base.values + exchange.values).transpose();
    return residual;
}

}  // namespace recnego

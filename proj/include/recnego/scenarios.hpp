#pragma once

#include <Eigen/Dense>

#include "recnego/time_series.hpp"

namespace recnego {

/// Error model of the net-demand forecast over the planning horizon:
/// a Gaussian error per discrete lag plus an AR(1) dependency between
/// consecutive periods.
struct GpParams {
    Eigen::ArrayXd lag_stds;       // kW, one entry per lag l = 0..w-1
    double step_correlation = 0.0; // rho, in [-1, 1]

    void validate() const {
        if ((lag_stds < 0.0).any())
            throw ArgumentError("GpParams: lag_stds must be non-negative");
        if (step_correlation < -1.0 || step_correlation > 1.0)
            throw ArgumentError("GpParams: |step_correlation| must be <= 1");
    }

    /// Default shape when the forecast error is otherwise unknown: sigma_l
    /// grows linearly with the lag from sigma_frac*|base|_inf to twice that.
    static GpParams scaled(const TimeSeries& base, double sigma_frac, double rho);
};

/// Stochastic net-load scenario set: base prediction plus |S| equiprobable
/// deviation rows d(l, s).
struct ScenarioSet {
    TimeSeries base;               // predicted net demand over the horizon, kW
    Eigen::ArrayXXd deviations;    // |S| x w, kW
    Eigen::ArrayXd probabilities;  // |S|, all 1/|S|

    Eigen::Index count() const { return deviations.rows(); }
    Eigen::Index horizon() const { return deviations.cols(); }

    /// Net demand of scenario s across the horizon: base + deviation row.
    Eigen::ArrayXd net_row(Eigen::Index s) const {
        return base.values + deviations.row(s).transpose();
    }
};

/// Draw `count` correlated Gaussian deviation rows around the base forecast:
/// d(0) = sigma_0 e_0, d(l) = rho d(l-1) sigma_l/sigma_{l-1} + sigma_l sqrt(1-rho^2) e_l,
/// so every column keeps its configured marginal std and consecutive columns
/// correlate with coefficient rho. Deterministic under a fixed seed.
ScenarioSet generate_scenarios(const TimeSeries& base, const GpParams& params, int count,
                               std::uint64_t seed);

/// Residual demand per scenario and lag:
/// base[l] + deviations[s, l] + exchange[l] + battery_dispatch[s, l].
Eigen::ArrayXXd scenario_residual(const ScenarioSet& scn, const TimeSeries& exchange,
                                  const Eigen::ArrayXXd& battery_dispatch);

}  // namespace recnego

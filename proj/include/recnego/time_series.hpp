#pragma once

#include <Eigen/Dense>

#include "recnego/errors.hpp"

namespace recnego {

/// Uniformly sampled power signal (kW). Carrier for load, PV, net demand,
/// battery dispatch and exchange vectors. Timestamps are integer period
/// indices starting at start_index.
struct TimeSeries {
    Eigen::ArrayXd values;        // kW
    int start_index = 0;
    int granularity_minutes = 60;

    TimeSeries() = default;
    TimeSeries(Eigen::ArrayXd values, int start_index, int granularity_minutes)
        : values(std::move(values)), start_index(start_index), granularity_minutes(granularity_minutes) {
        validate();
    }

    Eigen::Index size() const { return values.size(); }
    double dt_hours() const { return granularity_minutes / 60.0; }

    void validate() const {
        if (granularity_minutes <= 0)
            throw ArgumentError("TimeSeries: granularity_minutes must be positive");
        if (!values.allFinite())
            throw ArgumentError("TimeSeries: values must be finite");
    }
};

/// Net demand after self-consumption: load - pv, elementwise.
inline TimeSeries net_demand(const TimeSeries& load, const TimeSeries& pv) {
    if (load.size() != pv.size() || load.granularity_minutes != pv.granularity_minutes)
        throw ArgumentError("net_demand: load and pv must share length and granularity");
    return TimeSeries(load.values - pv.values, load.start_index, load.granularity_minutes);
}

}  // namespace recnego

#include <doctest.h>

#include "recnego/scenarios.hpp"

using namespace recnego;

namespace {

TimeSeries flat_base(int w, double level, int granularity = 15) {
    return TimeSeries(Eigen::ArrayXd::Constant(w, level), 0, granularity);
}

}  // namespace

TEST_CASE("generate_scenarios draws correlated deviations around the base") {
    SUBCASE("zero lag stds reproduce the base in every scenario") {
        const TimeSeries base = flat_base(8, 1.5);
        GpParams params{Eigen::ArrayXd::Zero(8), 0.5};
        const ScenarioSet scn = generate_scenarios(base, params, 10, 1);
        CHECK((scn.deviations == 0.0).all());
        for (Eigen::Index s = 0; s < scn.count(); ++s)
            CHECK((scn.net_row(s) == base.values).all());
    }
    SUBCASE("probabilities are equiprobable and sum to one") {
        const TimeSeries base = flat_base(4, 0.0);
        GpParams params{Eigen::ArrayXd::Constant(4, 0.3), 0.0};
        const ScenarioSet scn = generate_scenarios(base, params, 100, 2);
        CHECK(scn.probabilities.size() == 100);
        CHECK((scn.probabilities == 0.01).all());
        CHECK(scn.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("reproducible under an identical seed") {
        const TimeSeries base = flat_base(6, -0.4);
        const GpParams params = GpParams::scaled(base, 0.05, 0.7);
        const ScenarioSet a = generate_scenarios(base, params, 20, 33);
        const ScenarioSet b = generate_scenarios(base, params, 20, 33);
        CHECK((a.deviations == b.deviations).all());
        const ScenarioSet c = generate_scenarios(base, params, 20, 34);
        CHECK((a.deviations != c.deviations).any());
    }
    SUBCASE("argument errors") {
        const TimeSeries base = flat_base(4, 1.0);
        GpParams params{Eigen::ArrayXd::Zero(4), 0.0};
        CHECK_THROWS_AS(generate_scenarios(base, params, 0, 1), ArgumentError);
        GpParams wrong{Eigen::ArrayXd::Zero(3), 0.0};
        CHECK_THROWS_AS(generate_scenarios(base, wrong, 5, 1), ArgumentError);
        GpParams bad_rho{Eigen::ArrayXd::Zero(4), 1.5};
        CHECK_THROWS_AS(generate_scenarios(base, bad_rho, 5, 1), ArgumentError);
    }
}

TEST_CASE("sample statistics match the configured moments at 1e4 draws") {
    const int w = 6;
    const int count = 10000;
    const TimeSeries base = flat_base(w, 0.0);
    GpParams params{Eigen::ArrayXd::Constant(w, 0.2), 0.5};
    const ScenarioSet scn = generate_scenarios(base, params, count, 5);

    for (Eigen::Index l = 0; l < w; ++l) {
        const Eigen::ArrayXd col = scn.deviations.col(l);
        const double mean = col.mean();
        const double sd = std::sqrt((col - mean).square().sum() / (count - 1));
        CHECK(sd == doctest::Approx(0.2).epsilon(0.05));  // within 5%
    }
    for (Eigen::Index l = 1; l < w; ++l) {
        const Eigen::ArrayXd a = scn.deviations.col(l - 1);
        const Eigen::ArrayXd b = scn.deviations.col(l);
        const double ma = a.mean(), mb = b.mean();
        const double cov = ((a - ma) * (b - mb)).sum() / (count - 1);
        const double corr = cov / (std::sqrt((a - ma).square().sum() / (count - 1)) *
                                   std::sqrt((b - mb).square().sum() / (count - 1)));
        CHECK(std::abs(corr - 0.5) < 0.05);
    }
    // law of large numbers: the scenario mean collapses onto the base
    const double grand_mean = scn.deviations.mean();
    CHECK(std::abs(grand_mean) < 3.0 * 0.2 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("scenario_residual sums base, deviation, exchange and dispatch") {
    SUBCASE("all-zero terms pass the base through") {
        const TimeSeries base = flat_base(3, 2.0);
        GpParams params{Eigen::ArrayXd::Zero(3), 0.0};
        const ScenarioSet scn = generate_scenarios(base, params, 4, 9);
        const TimeSeries exchange = flat_base(3, 0.0);
        const Eigen::ArrayXXd dispatch = Eigen::ArrayXXd::Zero(4, 3);
        const Eigen::ArrayXXd residual = scenario_residual(scn, exchange, dispatch);
        CHECK((residual == 2.0).all());
    }
    SUBCASE("hand-evaluated sum") {
        ScenarioSet scn;
        scn.base = TimeSeries((Eigen::ArrayXd(2) << 1.0, 1.0).finished(), 0, 60);
        scn.deviations = Eigen::ArrayXXd::Zero(1, 2);
        scn.probabilities = Eigen::ArrayXd::Constant(1, 1.0);
        const TimeSeries exchange((Eigen::ArrayXd(2) << -1.0, 0.0).finished(), 0, 60);
        const Eigen::ArrayXXd dispatch = Eigen::ArrayXXd::Zero(1, 2);
        const Eigen::ArrayXXd residual = scenario_residual(scn, exchange, dispatch);
        CHECK(residual(0, 0) == doctest::Approx(0.0).scale(1.0));
        CHECK(residual(0, 1) == doctest::Approx(1.0));
    }
    SUBCASE("a loan's exchange legs shift the residual by +q then -q") {
        ScenarioSet scn;
        scn.base = TimeSeries(Eigen::ArrayXd::Zero(3), 0, 60);
        scn.deviations = Eigen::ArrayXXd::Zero(2, 3);
        scn.probabilities = Eigen::ArrayXd::Constant(2, 0.5);
        // q = 1 kWh at t, returned at t + 1, at 60-minute granularity
        const TimeSeries exchange((Eigen::ArrayXd(3) << 1.0, -1.0, 0.0).finished(), 0, 60);
        const Eigen::ArrayXXd dispatch = Eigen::ArrayXXd::Zero(2, 3);
        const Eigen::ArrayXXd residual = scenario_residual(scn, exchange, dispatch);
        CHECK(residual(0, 0) == doctest::Approx(1.0));
        CHECK(residual(0, 1) == doctest::Approx(-1.0));
        CHECK(residual(1, 2) == doctest::Approx(0.0).scale(1.0));
    }
    SUBCASE("dimension mismatches are argument errors") {
        ScenarioSet scn;
        scn.base = TimeSeries(Eigen::ArrayXd::Zero(3), 0, 60);
        scn.deviations = Eigen::ArrayXXd::Zero(2, 3);
        scn.probabilities = Eigen::ArrayXd::Constant(2, 0.5);
        const TimeSeries short_exchange(Eigen::ArrayXd::Zero(2), 0, 60);
        CHECK_THROWS_AS(
            scenario_residual(scn, short_exchange, Eigen::ArrayXXd::Zero(2, 3)), ArgumentError);
        const TimeSeries exchange(Eigen::ArrayXd::Zero(3), 0, 60);
        CHECK_THROWS_AS(scenario_residual(scn, exchange, Eigen::ArrayXXd::Zero(1, 3)),
                        ArgumentError);
    }
}

#include <doctest.h>

#include <random>

#include "recnego/prosumer.hpp"

using namespace recnego;

namespace {

Battery table3_battery() {
    Battery b;
    b.capacity_kwh = 6.8;
    b.soc_kwh = 5.0;
    b.soc_min_frac = 0.2;
    b.soc_max_frac = 0.9;
    b.charge_rate_kw = 1.3;
    b.discharge_rate_kw = 3.3;
    b.eff_charge = 0.9;
    b.eff_discharge = 0.8;
    b.degradation_kwh_per_step = 0.00272;  // 0.04% of 6.8 kWh
    return b;
}

TimeSeries series(std::initializer_list<double> v, int granularity = 60) {
    Eigen::ArrayXd values(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) values[i++] = x;
    return TimeSeries(std::move(values), 0, granularity);
}

}  // namespace

TEST_CASE("battery_step follows the SOC update rule") {
    Battery b = table3_battery();

    SUBCASE("idle step without degradation keeps the SOC") {
        b.degradation_kwh_per_step = 0.0;
        const Battery after = battery_step(b, 0.0, 0.25);
        CHECK(after.soc_kwh == 5.0);
    }
    SUBCASE("charging applies the charge efficiency and degradation") {
        const Battery after = battery_step(b, 1.0, 0.25);
        CHECK(after.soc_kwh == doctest::Approx(5.22228).epsilon(1e-12));
    }
    SUBCASE("discharging divides by the discharge efficiency") {
        b.degradation_kwh_per_step = 0.0;
        const Battery after = battery_step(b, -3.3, 0.25);
        CHECK(after.soc_kwh - b.soc_kwh == doctest::Approx(-1.03125).epsilon(1e-12));
    }
    SUBCASE("a step through the ceiling is rejected with the feasible range") {
        b.soc_kwh = 6.0;  // ceiling at 6.12 kWh
        CHECK_THROWS_AS(battery_step(b, 1.3, 1.0), DispatchError);
        try {
            battery_step(b, 1.3, 1.0);
        } catch (const DispatchError& e) {
            CHECK(e.feasible_max_kw ==
                  doctest::Approx((6.12 - 6.0 + 0.00272) / (0.9 * 1.0)).epsilon(1e-12));
            CHECK(e.feasible_min_kw < 0.0);
        }
    }
    SUBCASE("rate violations are rejected even when the SOC would allow them") {
        CHECK_THROWS_AS(battery_step(b, 2.0, 0.01), DispatchError);
    }
}

TEST_CASE("net_demand subtracts pv from load") {
    CHECK(net_demand(series({1.2}), series({0.5})).values[0] == doctest::Approx(0.7));
    const TimeSeries load = series({0.3, 1.0, 2.5});
    CHECK((net_demand(load, load).values == 0.0).all());
    const TimeSeries b_load = series({0, 1, 0, 0, 2});
    const TimeSeries b_pv = series({2, 0, 1, 1, 0});
    const Eigen::ArrayXd expected = (Eigen::ArrayXd(5) << -2, 1, -1, -1, 2).finished();
    CHECK((net_demand(b_load, b_pv).values == expected).all());
    CHECK_THROWS_AS(net_demand(series({1.0}), series({1.0, 2.0})), ArgumentError);
}

TEST_CASE("naive_dispatch charges surplus and discharges deficit") {
    Battery b = table3_battery();
    b.degradation_kwh_per_step = 0.0;

    SUBCASE("nothing to do on a flat profile") {
        const auto r = naive_dispatch(b, series({0, 0, 0}), series({0, 0, 0}));
        CHECK((r.dispatch.values == 0.0).all());
        CHECK((r.residual.values == 0.0).all());
    }
    SUBCASE("shifts surplus into the following deficit") {
        b.soc_kwh = 6.8 * 0.2;  // empty battery, plenty of headroom
        b.charge_rate_kw = 5.0;
        b.discharge_rate_kw = 5.0;
        const auto r = naive_dispatch(b, series({-2.0, 2.0}), series({0.0, 0.0}));
        CHECK(r.dispatch.values[0] == doctest::Approx(2.0));  // charge from surplus
        CHECK(r.dispatch.values[1] < 0.0);                    // discharge into deficit
        CHECK(r.residual.values.abs().sum() < 4.0);
    }
    SUBCASE("saturated storage leaves surplus untouched") {
        b.soc_kwh = b.soc_max_kwh();
        const auto r = naive_dispatch(b, series({-1.0}), series({0.0}));
        CHECK(r.dispatch.values[0] == 0.0);
        CHECK(r.residual.values[0] == doctest::Approx(-1.0));
    }
}

TEST_CASE("naive_dispatch keeps the SOC window and the residual identity on random series") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> net_draw(-4.0, 4.0);
    std::uniform_real_distribution<double> soc_draw(0.2, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
        Battery b = table3_battery();
        b.soc_kwh = 6.8 * soc_draw(rng);
        const int n = 40;
        Eigen::ArrayXd net(n), ex(n);
        for (int i = 0; i < n; ++i) {
            net[i] = net_draw(rng);
            ex[i] = 0.25 * net_draw(rng);
        }
        const TimeSeries net_ts(net, 0, 15), ex_ts(ex, 0, 15);
        const auto r = naive_dispatch(b, net_ts, ex_ts);
        for (int i = 0; i <= n; ++i) {
            CHECK(r.soc_path[i] >= b.soc_min_kwh() - 1e-9);
            CHECK(r.soc_path[i] <= b.soc_max_kwh() + 1e-9);
        }
        // residual == net + exchange + dispatch, exactly
        CHECK((r.residual.values == (net + ex) + r.dispatch.values).all());
    }
}

TEST_CASE("degradation forces a trickle charge at the SOC floor") {
    Battery b = table3_battery();
    b.soc_kwh = b.soc_min_kwh();
    const auto r = naive_dispatch(b, series({0.0, 0.0, 0.0}, 15), series({0.0, 0.0, 0.0}, 15));
    CHECK((r.dispatch.values > 0.0).all());
    CHECK((r.soc_path >= b.soc_min_kwh() - 1e-9).all());
}

TEST_CASE("apply_contract writes paired loan legs") {
    const LinkParams link{5.0, 1.0};
    ExchangeLedger ledger;

    SUBCASE("a lend-now contract books the export and the return") {
        const auto after = apply_contract(ledger, "B", 0, {1.0, 4}, link);
        REQUIRE(after.entries.size() == 2);
        CHECK(after.entries[0].period == 0);
        CHECK(after.entries[0].energy_kwh == 1.0);
        CHECK(after.entries[1].period == 4);
        CHECK(after.entries[1].energy_kwh == -1.0);
        CHECK(after.total_with("B") == 0.0);
    }
    SUBCASE("a borrow-now contract books the import and the payback") {
        const auto after = apply_contract(ledger, "B", 0, {-0.5, 2}, link);
        REQUIRE(after.entries.size() == 2);
        CHECK(after.entries[0].energy_kwh == -0.5);
        CHECK(after.entries[1].period == 2);
        CHECK(after.entries[1].energy_kwh == 0.5);
    }
    SUBCASE("the no-deal contract is a no-op") {
        const auto after = apply_contract(ledger, "B", 3, {0.0, 7}, link);
        CHECK(after.entries.empty());
    }
    SUBCASE("loans above the link limit are rejected") {
        CHECK_THROWS_AS(apply_contract(ledger, "B", 0, {5.5, 4}, link), ContractError);
        const LinkParams lossy{5.0, 0.5};
        CHECK_THROWS_AS(apply_contract(ledger, "B", 0, {3.0, 4}, lossy), ContractError);
    }
}

TEST_CASE("ledger loan pairs conserve energy per counterparty") {
    const LinkParams link{5.0, 1.0};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> q_draw(-4.0, 4.0);
    std::uniform_int_distribution<int> tau_draw(2, 20);
    ExchangeLedger ledger;
    for (int i = 0; i < 30; ++i) {
        const std::string peer = i % 3 == 0 ? "B" : (i % 3 == 1 ? "C" : "D");
        ledger = apply_contract(ledger, peer, i, {q_draw(rng), tau_draw(rng)}, link);
    }
    CHECK(ledger.total_with("B") == doctest::Approx(0.0).scale(1.0));
    CHECK(ledger.total_with("C") == doctest::Approx(0.0).scale(1.0));
    CHECK(ledger.total_with("D") == doctest::Approx(0.0).scale(1.0));
    // window extraction converts kWh entries to kW
    const Eigen::ArrayXd window = ledger.window_kw(0, 5, 0.25);
    double expected0 = 0.0;
    for (const auto& e : ledger.entries)
        if (e.period == 0) expected0 += e.energy_kwh / 0.25;
    CHECK(window[0] == doctest::Approx(expected0));
}

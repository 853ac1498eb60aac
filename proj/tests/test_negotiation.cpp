#include <doctest.h>

#include <random>

#include "recnego/negotiation.hpp"

using namespace recnego;

namespace {

Battery pinned_battery() {
    Battery b;
    b.capacity_kwh = 1.0;
    b.soc_kwh = 0.5;
    b.soc_min_frac = 0.5;
    b.soc_max_frac = 0.5;
    b.charge_rate_kw = 1.0;
    b.discharge_rate_kw = 1.0;
    b.eff_charge = 1.0;
    b.eff_discharge = 1.0;
    b.degradation_kwh_per_step = 0.0;
    return b;
}

ScenarioSet point_forecast(const Eigen::ArrayXd& net, int granularity = 60, int start = 0) {
    ScenarioSet scn;
    scn.base = TimeSeries(net, start, granularity);
    scn.deviations = Eigen::ArrayXXd::Zero(1, net.size());
    scn.probabilities = Eigen::ArrayXd::Constant(1, 1.0);
    return scn;
}

AgentState toy_agent(const std::string& id, const Eigen::ArrayXd& net, double quantile) {
    return {id,
            TimeSeries(net, 0, 60),
            pinned_battery(),
            ExchangeLedger{},
            LinkParams{1.0, 1.0},
            CriterionWeights{0.0, 1.0},
            quantile,
            std::nullopt};
}

const Eigen::ArrayXd toy_net_a = (Eigen::ArrayXd(5) << 1, 1, -2, 1, -1).finished();
const Eigen::ArrayXd toy_net_b = (Eigen::ArrayXd(5) << -2, 1, -1, -1, 2).finished();

}  // namespace

TEST_CASE("make_offer walks the ordered space down to the aspiration") {
    const NegotiationDomain domain(3, 1.0, 2, 3);
    ContractSpace space{domain, {}, {}, 0};
    space.ordered = {{EnergyContract{-1.0, 2}, -1.0},
                     {EnergyContract{0.0, 2}, -2.0},
                     {EnergyContract{1.0, 3}, -3.0}};

    SUBCASE("the first call yields the globally best contract") {
        const auto offer = make_offer(space, -10.0);
        REQUIRE(offer.has_value());
        CHECK(*offer == EnergyContract{-1.0, 2});
    }
    SUBCASE("successive offers have non-increasing utility until exhaustion") {
        double previous = 1.0;
        int count = 0;
        while (const auto offer = make_offer(space, -10.0)) {
            const double u = space.ordered[space.cursor - 1].second;
            CHECK(u <= previous);
            previous = u;
            ++count;
        }
        CHECK(count == 3);
        CHECK(!make_offer(space, -10.0).has_value());
    }
    SUBCASE("everything below the aspiration means absent on the first call") {
        CHECK(!make_offer(space, -0.5).has_value());
        CHECK(space.cursor == 0);
    }
    SUBCASE("offers at the aspiration are still proposed") {
        CHECK(make_offer(space, -1.0).has_value());
    }
}

TEST_CASE("accept_offer mirrors the offer and requires strictly better than aspiration") {
    const AgentState b = toy_agent("B", toy_net_b, 0.8);
    const ScenarioSet scn = point_forecast(toy_net_b);
    const NegotiationDomain domain(5, 1.0, 2, 4);
    const ContractSpace space = build_contract_space(b, domain, scn);

    // B's value of lending 1 kWh at t0 against a return at t4
    const double top = space.utility_of({1.0, 4});
    CHECK(top == doctest::Approx(-5.0));
    SUBCASE("utility equal to the aspiration is rejected") {
        CHECK(!accept_offer(space, EnergyContract{-1.0, 4}, top));
    }
    SUBCASE("utility above the aspiration is accepted") {
        CHECK(accept_offer(space, EnergyContract{-1.0, 4}, top - 0.25));
    }
    SUBCASE("offers outside the shared domain are protocol errors") {
        CHECK_THROWS_AS(accept_offer(space, EnergyContract{0.3, 4}, -10.0), ProtocolError);
        CHECK_THROWS_AS(accept_offer(space, EnergyContract{1.0, 9}, -10.0), ProtocolError);
    }
}

TEST_CASE("the two-agent lending session ends in the 1 kWh loan returned at t4") {
    AgentState a = toy_agent("A", toy_net_a, 0.5);
    AgentState b = toy_agent("B", toy_net_b, 0.95);
    const ScenarioSet scn_a = point_forecast(toy_net_a);
    const ScenarioSet scn_b = point_forecast(toy_net_b);
    const NegotiationDomain domain(5, 1.0, 2, 4);
    const SessionConfig cfg{5000, 0};

    std::vector<TranscriptRow> transcript;
    const SessionOutcome outcome = negotiate(a, b, cfg, domain, scn_a, scn_b, &transcript);

    REQUIRE(outcome.agreed);
    CHECK(outcome.proposed_by == 1);  // B counter-offers the loan
    CHECK(outcome.agreement->quantity_kwh == doctest::Approx(1.0));
    CHECK(outcome.agreement->return_delay == 4);
    CHECK(outcome.rounds_used == 2);
    // round 1: A's opening offer is rejected by B
    REQUIRE(transcript.size() == 2);
    CHECK(transcript[0].proposer == "A");
    CHECK(transcript[0].response == "reject");
    CHECK(transcript[1].proposer == "B");
    CHECK(transcript[1].response == "accept");
    // the toy agreement happens to be the Nash solution
    CHECK(outcome.nash_distance == doctest::Approx(0.0).scale(1.0));
    CHECK(outcome.utilities.first == doctest::Approx(-4.0));
    CHECK(outcome.utilities.second == doctest::Approx(-5.0));
    // both ledgers hold the paired legs with mirrored signs
    REQUIRE(a.ledger.entries.size() == 2);
    REQUIRE(b.ledger.entries.size() == 2);
    CHECK(a.ledger.entries[0].energy_kwh == doctest::Approx(-1.0));  // A imports at t0
    CHECK(b.ledger.entries[0].energy_kwh == doctest::Approx(1.0));   // B exports at t0
    CHECK(a.ledger.entries[1].period == 4);
}

TEST_CASE("unreachable aspirations fail fast and leave the ledgers untouched") {
    AgentState a = toy_agent("A", toy_net_a, 0.5);
    AgentState b = toy_agent("B", toy_net_b, 0.5);
    a.aspiration_floor = 1.0;  // utilities are never positive
    b.aspiration_floor = 1.0;
    a.ledger = apply_contract(a.ledger, "Z", 1, {0.5, 2}, a.link);
    const ExchangeLedger ledger_before = a.ledger;

    const SessionOutcome outcome =
        negotiate(a, b, SessionConfig{5000, 0}, NegotiationDomain(5, 1.0, 2, 4),
                  point_forecast(toy_net_a), point_forecast(toy_net_b));
    CHECK(!outcome.agreed);
    CHECK(outcome.rounds_used <= 2);
    CHECK(outcome.utilities == outcome.reservations);
    REQUIRE(a.ledger.entries.size() == ledger_before.entries.size());
    for (std::size_t i = 0; i < a.ledger.entries.size(); ++i) {
        CHECK(a.ledger.entries[i].period == ledger_before.entries[i].period);
        CHECK(a.ledger.entries[i].energy_kwh == ledger_before.entries[i].energy_kwh);
    }
    CHECK(b.ledger.entries.empty());
}

TEST_CASE("mirrored agents agree on the shared top contract within two rounds") {
    // B's net is the exact negation of A's: every loan good for one side is
    // equally good mirrored for the other
    const Eigen::ArrayXd net = (Eigen::ArrayXd(6) << 2, -1, -2, 1, 1, -1).finished();
    AgentState a = toy_agent("A", net, 0.8);
    AgentState b = toy_agent("B", -net, 0.8);
    a.link = LinkParams{2.0, 1.0};
    b.link = LinkParams{2.0, 1.0};
    const NegotiationDomain domain(5, 2.0, 2, 5);
    const SessionOutcome outcome = negotiate(a, b, SessionConfig{5000, 0}, domain,
                                             point_forecast(net), point_forecast(-net));
    CHECK(outcome.agreed);
    CHECK(outcome.rounds_used <= 2);
    // the first aspirational offer is the proposer's top contract
    const AgentState fresh_a{"A",
                             TimeSeries(net, 0, 60),
                             pinned_battery(),
                             ExchangeLedger{},
                             a.link,
                             CriterionWeights{0.0, 1.0},
                             0.8,
                             std::nullopt};
    const ContractSpace space = build_contract_space(fresh_a, domain, point_forecast(net));
    CHECK(outcome.agreement->quantity_kwh ==
          doctest::Approx(space.ordered.front().first.quantity_kwh));
}

TEST_CASE("sessions respect protocol invariants across random configurations") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> net_draw(-2.0, 2.0);
    std::uniform_real_distribution<double> quantile_draw(0.3, 1.0);
    std::uniform_int_distribution<int> levels_draw(1, 3);

    for (int trial = 0; trial < 60; ++trial) {
        const int w = 8;
        Eigen::ArrayXd net_a(w), net_b(w);
        for (int l = 0; l < w; ++l) {
            net_a[l] = net_draw(rng);
            net_b[l] = net_draw(rng);
        }
        AgentState a = toy_agent("A", net_a, quantile_draw(rng));
        AgentState b = toy_agent("B", net_b, quantile_draw(rng));
        const NegotiationDomain domain(2 * levels_draw(rng) + 1, 1.0, 2, 2 + levels_draw(rng));
        const int deadline = 40;
        std::vector<TranscriptRow> transcript;
        const SessionOutcome outcome =
            negotiate(a, b, SessionConfig{deadline, 0}, domain, point_forecast(net_a),
                      point_forecast(net_b), &transcript);

        CHECK(outcome.rounds_used <= deadline);
        double prev_a = 0.0, prev_b = 0.0;
        bool first_a = true, first_b = true;
        for (const auto& row : transcript) {
            if (!row.has_offer) continue;
            double& prev = row.proposer == "A" ? prev_a : prev_b;
            bool& first = row.proposer == "A" ? first_a : first_b;
            if (!first) CHECK(row.proposer_utility <= prev);
            prev = row.proposer_utility;
            first = false;
        }
        if (outcome.agreed) {
            // the agreement lies in the intersection of aspiration regions
            const bool a_proposed = outcome.proposed_by == 0;
            const double proposer_u =
                a_proposed ? outcome.utilities.first : outcome.utilities.second;
            const double receiver_u =
                a_proposed ? outcome.utilities.second : outcome.utilities.first;
            const double proposer_asp =
                a_proposed ? outcome.aspirations.first : outcome.aspirations.second;
            const double receiver_asp =
                a_proposed ? outcome.aspirations.second : outcome.aspirations.first;
            CHECK(proposer_u >= proposer_asp);
            CHECK(receiver_u > receiver_asp);
        } else {
            CHECK(outcome.utilities == outcome.reservations);
            CHECK(a.ledger.entries.empty());
            CHECK(b.ledger.entries.empty());
        }
    }
}

TEST_CASE("inconsistent planning views are protocol errors") {
    AgentState a = toy_agent("A", toy_net_a, 0.5);
    AgentState b = toy_agent("B", toy_net_b, 0.5);
    const NegotiationDomain domain(5, 1.0, 2, 4);
    ScenarioSet shifted = point_forecast(toy_net_b, 60, 3);
    CHECK_THROWS_AS(
        negotiate(a, b, SessionConfig{100, 0}, domain, point_forecast(toy_net_a), shifted),
        ProtocolError);
}

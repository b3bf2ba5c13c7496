#include <doctest.h>

#include <cmath>

#include "ratebound/errors.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rates.hpp"
#include "ratebound/verify/oracles.hpp"

using namespace ratebound;

namespace {

SignalModel three_state_clone() {
    // (f,g) and (f,h) both induce the p = 0.75 binary LLR law.
    return SignalModel::finite_iid(StateSpace::uniform({"f", "g", "h"}), {"a", "b", "c", "d"},
                                   {{0.5, 0.25, 0.125, 0.125},
                                    {1.0 / 6, 1.0 / 12, 3.0 / 8, 3.0 / 8},
                                    {1.0 / 6, 3.0 / 4, 1.0 / 24, 1.0 / 24}},
                                   1);
}

}  // namespace

TEST_CASE("autarky rate golden values") {
    CHECK(autarky_rate(SignalModel::binary_symmetric(0.75, 1), 0) ==
          doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(autarky_rate(SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1),
                       0) == doctest::Approx(0.125).epsilon(1e-12));
    const auto clone = three_state_clone();
    REQUIRE(validate(clone).ok());
    CHECK(PairKernel(clone, 0, 0, 1).legendre(0.0).value == doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(PairKernel(clone, 0, 0, 2).legendre(0.0).value == doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(autarky_rate(clone, 0) == doctest::Approx(0.143841).epsilon(1e-6));
}

TEST_CASE("bounded rate golden values") {
    const auto r = bounded_rate(SignalModel::binary_symmetric(0.75, 3));
    CHECK(r.value == doctest::Approx(0.549306).epsilon(1e-6));
    CHECK(r.pair == StatePair{0, 1});
    CHECK(r.agent == 0);
    for (int i = 0; i < 50; ++i) {
        const double p = 0.51 + 0.48 * i / 49.0;
        CHECK(std::abs(bounded_rate(SignalModel::binary_symmetric(p, 1)).value -
                       (2 * p - 1) * std::log(p / (1 - p))) <= 1e-12);
    }
    CHECK(bounded_rate(SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 2))
              .value == doctest::Approx(0.5));
}

TEST_CASE("min-max arithmetic on a heterogeneous table") {
    // Rows follow ordered_pairs(2) = (f,g), (g,f); columns are agents.
    REQUIRE(ordered_pairs(2) == std::vector<StatePair>{{0, 1}, {1, 0}});
    const auto mm = min_over_pairs_max_over_agents(2, {{0.3, 0.7}, {0.4, 0.5}});
    CHECK(mm.value == 0.5);
    CHECK(mm.pair == StatePair{1, 0});
    CHECK(mm.agent == 1);
    const auto tie = min_over_pairs_max_over_agents(2, {{0.5, 0.5}, {0.5, 0.2}});
    CHECK(tie.pair == StatePair{0, 1});
    CHECK(tie.agent == 0);
}

TEST_CASE("heterogeneous model takes the max over agents") {
    const auto states = StateSpace::uniform({"f", "g"});
    const auto m = SignalModel::finite(states, {"a", "b"},
                                       {{{0.6, 0.4}, {0.4, 0.6}}, {{0.9, 0.1}, {0.1, 0.9}}});
    const auto r = bounded_rate(m);
    CHECK(r.value == doctest::Approx(0.8 * std::log(9.0)).epsilon(1e-12));
    CHECK(r.agent == 1);
    CHECK(autarky_rate(m, 1) < r.value);
}

TEST_CASE("weak bounded rate") {
    CHECK(*weak_bounded_rate(SignalModel::binary_symmetric(0.75, 1)) ==
          doctest::Approx(2 * std::log(3.0)).epsilon(1e-12));
    CHECK_FALSE(weak_bounded_rate(
                    SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1))
                    .has_value());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = oracle::random_finite_model(seed, 4, 5, 3);
        REQUIRE(*weak_bounded_rate(m) >= 2 * bounded_rate(m).value);
    }
}

TEST_CASE("neighborhood bounded rate") {
    const auto m4 = SignalModel::binary_symmetric(0.75, 4);
    const auto c = neighborhood_bounded_rate(m4, Network::complete(4));
    CHECK(c.exact == doctest::Approx(4 * 0.5493061443340548).epsilon(1e-12));
    CHECK(c.delta_bound == doctest::Approx(c.exact));
    const auto m5 = SignalModel::binary_symmetric(0.75, 5);
    const auto cyc = neighborhood_bounded_rate(m5, Network::directed_cycle(5));
    CHECK(cyc.exact == doctest::Approx(2 * 0.5493061443340548).epsilon(1e-12));
    CHECK(Network::directed_cycle(5).max_neighborhood() == 2);
    const auto star = neighborhood_bounded_rate(m5, Network::star(5));
    CHECK(star.exact == doctest::Approx(star.delta_bound));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = oracle::random_finite_model(seed, 3, 4, 6);
        const auto nb = neighborhood_bounded_rate(m, Network::erdos_renyi_strongly_connected(6, 0.3, seed));
        CHECK(nb.exact <= nb.delta_bound + 1e-12);
    }
    auto corr = m4;
    corr.set_correlated(true);
    CHECK_THROWS_AS(neighborhood_bounded_rate(corr, Network::complete(4)), UnsupportedError);
}

TEST_CASE("coordination threshold") {
    const auto m = SignalModel::binary_symmetric(0.75, 1);
    const auto atoms = oracle::llr_atoms(m, 0, 0, 1);
    const double md = 0.5493061443340548 - 0.05;
    const double expected =
        std::ceil(2 * oracle::grid_conjugate(atoms, -md) / oracle::grid_conjugate(atoms, md));
    CHECK(coordination_threshold(m, 0.05) == static_cast<std::int64_t>(expected));
    CHECK(coordinated_rate(m, 0.05) == doctest::Approx(oracle::grid_conjugate(atoms, -md)).epsilon(1e-6));
    // The denominator lambda*(m - delta) vanishes as delta -> 0, so the threshold
    // diverges there; as delta -> m it tends to 2 lambda*(0) / lambda*(0) = 2.
    CHECK(coordination_threshold(m, 1e-3) > 100 * coordination_threshold(m, 0.05));
    CHECK(coordination_threshold(m, 1e-4) > 50 * coordination_threshold(m, 1e-3));
    CHECK(coordination_threshold(m, 0.549) <= 3);
    CHECK_THROWS_AS(coordination_threshold(m, 0.5493061443340548), DomainError);
    CHECK_THROWS_AS(coordination_threshold(m, 0.0), DomainError);
    CHECK_THROWS_AS(coordination_threshold(m, 0.7), DomainError);
}

TEST_CASE("default delta") {
    CHECK(default_delta(SignalModel::binary_symmetric(0.75, 1)) ==
          doctest::Approx(0.05493061443340548));
}

TEST_CASE("binary symmetric sweep") {
    const auto rows = sweep_figure1({0.75});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].q == 0.75);
    CHECK(rows[0].raut == doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(rows[0].rmaj == doctest::Approx(0.549306).epsilon(1e-6));
    const auto near_half = sweep_figure1({0.5 + 1e-6});
    CHECK(near_half[0].raut < 1e-10);
    CHECK(near_half[0].rmaj < 1e-10);
    const auto grid = sweep_figure1(linear_grid(0.51, 0.99, 200));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i].rmaj > grid[i - 1].rmaj);
    CHECK(sweep_figure1({}).empty());
}

TEST_CASE("linear grid") {
    CHECK(linear_grid(0.6, 0.9, 1) == std::vector<double>{0.6});
    const auto g = linear_grid(0.51, 0.99, 200);
    CHECK(g.size() == 200);
    CHECK(g.front() == 0.51);
    CHECK(g.back() == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(linear_grid(0.5, 0.9, 0).empty());
}

TEST_CASE("bounded rate is invariant under relabelling") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = oracle::random_finite_model(seed, 4, 4, 3);
        auto pmf = m.pmf_table();
        std::reverse(pmf.begin(), pmf.end());
        for (auto& agent : pmf) std::reverse(agent.begin(), agent.end());
        auto labels = m.states().labels;
        std::reverse(labels.begin(), labels.end());
        const auto swapped = SignalModel::finite(StateSpace::uniform(labels), m.support(), pmf);
        CHECK(bounded_rate(swapped).value == doctest::Approx(bounded_rate(m).value).epsilon(1e-12));
    }
}

TEST_CASE("strict gap between autarky and bounded rate") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto m = oracle::random_finite_model(seed, 4, 5, 3);
        const auto r = bounded_rate(m);
        CHECK(autarky_rate(m, r.agent) < r.value);
        const auto report = rate_report(m);
        CHECK(report.r_bdd == r.value);
        CHECK(report.argmax_agent == r.agent);
    }
}

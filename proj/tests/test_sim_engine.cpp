#include <doctest.h>

#include <cmath>

#include "ratebound/errors.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rates.hpp"
#include "ratebound/sim_engine.hpp"
#include "ratebound/verify/oracles.hpp"

using namespace ratebound;

namespace {

SimConfig make_config(std::size_t n, const StrategySpec& spec, std::size_t horizon, std::uint64_t reps,
                      std::uint64_t seed = 1, std::vector<double> prior = {}) {
    SimConfig c;
    c.model = SignalModel::binary_symmetric(0.75, n, std::move(prior));
    c.network = Network::complete(n);
    c.profile = StrategyProfile::uniform(spec, n);
    c.horizon = horizon;
    c.replications = reps;
    c.seed = seed;
    return c;
}

bool within_3se(const MistakeCurve& mc, std::size_t agent, std::size_t t, double exact) {
    return std::abs(mc.estimate(agent, t) - exact) <= 3.0 * mc.standard_error(agent, t) + 1e-12;
}

}  // namespace

TEST_CASE("all-correct signals give zero autarky mistakes") {
    const Simulator sim(make_config(1, AutarkyMl{}, 15, 1));
    for (StateIndex state = 0; state < 2; ++state) {
        const auto tr = sim.run(state, [&](std::size_t, std::size_t) { return CellDraw{state, 0.0}; });
        for (std::size_t t = 0; t < 15; ++t) CHECK_FALSE(tr.mistakes[t][0]);
    }
}

TEST_CASE("trajectories and curves are deterministic") {
    const auto config = make_config(5, CoordinationComplete{0.05}, 12, 5000, 77);
    CHECK(run_trajectory(config, 1, 42) == run_trajectory(config, 1, 42));
    CHECK(run_trajectory(config, 1, 42) != run_trajectory(config, 1, 43));
    const Simulator sim(config);
    const auto a = sim.mistake_curve(1), b = sim.mistake_curve(4);
    for (StateIndex s = 0; s < 2; ++s)
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t t = 1; t <= 12; ++t) REQUIRE(a.mistakes(s, i, t) == b.mistakes(s, i, t));
}

TEST_CASE("invalid configurations are rejected before running") {
    CHECK_FALSE(config_violations(make_config(2, AutarkyMl{}, 5, 0)).empty());
    CHECK_FALSE(config_violations(make_config(2, AutarkyMl{}, 0, 10)).empty());
    auto bad = make_config(3, CoordinationComplete{0.05}, 5, 10);
    bad.network = Network::directed_cycle(3);
    CHECK_FALSE(config_violations(bad).empty());
    CHECK_THROWS_AS(Simulator{bad}, ConfigError);
    CHECK(config_violations(make_config(3, AutarkyMl{}, 5, 10)).empty());
}

TEST_CASE("exact autarky curve golden values") {
    const auto curve = exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1), 12);
    CHECK(curve.exact());
    CHECK(curve.estimate(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(curve.estimate(0, 2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(curve.estimate(0, 3) == doctest::Approx(0.15625).epsilon(1e-14));
    for (int t = 1; t <= 12; ++t)
        CHECK(std::abs(curve.estimate(0, t) - oracle::autarky_mistake_bruteforce(0.75, t)) <= 1e-12);
    CHECK_THROWS_AS(exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1, {0.6, 0.4}), 3),
                    UnsupportedError);
}

TEST_CASE("enumeration matches the binomial curve") {
    const auto exact = exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1), 12);
    const auto brute = enumerate_exact(make_config(1, AutarkyMl{}, 12, 1));
    for (std::size_t t = 1; t <= 12; ++t) CHECK(std::abs(brute.estimate(0, t) - exact.estimate(0, t)) <= 1e-12);
    CHECK(enumerate_exact(make_config(1, AutarkyMl{}, 1, 1)).estimate(0, 1) == doctest::Approx(0.25));
    CHECK_THROWS_AS(enumerate_exact(make_config(3, AutarkyMl{}, 8, 1)), SizeError);
}

TEST_CASE("engine enumeration matches the independent coordination oracle") {
    for (auto [n, horizon] : {std::pair<std::size_t, std::size_t>{3, 2}, {2, 3}, {2, 6}}) {
        const auto engine = enumerate_exact(make_config(n, CoordinationComplete{0.05}, horizon, 1));
        const auto oracle_probs = oracle::coordination_bruteforce(0.75, n, horizon, 0.05);
        for (StateIndex s = 0; s < 2; ++s)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t t = 1; t <= horizon; ++t)
                    CHECK(std::abs(engine.estimate(s, i, t) - oracle_probs[s][i][t - 1]) <= 1e-12);
    }
}

TEST_CASE("autarky Monte Carlo agrees with exact values") {
    const auto mc = mistake_curve(make_config(1, AutarkyMl{}, 3, 100000, 5));
    CHECK(within_3se(mc, 0, 1, 0.25));
    CHECK(within_3se(mc, 0, 3, 0.15625));
    CHECK(mc.standard_error(0, 1) > 0.0);
}

TEST_CASE("coordination Monte Carlo agrees with enumeration on n=2, T=3") {
    const auto config = make_config(2, CoordinationComplete{0.05}, 3, 100000, 6);
    const auto exact = enumerate_exact(config);
    const auto mc = mistake_curve(config);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t t = 1; t <= 3; ++t) CHECK(within_3se(mc, i, t, exact.estimate(i, t)));
}

TEST_CASE("prior mixing weights the per-state curves") {
    const auto mc = mistake_curve(make_config(2, AutarkyMl{}, 4, 2000, 3, {0.8, 0.2}));
    for (std::size_t t = 1; t <= 4; ++t)
        CHECK(mc.estimate(1, t) == doctest::Approx(0.8 * mc.estimate(0, 1, t) + 0.2 * mc.estimate(1, 1, t)));
    CHECK(mc.agent_average(2) == doctest::Approx(0.5 * (mc.estimate(0, 2) + mc.estimate(1, 2))));
    CHECK(mc.total_mistakes(0, 1) == mc.mistakes(0, 0, 1) + mc.mistakes(1, 0, 1));
}

TEST_CASE("log-linear fit recovers a synthetic rate") {
    std::vector<std::size_t> periods;
    std::vector<double> probs;
    for (std::size_t t = 1; t <= 30; ++t) {
        periods.push_back(t);
        probs.push_back(0.3 * std::exp(-0.4 * static_cast<double>(t)));
    }
    const auto fit = fit_log_linear(periods, probs);
    CHECK(fit.usable);
    CHECK(std::abs(fit.rate - 0.4) <= 1e-12);

    MistakeCurve curve(Provenance::Synthetic, 1, 30, {1.0}, 1);
    for (std::size_t t = 1; t <= 30; ++t) curve.probability(0, 0, t) = probs[t - 1];
    CHECK(std::abs(fit_rate(curve, 0, 5, 30).rate - 0.4) <= 1e-12);
}

TEST_CASE("fits need enough mistakes") {
    MistakeCurve zero(Provenance::MonteCarlo, 1, 10, {0.5, 0.5}, 1000);
    CHECK_FALSE(fit_rate(zero, 0, 1, 10).usable);
    MistakeCurve sparse(Provenance::MonteCarlo, 1, 10, {0.5, 0.5}, 1000);
    for (std::size_t t = 1; t <= 10; ++t) sparse.mistakes(0, 0, t) = 19;
    CHECK_FALSE(fit_rate(sparse, 0, 1, 10).usable);
    sparse.mistakes(0, 0, 1) = 40;
    sparse.mistakes(0, 0, 2) = 30;
    sparse.mistakes(0, 0, 3) = 20;
    const auto fit = fit_rate(sparse, 0, 1, 10);
    CHECK(fit.usable);
    CHECK(fit.points == 3);
}

TEST_CASE("exact autarky fit lands near the autarky rate") {
    const auto curve = exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1), 120);
    const auto fit = fit_rate(curve, 0, 40, 120);
    const double r = autarky_rate(SignalModel::binary_symmetric(0.75, 1), 0);
    CHECK(fit.usable);
    CHECK(std::abs(fit.rate - r) <= 0.1 * r);
}

TEST_CASE("odd-even example") {
    const std::size_t n = 10;
    const auto config = make_config(n, OddEven{}, 6, 100000, 12);
    const auto mc = mistake_curve(config);
    const auto model1 = SignalModel::binary_symmetric(0.75, 1);
    // Even agents at t act on 5(t-1) odd-agent signals, i.e. autarky with 5(t-1) draws.
    const auto autarky = exact_autarky_curve(model1, 5 * 40);
    for (std::size_t t = 2; t <= 6; ++t) {
        CHECK(within_3se(mc, 1, t, autarky.estimate(0, 5 * (t - 1))));
        CHECK(within_3se(mc, 0, t, 0.25));
    }
    std::vector<std::size_t> periods;
    std::vector<double> probs;
    for (std::size_t t = 10; t <= 40; ++t) {
        periods.push_back(t);
        probs.push_back(autarky.estimate(0, 5 * (t - 1)));
    }
    const double target = 5.0 * autarky_rate(model1, 0);
    CHECK(std::abs(fit_log_linear(periods, probs).rate - target) <= 0.1 * target);
}

TEST_CASE("constant action has no mistakes in its state") {
    const auto mc = mistake_curve(make_config(3, ConstantAction{1}, 5, 100));
    for (std::size_t t = 1; t <= 5; ++t) {
        CHECK(mc.mistakes(1, 0, t) == 0);
        CHECK(mc.mistakes(0, 0, t) == 100);
        CHECK(mc.estimate(0, t) == doctest::Approx(0.5));
    }
}

TEST_CASE("gaussian models simulate") {
    SimConfig c;
    c.model = SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 3);
    c.network = Network::directed_cycle(3);
    c.profile = StrategyProfile::uniform(CoordinationConnected{0.05}, 3);
    c.horizon = 8;
    c.replications = 20000;
    const auto mc = mistake_curve(c);
    // Autarky with one observation errs with probability Phi(-1/2).
    const auto autarky = SimConfig{c.model, Network::complete(3), StrategyProfile::uniform(AutarkyMl{}, 3), 1,
                                   20000, 0};
    const auto single = mistake_curve(autarky);
    CHECK(within_3se(single, 0, 1, 0.5 * std::erfc(0.5 / std::sqrt(2.0))));
    CHECK(mc.estimate(0, 8) < 0.5);
    CHECK_THROWS_AS(enumerate_exact(c), UnsupportedError);
}

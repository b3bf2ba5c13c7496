#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "ratebound/errors.hpp"
#include "ratebound/rng.hpp"
#include "ratebound/signal_models.hpp"
#include "ratebound/verify/oracles.hpp"

using namespace ratebound;

namespace {

bool has_violation(const SignalModel& m, const std::string& needle) {
    for (const auto& v : validate(m).violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("binary symmetric llr values") {
    const auto m = SignalModel::binary_symmetric(0.75, 2);
    CHECK(validate(m).ok());
    CHECK(llr(m, 0, 0, 1, std::size_t{0}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(llr(m, 1, 0, 1, std::size_t{1}) == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
    CHECK(m.support() == std::vector<std::string>{"s_f", "s_g"});
    CHECK(m.states().labels == std::vector<std::string>{"f", "g"});
}

TEST_CASE("gaussian llr at the midpoint is zero") {
    const auto m = SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1);
    CHECK(validate(m).ok());
    CHECK(std::abs(llr(m, 0, 0, 1, 0.5)) < 1e-15);
    CHECK(llr(m, 0, 0, 1, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("llr antisymmetry on random inputs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto m = oracle::random_finite_model(seed, 4, 5, 2);
        CounterStream rng(seed);
        for (int k = 0; k < 5; ++k) {
            const auto f = static_cast<StateIndex>(rng.uniform_int(0, m.num_states() - 1));
            auto g = static_cast<StateIndex>(rng.uniform_int(0, m.num_states() - 1));
            if (g == f) g = (f + 1) % m.num_states();
            const auto s = static_cast<std::size_t>(rng.uniform_int(0, m.support_size() - 1));
            const auto agent = static_cast<std::size_t>(rng.uniform_int(0, 1));
            REQUIRE(llr(m, agent, f, g, s) + llr(m, agent, g, f, s) == 0.0);
        }
    }
    const auto gm = SignalModel::gaussian_iid(StateSpace::uniform({"a", "b", "c"}), {0.3, -1.0, 2.0},
                                              0.7, 1);
    CounterStream rng(99);
    for (int k = 0; k < 1000; ++k) {
        const double s = -5.0 + 10.0 * rng.uniform();
        REQUIRE(llr(gm, 0, 2, 0, s) + llr(gm, 0, 0, 2, s) == 0.0);
    }
}

TEST_CASE("density ratio integrates to one") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto m = oracle::random_finite_model(seed);
        for (StateIndex f = 0; f < m.num_states(); ++f)
            for (StateIndex g = 0; g < m.num_states(); ++g) {
                if (f == g) continue;
                double total = 0.0;
                for (std::size_t s = 0; s < m.support_size(); ++s)
                    total += m.pmf(0, g, s) * std::exp(llr(m, 0, f, g, s));
                CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
    // Gaussian: trapezoid over [-12, 12] under g.
    const auto gm = SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1);
    double total = 0.0;
    const double h = 1e-3;
    for (double s = -12.0; s <= 12.0; s += h)
        total += h * std::exp(-0.5 * s * s) / std::sqrt(2.0 * M_PI) * std::exp(llr(gm, 0, 0, 1, s));
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("llr errors") {
    const auto m = SignalModel::binary_symmetric(0.75, 1);
    CHECK_THROWS_AS(llr(m, 0, 0, 0, std::size_t{0}), InvalidPairError);
    CHECK_THROWS_AS(llr(m, 0, 0, 2, std::size_t{0}), InvalidPairError);
    CHECK_THROWS_AS(llr(m, 0, 0, 1, std::size_t{2}), InvalidSignalError);
    CHECK_THROWS_AS(llr(m, 0, 0, 1, 0.5), InvalidSignalError);
}

TEST_CASE("validation messages") {
    CHECK(has_violation(SignalModel::binary_symmetric(0.5, 1), "p must lie in (1/2,1)"));
    CHECK(has_violation(SignalModel::binary_symmetric(1.2, 1), "p must lie in (1/2,1)"));
    const auto states = StateSpace::uniform({"f", "g"});
    CHECK(has_violation(SignalModel::finite_iid(states, {"a", "b"}, {{1.0, 0.0}, {0.5, 0.5}}, 1),
                        "supports differ: absolute continuity fails"));
    CHECK(has_violation(SignalModel::finite_iid(states, {"a", "b"}, {{0.4, 0.6}, {0.4, 0.6}}, 1),
                        "LLR identically zero"));
    CHECK(has_violation(SignalModel::gaussian(states, {{1.0, 0.0}}, {1.0, 2.0}), "unequal variances"));
    CHECK(has_violation(SignalModel::binary_symmetric(0.75, 1, {0.7, 0.2}), "prior"));
    CHECK_THROWS_AS(require_admissible(SignalModel::binary_symmetric(0.5, 1)), ConfigError);
}

TEST_CASE("binary symmetric sampling frequency") {
    const auto m = SignalModel::binary_symmetric(0.75, 1);
    const SignalSampler sampler(m);
    const int draws = 1000000;
    int matches = 0;
    for (int r = 0; r < draws; ++r) matches += sampler.draw(0, 0, 17, r, 1).label == 0 ? 1 : 0;
    const double freq = static_cast<double>(matches) / draws;
    CHECK(std::abs(freq - 0.75) <= 3.0 * std::sqrt(0.75 * 0.25 / draws));
}

TEST_CASE("gaussian sampling mean") {
    const auto m = SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1);
    const SignalSampler sampler(m);
    double sum = 0.0;
    const int draws = 1000000;
    for (int r = 0; r < draws; ++r) sum += sampler.draw(1, 0, 5, r, 1).value;
    CHECK(std::abs(sum / draws) < 0.004);
}

TEST_CASE("sample_profile is independent of the worker count") {
    const auto m = SignalModel::binary_symmetric(0.7, 9);
    ::setenv("RATEBOUND_THREADS", "1", 1);
    const auto a = sample_profile(m, 1, 25, 123);
    ::setenv("RATEBOUND_THREADS", "4", 1);
    const auto b = sample_profile(m, 1, 25, 123);
    ::unsetenv("RATEBOUND_THREADS");
    REQUIRE(a.size() == 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() == 25);
        for (std::size_t t = 0; t < a[i].size(); ++t) {
            CHECK(a[i][t].agent == i);
            CHECK(a[i][t].period == t + 1);
            CHECK(a[i][t].value == b[i][t].value);
        }
    }
}

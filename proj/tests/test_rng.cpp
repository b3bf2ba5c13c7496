#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <vector>

#include "ratebound/rng.hpp"

using namespace ratebound;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draw cells are distinct across every key component") {
    const DrawKey base{7, 0, 3, 2, 5};
    const auto ref = draw_bits(base);
    auto differs = [&](DrawKey k) { return draw_bits(k) != ref; };
    DrawKey k = base;
    k.seed = 8;
    CHECK(differs(k));
    k = base;
    k.state = 1;
    CHECK(differs(k));
    k = base;
    k.replication = 4;
    CHECK(differs(k));
    k = base;
    k.replication = 3 + (std::uint64_t{1} << 32);
    CHECK(differs(k));
    k = base;
    k.agent = 1;
    CHECK(differs(k));
    k = base;
    k.period = 6;
    CHECK(differs(k));
    CHECK(draw_bits(base) == ref);
}

TEST_CASE("unit conversion stays in [0,1)") {
    CHECK(to_unit(0, 0) == 0.0);
    CHECK(to_unit(0xffffffffu, 0xffffffffu) < 1.0);
    CounterStream s(11);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_int covers the closed range") {
    CounterStream s(3, 1);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 5000; ++i) {
        const auto v = s.uniform_int(3, 7);
        REQUIRE(v >= 3);
        REQUIRE(v <= 7);
        ++hits[static_cast<std::size_t>(v - 3)];
    }
    for (int h : hits) CHECK(h > 800);
}

TEST_CASE("worker count honours RATEBOUND_THREADS") {
    ::setenv("RATEBOUND_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    ::setenv("RATEBOUND_THREADS", "0", 1);
    CHECK(worker_count() >= 1);
    ::unsetenv("RATEBOUND_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("parallel_for visits every chunk once and rethrows") {
    for (std::size_t workers : {1u, 2u, 5u}) {
        std::vector<std::atomic<int>> seen(37);
        parallel_for(seen.size(), workers, [&](std::size_t c) { ++seen[c]; });
        for (auto& s : seen) CHECK(s.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t c) {
                                     if (c == 4) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

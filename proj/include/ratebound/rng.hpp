// Counter-based random numbers (Philox4x32-10) and a deterministic
// parallel-for helper.
//
// Every draw in the library is a pure function of (key, counter), so results
// never depend on evaluation order or on the number of worker threads.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace ratebound {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = round_once(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter round_once(const Counter& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// Identifies the 128 random bits used for one (state, replication, agent,
// period) cell under a base seed.
struct DrawKey {
    std::uint64_t seed = 0;
    std::uint32_t state = 0;
    std::uint64_t replication = 0;
    std::uint32_t agent = 0;
    std::uint32_t period = 0;
};

inline Philox4x32::Counter draw_bits(const DrawKey& k) {
    const Philox4x32::Counter ctr{
        k.period, k.agent, static_cast<std::uint32_t>(k.replication),
        static_cast<std::uint32_t>(k.replication >> 32) ^ (k.state << 24)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(k.seed),
                              static_cast<std::uint32_t>(k.seed >> 32)};
    return Philox4x32::generate(ctr, key);
}

// Uniform in [0,1) with 53 random bits from two words.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        (std::uint64_t{hi} << 21) ^ (std::uint64_t{lo} >> 11);
    return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) *
           0x1.0p-53;
}

// Standard normal via Box-Muller on the four words of one Philox block.
inline double to_standard_normal(const Philox4x32::Counter& w) {
    const double u1 = 1.0 - to_unit(w[0], w[1]);  // (0,1]
    const double u2 = to_unit(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Stand-alone sequential stream for generators (graphs, test inputs).
class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed, std::uint32_t stream = 0)
        : seed_(seed), stream_(stream) {}

    double uniform() {
        const auto w = Philox4x32::generate(
            {static_cast<std::uint32_t>(index_),
             static_cast<std::uint32_t>(index_ >> 32), stream_, 0x5eedu},
            {static_cast<std::uint32_t>(seed_),
             static_cast<std::uint32_t>(seed_ >> 32)});
        ++index_;
        return to_unit(w[0], w[1]);
    }

    // Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const double span = static_cast<double>(hi - lo + 1);
        auto v = lo + static_cast<std::int64_t>(uniform() * span);
        return v > hi ? hi : v;
    }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t index_ = 0;
};

// Worker count: RATEBOUND_THREADS if set and positive, otherwise hardware
// concurrency.
std::size_t worker_count();

// Runs task(chunk) for every chunk in [0, chunks) on up to `workers` threads.
// Tasks must write to disjoint outputs; callers merge in chunk order.
void parallel_for(std::size_t chunks, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace ratebound

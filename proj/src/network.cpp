#include "ratebound/network.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "ratebound/errors.hpp"
#include "ratebound/rng.hpp"

namespace ratebound {

Network::Network(std::vector<std::vector<std::size_t>> neighborhoods)
    : neighborhoods_(std::move(neighborhoods)) {
    const auto n = neighborhoods_.size();
    adjacency_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& nb = neighborhoods_[i];
        for (auto j : nb)
            if (j >= n)
                throw DomainError("network: neighbor index " + std::to_string(j) +
                                  " out of range for agent " + std::to_string(i));
        nb.push_back(i);
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        for (auto j : nb) adjacency_[i * n + j] = 1;
    }
}

Network Network::complete(std::size_t n) {
    std::vector<std::vector<std::size_t>> nb(n);
    for (auto& row : nb)
        for (std::size_t j = 0; j < n; ++j) row.push_back(j);
    return Network(std::move(nb));
}

Network Network::directed_cycle(std::size_t n) {
    std::vector<std::vector<std::size_t>> nb(n);
    for (std::size_t i = 0; i < n; ++i) nb[i] = {i, (i + 1) % n};
    return Network(std::move(nb));
}

Network Network::star(std::size_t n) {
    std::vector<std::vector<std::size_t>> nb(n);
    for (std::size_t i = 0; i < n; ++i) {
        nb[0].push_back(i);
        if (i != 0) nb[i] = {0};
    }
    return Network(std::move(nb));
}

Network Network::erdos_renyi_strongly_connected(std::size_t n, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("erdos_renyi: p must lie in (0,1]");
    for (std::uint32_t attempt = 0;; ++attempt) {
        CounterStream rng(seed, attempt);
        std::vector<std::vector<std::size_t>> nb(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && rng.uniform() < p) nb[i].push_back(j);
        Network net(std::move(nb));
        if (is_strongly_connected(net)) return net;
        if (attempt > 1'000'000) throw DomainError("erdos_renyi: no strongly connected sample");
    }
}

bool Network::is_complete() const {
    for (std::size_t i = 0; i < size(); ++i)
        if (!observes_everyone(i)) return false;
    return true;
}

std::size_t Network::max_neighborhood() const {
    std::size_t best = 0;
    for (const auto& nb : neighborhoods_) best = std::max(best, nb.size());
    return best;
}

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Walking observer -> observed from `from` yields d(from, j) for every j.
std::vector<std::size_t> bfs_from(const Network& net, std::size_t from) {
    std::vector<std::size_t> dist(net.size(), kUnreached);
    std::deque<std::size_t> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
        const auto i = queue.front();
        queue.pop_front();
        for (auto j : net.neighborhood(i))
            if (dist[j] == kUnreached) {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
    }
    return dist;
}

}  // namespace

bool is_strongly_connected(const Network& net) {
    if (net.size() == 0) return false;
    const auto forward = bfs_from(net, 0);
    if (std::find(forward.begin(), forward.end(), kUnreached) != forward.end()) return false;
    // Reverse reachability: everyone must reach agent 0.
    std::vector<std::vector<std::size_t>> reversed(net.size());
    for (std::size_t i = 0; i < net.size(); ++i)
        for (auto j : net.neighborhood(i)) reversed[j].push_back(i);
    const auto backward = bfs_from(Network(std::move(reversed)), 0);
    return std::find(backward.begin(), backward.end(), kUnreached) == backward.end();
}

std::vector<std::vector<std::size_t>> distances(const Network& net) {
    std::vector<std::vector<std::size_t>> d;
    d.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        d.push_back(bfs_from(net, i));
        for (std::size_t j = 0; j < net.size(); ++j)
            if (d.back()[j] == kUnreached)
                throw NotStronglyConnectedError("distances: agent " + std::to_string(j) +
                                                " unreachable from agent " + std::to_string(i));
    }
    return d;
}

PropagationSchedule build_schedule(const Network& net) {
    if (!is_strongly_connected(net))
        throw NotStronglyConnectedError("build_schedule: network is not strongly connected");
    const auto n = net.size();
    const auto d = distances(net);
    PropagationSchedule s;
    s.n_ = n;
    s.block_ = n >= 3 ? 1 + n * (n - 2) : 1;

    // Offset at which agents at distance `dist` (>= 1) from j display j's
    // action: j1 + (dist-1) n with j1 = j+1.
    const auto imitation_offset = [n](std::size_t j, std::size_t dist) {
        return (j + 1) + (dist - 1) * n;
    };
    // Lowest-indexed observed agent one hop closer to j.
    const auto carrier = [&](std::size_t i, std::size_t j) -> KnowledgeSource {
        const auto dij = d[i][j];
        if (dij == 0) return {i, 0};
        if (dij == 1) return {j, 0};
        for (auto c : net.neighborhood(i))
            if (c != i && d[c][j] + 1 == dij) return {c, imitation_offset(j, d[c][j])};
        throw ScheduleIntegrityError("build_schedule: no carrier found");
    };

    if (s.block_ > 1) {
        s.directives_.resize((s.block_ - 1) * n);
        for (std::size_t k = 0; k + 3 <= n; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                const auto offset = imitation_offset(j, k + 1);
                for (std::size_t i = 0; i < n; ++i) {
                    auto& dir = s.directives_[(offset - 1) * n + i];
                    if (d[i][j] == k + 1) {
                        const auto src = carrier(i, j);
                        dir = {Directive::Kind::Imitate, j, src.agent, src.offset};
                    } else {
                        dir = {Directive::Kind::Repeat, i, i, 0};
                    }
                }
            }
    }
    s.sources_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.sources_[i * n + j] = carrier(i, j);
    return s;
}

std::vector<std::vector<bool>> replay_knowledge(const Network& net,
                                                const PropagationSchedule& schedule) {
    const auto n = net.size();
    const auto block = schedule.block_length();
    // display[o][i]: whose voting action agent i shows at offset o.
    std::vector<std::vector<std::size_t>> display(block, std::vector<std::size_t>(n));
    std::vector<std::vector<bool>> known(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) display[0][i] = i;
    const auto absorb = [&](std::size_t o) {
        for (std::size_t i = 0; i < n; ++i)
            for (auto j : net.neighborhood(i)) known[i][display[o][j]] = true;
    };
    absorb(0);
    for (std::size_t o = 1; o < block; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& dir = schedule.directive(o, i);
            if (dir.kind == Directive::Kind::Repeat) {
                display[o][i] = i;
            } else {
                if (!known[i][dir.token])
                    throw ScheduleIntegrityError(
                        "agent " + std::to_string(i) + " imitates agent " +
                        std::to_string(dir.token) + " at offset " + std::to_string(o) +
                        " before observing that action");
                display[o][i] = dir.token;
            }
        }
        absorb(o);
    }
    return known;
}

void check_schedule_integrity(const Network& net, const PropagationSchedule& schedule) {
    const auto n = net.size();
    const auto block = schedule.block_length();
    const auto shows = [&](std::size_t agent, std::size_t offset) {
        if (offset == 0) return agent;
        return schedule.directive(offset, agent).token;
    };
    const auto check = [&](std::size_t i, std::size_t token, std::size_t src, std::size_t offset,
                           std::size_t before) {
        if (!net.observes(i, src))
            throw ScheduleIntegrityError("agent " + std::to_string(i) + " reads unobserved agent " +
                                         std::to_string(src));
        if (offset >= before || shows(src, offset) != token)
            throw ScheduleIntegrityError("agent " + std::to_string(i) + " reads token " +
                                         std::to_string(token) + " from a display that lacks it");
    };
    for (std::size_t o = 1; o < block; ++o)
        for (std::size_t i = 0; i < n; ++i) {
            const auto& dir = schedule.directive(o, i);
            if (dir.kind == Directive::Kind::Imitate)
                check(i, dir.token, dir.source_agent, dir.source_offset, o);
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& src = schedule.knowledge_source(i, j);
            check(i, j, src.agent, src.offset, block);
        }
}

}  // namespace ratebound

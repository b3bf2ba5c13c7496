// Directed observation networks and the action-propagation schedule used by
// the coordination strategy on strongly connected networks.
//
// Convention: j in N^i means agent i observes agent j. Every agent observes
// herself. d(i,j) is the number of observation hops needed for j's action to
// reach i, so d(i,j) = 1 exactly when j is a neighbor of i.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ratebound {

class Network {
public:
    Network() = default;
    // Neighborhoods are sorted, deduplicated and given their self-loop.
    // Throws DomainError on out-of-range indices.
    explicit Network(std::vector<std::vector<std::size_t>> neighborhoods);

    static Network complete(std::size_t n);
    // N^i = {i, i+1 mod n}.
    static Network directed_cycle(std::size_t n);
    // Hub 0 observes everyone; every other agent observes the hub.
    static Network star(std::size_t n);
    // Each ordered edge present with probability p; resampled until strongly
    // connected.
    static Network erdos_renyi_strongly_connected(std::size_t n, double p, std::uint64_t seed);

    std::size_t size() const { return neighborhoods_.size(); }
    const std::vector<std::size_t>& neighborhood(std::size_t i) const { return neighborhoods_[i]; }
    const std::vector<std::vector<std::size_t>>& neighborhoods() const { return neighborhoods_; }
    bool observes(std::size_t i, std::size_t j) const { return adjacency_[i * size() + j] != 0; }
    bool observes_everyone(std::size_t i) const { return neighborhoods_[i].size() == size(); }
    bool is_complete() const;
    // Delta = max_i |N^i|.
    std::size_t max_neighborhood() const;

    bool operator==(const Network& o) const { return neighborhoods_ == o.neighborhoods_; }

private:
    std::vector<std::vector<std::size_t>> neighborhoods_;
    std::vector<unsigned char> adjacency_;
};

bool is_strongly_connected(const Network& net);

// All-pairs d(i,j) by breadth-first search. Throws NotStronglyConnectedError.
std::vector<std::vector<std::size_t>> distances(const Network& net);

// What an agent displays in one propagation period.
struct Directive {
    enum class Kind { Repeat, Imitate };
    Kind kind = Kind::Repeat;
    // Agent whose latest voting action is displayed (self for Repeat).
    std::size_t token = 0;
    // Where the acting agent reads that action: an observed agent and the
    // block offset of its display (offset 0 is the voting period).
    std::size_t source_agent = 0;
    std::size_t source_offset = 0;

    bool operator==(const Directive&) const = default;
};

// Where agent i finds agent j's action from the previous voting period.
struct KnowledgeSource {
    std::size_t agent = 0;
    std::size_t offset = 0;

    bool operator==(const KnowledgeSource&) const = default;
};

class PropagationSchedule {
public:
    std::size_t agents() const { return n_; }
    // M = 1 + n(n-2) for n >= 3, 1 otherwise.
    std::size_t block_length() const { return block_; }
    // Periods are 1-based; voting periods are 1, 1+M, 1+2M, ...
    std::size_t offset_of(std::size_t period) const { return (period - 1) % block_; }
    bool is_voting_period(std::size_t period) const { return offset_of(period) == 0; }
    // Directive for a propagation offset in [1, M).
    const Directive& directive(std::size_t offset, std::size_t agent) const {
        return directives_[(offset - 1) * n_ + agent];
    }
    const KnowledgeSource& knowledge_source(std::size_t agent, std::size_t token) const {
        return sources_[agent * n_ + token];
    }

    bool operator==(const PropagationSchedule&) const = default;

private:
    friend PropagationSchedule build_schedule(const Network& net);
    std::size_t n_ = 0;
    std::size_t block_ = 1;
    std::vector<Directive> directives_;
    std::vector<KnowledgeSource> sources_;
};

// Throws NotStronglyConnectedError.
PropagationSchedule build_schedule(const Network& net);

// Symbolically plays one block and returns known[i][j]: whether agent i has
// observed j's voting action by the next voting period. Throws
// ScheduleIntegrityError when an agent is told to imitate an action it has
// not yet observed.
std::vector<std::vector<bool>> replay_knowledge(const Network& net,
                                                const PropagationSchedule& schedule);

// Checks that every directive and knowledge source reads an observed agent
// whose display at that offset carries the claimed token.
void check_schedule_integrity(const Network& net, const PropagationSchedule& schedule);

}  // namespace ratebound

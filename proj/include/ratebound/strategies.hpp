// Decision rules and the information-set plumbing they read from.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ratebound/network.hpp"
#include "ratebound/signal_models.hpp"

namespace ratebound {

// a_f is identified with the state f it is optimal for.
struct Action {
    StateIndex state = 0;
    bool operator==(const Action&) const = default;
};

// Precomputed per-signal LLRs for every agent and unordered pair f<g.
class LlrTable {
public:
    explicit LlrTable(const SignalModel& model);

    const SignalModel& model() const { return *model_; }
    std::size_t num_states() const { return k_; }
    std::size_t pair_index(StateIndex f, StateIndex g) const {  // requires f < g
        return f * k_ - f * (f + 1) / 2 + (g - f - 1);
    }
    std::size_t pair_count() const { return k_ * (k_ - 1) / 2; }
    double log_prior_ratio(std::size_t pair) const { return log_prior_[pair]; }
    // Discrete: llr of `signal` for pair (f<g).
    double discrete_llr(std::size_t agent, std::size_t pair, std::size_t signal) const {
        return discrete_[(agent * pair_count() + pair) * signals_ + signal];
    }
    // Gaussian: l_{f,g}(s) = slope (s - midpoint) for pair (f<g).
    double slope(std::size_t agent, std::size_t pair) const {
        return slope_[agent * pair_count() + pair];
    }
    double midpoint(std::size_t agent, std::size_t pair) const {
        return midpoint_[agent * pair_count() + pair];
    }
    std::size_t signals() const { return signals_; }

private:
    const SignalModel* model_;
    std::size_t k_;
    std::size_t signals_ = 0;
    std::vector<double> log_prior_;
    std::vector<double> discrete_;
    std::vector<double> slope_, midpoint_;
};

// A single agent's private information: cumulative LLRs (including the
// log-prior term) plus the bookkeeping some strategies carry across periods.
//
// Discrete models keep integer signal counts so that L[f][g] is an exact,
// order-independent function of the history.
class AgentState {
public:
    AgentState(const LlrTable& table, std::size_t agent);

    void reset();
    void observe_label(std::size_t label);
    void observe_value(double value);
    void observe(const Signal& s);

    std::size_t agent() const { return agent_; }
    std::size_t num_states() const { return table_->num_states(); }
    std::size_t periods() const { return periods_; }
    // L^i_{f,g,t} = log pi0(f)/pi0(g) + sum_{r<=t} l_{f,g}(s_r).
    double llr(StateIndex f, StateIndex g) const;
    double log_prior_ratio(StateIndex f, StateIndex g) const;
    // LLR of the most recent signal alone (no prior term).
    double last_signal_llr(StateIndex f, StateIndex g) const;

    // Cumulative counts of observed odd-agent actions (odd/even example).
    std::vector<std::int64_t>& action_tally() { return tally_; }
    const std::vector<std::int64_t>& action_tally() const { return tally_; }

    // Whether the last coordination decision used the decisive branch.
    bool last_decisive = false;

private:
    double pair_sum(std::size_t pair) const;
    double pair_last(std::size_t pair) const;

    const LlrTable* table_;
    std::size_t agent_;
    std::size_t periods_ = 0;
    std::vector<std::int64_t> counts_;
    double value_sum_ = 0.0;
    std::size_t last_label_ = 0;
    double last_value_ = 0.0;
    std::vector<std::int64_t> tally_;
};

// Ring buffer of everyone's past actions plus per-period plurality tallies.
class ActionHistory {
public:
    ActionHistory(std::size_t agents, std::size_t states, std::size_t depth);

    void clear();
    void record(std::size_t period, std::span<const Action> actions);
    std::size_t depth() const { return depth_; }
    std::size_t latest() const { return latest_; }
    std::size_t agents() const { return agents_; }
    std::size_t states() const { return states_; }

    // Unchecked access; strategies go through NeighborView.
    Action at(std::size_t agent, std::size_t period) const {
        return actions_[slot(period) * agents_ + agent];
    }
    std::span<const std::int64_t> tally(std::size_t period) const {
        return {tallies_.data() + slot(period) * states_, states_};
    }
    bool holds(std::size_t period) const {
        return period >= 1 && period <= latest_ && period + depth_ > latest_;
    }
    // Test hook for censorship probes.
    void overwrite(std::size_t agent, std::size_t period, Action a);

private:
    std::size_t slot(std::size_t period) const { return period % depth_; }
    std::size_t agents_, states_, depth_;
    std::size_t latest_ = 0;
    std::vector<Action> actions_;
    std::vector<std::int64_t> tallies_;
};

// Agent i's window onto the history at period t: neighbours' actions in
// periods before t. Anything else raises VisibilityViolation.
class NeighborView {
public:
    NeighborView(const ActionHistory& history, const Network& net, std::size_t agent,
                 std::size_t period)
        : history_(&history), net_(&net), agent_(agent), period_(period) {}

    std::size_t agent() const { return agent_; }
    std::size_t period() const { return period_; }
    bool observes(std::size_t j) const { return net_->observes(agent_, j); }
    Action action(std::size_t j, std::size_t period) const;
    // Plurality tally over all agents; only for agents observing everyone.
    std::span<const std::int64_t> tally_all(std::size_t period) const;

private:
    void check_period(std::size_t period) const;
    const ActionHistory* history_;
    const Network* net_;
    std::size_t agent_, period_;
};

struct AutarkyMl {
    bool operator==(const AutarkyMl&) const = default;
};
struct CoordinationComplete {
    std::optional<double> delta;  // default applied at profile construction
    bool operator==(const CoordinationComplete&) const = default;
};
struct CoordinationConnected {
    std::optional<double> delta;
    bool operator==(const CoordinationConnected&) const = default;
};
struct OddEven {
    bool operator==(const OddEven&) const = default;
};
// Plays a_state in every period.
struct ConstantAction {
    StateIndex state = 0;
    bool operator==(const ConstantAction&) const = default;
};

using StrategySpec =
    std::variant<AutarkyMl, CoordinationComplete, CoordinationConnected, OddEven, ConstantAction>;

std::string strategy_name(const StrategySpec& s);

struct StrategyProfile {
    std::vector<StrategySpec> per_agent;

    static StrategyProfile uniform(const StrategySpec& spec, std::size_t n);
    bool operator==(const StrategyProfile&) const = default;
};

// Lists problems with running `profile` on (model, net); empty when valid.
std::vector<std::string> profile_violations(const SignalModel& model, const Network& net,
                                            const StrategyProfile& profile);

// ---- pure decision rules ----

// Lowest-indexed f with L[f][g] >= 0 for all g.
Action act_autarky_ml(const AgentState& s);

// f such that L[f][g] >= threshold[f][g] * t for every g != f, if any.
// threshold is a row-major k x k matrix of m_{f,g} - delta.
std::optional<StateIndex> decisive_state(const AgentState& s, std::size_t t,
                                         std::span<const double> threshold);

// Decisive branch if it applies, otherwise the popular action; period 1
// (no popular action) plays first_action. Sets s.last_decisive.
Action act_coordination(AgentState& s, std::size_t t, std::span<const double> threshold,
                        std::optional<Action> popular, Action first_action);

// Plurality with ties to the lowest state index.
Action most_popular(std::span<const Action> actions, std::size_t num_states);
Action most_popular_tally(std::span<const std::int64_t> tally);

// Strongly connected variant: voting periods decide via act_coordination
// with the previous voting period's reconstructed plurality; propagation
// periods execute the schedule directive.
Action act_connected(AgentState& s, std::size_t t, const PropagationSchedule& schedule,
                     std::span<const double> threshold, const NeighborView& view,
                     Action first_action, std::size_t num_states);

// Odd-numbered agents (1-based, i.e. even 0-based indices) follow the current
// signal; even-numbered agents pick the posterior mode given all odd agents'
// observed actions (odd_tally) and the prior.
Action act_odd_even(std::size_t agent_index, const AgentState& s,
                    std::span<const std::int64_t> odd_tally, double signal_weight);

bool is_odd_numbered(std::size_t agent_index);

// Binds a profile to a model and network and evaluates each agent's rule on
// her information set.
class StrategyEvaluator {
public:
    StrategyEvaluator(const SignalModel& model, const Network& net, StrategyProfile profile);

    const StrategyProfile& profile() const { return profile_; }
    const PropagationSchedule* schedule() const { return schedule_.get(); }
    // History depth needed by the profile.
    std::size_t history_depth() const;
    Action first_action() const { return first_action_; }
    // Coordination slack used by `agent` (if it coordinates).
    double delta(std::size_t agent) const { return delta_[agent]; }

    Action act(AgentState& s, std::size_t t, const NeighborView& view) const;

private:
    const SignalModel* model_;
    StrategyProfile profile_;
    std::shared_ptr<const PropagationSchedule> schedule_;
    std::vector<double> delta_;
    std::vector<std::vector<double>> threshold_;  // per agent, k x k
    Action first_action_;
    double odd_even_weight_ = 0.0;
};

}  // namespace ratebound

#include "ratebound/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "ratebound/errors.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rates.hpp"

namespace ratebound {

LlrTable::LlrTable(const SignalModel& model) : model_(&model), k_(model.num_states()) {
    const auto pairs = pair_count();
    const auto n = model.n_agents();
    const auto& prior = model.states().prior;
    log_prior_.resize(pairs);
    for (StateIndex f = 0; f < k_; ++f)
        for (StateIndex g = f + 1; g < k_; ++g)
            log_prior_[pair_index(f, g)] = std::log(prior[f]) - std::log(prior[g]);
    if (model.is_discrete()) {
        signals_ = model.support_size();
        discrete_.assign(n * pairs * signals_, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (StateIndex f = 0; f < k_; ++f)
                for (StateIndex g = f + 1; g < k_; ++g)
                    for (std::size_t s = 0; s < signals_; ++s)
                        if (model.pmf(i, f, s) > 0.0)
                            discrete_[(i * pairs + pair_index(f, g)) * signals_ + s] =
                                llr(model, i, f, g, s);
    } else {
        slope_.resize(n * pairs);
        midpoint_.resize(n * pairs);
        const double var = model.sigma() * model.sigma();
        for (std::size_t i = 0; i < n; ++i)
            for (StateIndex f = 0; f < k_; ++f)
                for (StateIndex g = f + 1; g < k_; ++g) {
                    const auto idx = i * pairs + pair_index(f, g);
                    slope_[idx] = (model.mean(i, f) - model.mean(i, g)) / var;
                    midpoint_[idx] = 0.5 * (model.mean(i, f) + model.mean(i, g));
                }
    }
}

AgentState::AgentState(const LlrTable& table, std::size_t agent)
    : table_(&table), agent_(agent) {
    counts_.assign(table.signals(), 0);
    tally_.assign(table.num_states(), 0);
}

void AgentState::reset() {
    periods_ = 0;
    std::fill(counts_.begin(), counts_.end(), 0);
    std::fill(tally_.begin(), tally_.end(), 0);
    value_sum_ = 0.0;
    last_label_ = 0;
    last_value_ = 0.0;
    last_decisive = false;
}

void AgentState::observe_label(std::size_t label) {
    ++counts_[label];
    last_label_ = label;
    ++periods_;
}

void AgentState::observe_value(double value) {
    value_sum_ += value;
    last_value_ = value;
    ++periods_;
}

void AgentState::observe(const Signal& s) {
    if (const auto* label = std::get_if<std::size_t>(&s)) {
        if (*label >= counts_.size()) throw InvalidSignalError("observe: label outside support");
        observe_label(*label);
    } else {
        observe_value(std::get<double>(s));
    }
}

double AgentState::pair_sum(std::size_t pair) const {
    double total = table_->log_prior_ratio(pair);
    if (table_->model().is_discrete()) {
        for (std::size_t s = 0; s < counts_.size(); ++s)
            if (counts_[s] != 0)
                total += static_cast<double>(counts_[s]) * table_->discrete_llr(agent_, pair, s);
    } else {
        total += table_->slope(agent_, pair) *
                 (value_sum_ - static_cast<double>(periods_) * table_->midpoint(agent_, pair));
    }
    return total;
}

double AgentState::pair_last(std::size_t pair) const {
    if (periods_ == 0) return 0.0;
    if (table_->model().is_discrete()) return table_->discrete_llr(agent_, pair, last_label_);
    return table_->slope(agent_, pair) * (last_value_ - table_->midpoint(agent_, pair));
}

double AgentState::llr(StateIndex f, StateIndex g) const {
    if (f == g) return 0.0;
    return f < g ? pair_sum(table_->pair_index(f, g)) : -pair_sum(table_->pair_index(g, f));
}

double AgentState::log_prior_ratio(StateIndex f, StateIndex g) const {
    if (f == g) return 0.0;
    return f < g ? table_->log_prior_ratio(table_->pair_index(f, g))
                 : -table_->log_prior_ratio(table_->pair_index(g, f));
}

double AgentState::last_signal_llr(StateIndex f, StateIndex g) const {
    if (f == g) return 0.0;
    return f < g ? pair_last(table_->pair_index(f, g)) : -pair_last(table_->pair_index(g, f));
}

ActionHistory::ActionHistory(std::size_t agents, std::size_t states, std::size_t depth)
    : agents_(agents), states_(states), depth_(std::max<std::size_t>(depth, 1)) {
    actions_.assign(depth_ * agents_, Action{});
    tallies_.assign(depth_ * states_, 0);
}

void ActionHistory::clear() { latest_ = 0; }

void ActionHistory::record(std::size_t period, std::span<const Action> actions) {
    if (period != latest_ + 1) throw Error("ActionHistory: periods must be recorded in order");
    latest_ = period;
    const auto base = slot(period);
    std::copy(actions.begin(), actions.end(), actions_.begin() + base * agents_);
    auto* tally = tallies_.data() + base * states_;
    std::fill(tally, tally + states_, 0);
    for (const auto& a : actions) ++tally[a.state];
}

void ActionHistory::overwrite(std::size_t agent, std::size_t period, Action a) {
    auto& slot_action = actions_[slot(period) * agents_ + agent];
    auto* tally = tallies_.data() + slot(period) * states_;
    --tally[slot_action.state];
    ++tally[a.state];
    slot_action = a;
}

void NeighborView::check_period(std::size_t period) const {
    if (period >= period_ || !history_->holds(period))
        throw VisibilityViolation("agent " + std::to_string(agent_) + " at period " +
                                  std::to_string(period_) + " read period " +
                                  std::to_string(period));
}

Action NeighborView::action(std::size_t j, std::size_t period) const {
    if (!net_->observes(agent_, j))
        throw VisibilityViolation("agent " + std::to_string(agent_) +
                                  " read unobserved agent " + std::to_string(j));
    check_period(period);
    return history_->at(j, period);
}

std::span<const std::int64_t> NeighborView::tally_all(std::size_t period) const {
    if (!net_->observes_everyone(agent_))
        throw VisibilityViolation("agent " + std::to_string(agent_) +
                                  " requested a global tally without observing everyone");
    check_period(period);
    return history_->tally(period);
}

std::string strategy_name(const StrategySpec& s) {
    struct Visitor {
        std::string operator()(const AutarkyMl&) const { return "autarky"; }
        std::string operator()(const CoordinationComplete&) const { return "coordination"; }
        std::string operator()(const CoordinationConnected&) const {
            return "coordination_connected";
        }
        std::string operator()(const OddEven&) const { return "odd_even"; }
        std::string operator()(const ConstantAction&) const { return "constant"; }
    };
    return std::visit(Visitor{}, s);
}

StrategyProfile StrategyProfile::uniform(const StrategySpec& spec, std::size_t n) {
    return StrategyProfile{std::vector<StrategySpec>(n, spec)};
}

std::vector<std::string> profile_violations(const SignalModel& model, const Network& net,
                                            const StrategyProfile& profile) {
    std::vector<std::string> out;
    if (profile.per_agent.size() != model.n_agents())
        out.push_back("strategy: profile covers " + std::to_string(profile.per_agent.size()) +
                      " agents but the model has " + std::to_string(model.n_agents()));
    if (net.size() != model.n_agents())
        out.push_back("network: " + std::to_string(net.size()) +
                      " agents but the model has " + std::to_string(model.n_agents()));
    if (!out.empty()) return out;
    double ceiling = 0.0;
    try {
        ceiling = 10.0 * default_delta(model);
    } catch (const std::exception& e) {
        out.push_back(std::string("model: ") + e.what());
        return out;
    }
    bool needs_complete = false, needs_connected = false, needs_binary = false;
    for (std::size_t i = 0; i < profile.per_agent.size(); ++i) {
        const auto& spec = profile.per_agent[i];
        std::optional<double> delta;
        if (const auto* c = std::get_if<CoordinationComplete>(&spec)) {
            needs_complete = true;
            delta = c->delta;
        } else if (const auto* c = std::get_if<CoordinationConnected>(&spec)) {
            needs_connected = true;
            delta = c->delta;
        } else if (std::holds_alternative<OddEven>(spec)) {
            needs_complete = needs_binary = true;
        } else if (const auto* c = std::get_if<ConstantAction>(&spec)) {
            if (c->state >= model.num_states())
                out.push_back("strategy.action: state index out of range");
        }
        if (delta && !(*delta > 0.0 && *delta < ceiling))
            out.push_back("strategy.delta: must lie in (0, min m_{f,g}) = (0, " +
                          std::to_string(ceiling) + ")");
    }
    if (needs_complete && !net.is_complete())
        out.push_back("strategy/network: strategy requires a complete network");
    if (needs_connected && !is_strongly_connected(net))
        out.push_back("strategy/network: coordination_connected requires a strongly connected network");
    if (needs_binary && model.family() != Family::BinarySymmetric)
        out.push_back("strategy/model: odd_even requires the binary_symmetric family");
    if (model.correlated()) out.push_back("model: correlated signals are not supported");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Action act_autarky_ml(const AgentState& s) {
    const auto k = s.num_states();
    for (StateIndex f = 0; f < k; ++f) {
        bool ok = true;
        for (StateIndex g = 0; g < k && ok; ++g)
            if (g != f && s.llr(f, g) < 0.0) ok = false;
        if (ok) return Action{f};
    }
    // Only reachable through rounding in models with three or more states.
    StateIndex best = 0;
    double best_margin = -INFINITY;
    for (StateIndex f = 0; f < k; ++f) {
        double margin = INFINITY;
        for (StateIndex g = 0; g < k; ++g)
            if (g != f) margin = std::min(margin, s.llr(f, g));
        if (margin > best_margin) {
            best_margin = margin;
            best = f;
        }
    }
    return Action{best};
}

std::optional<StateIndex> decisive_state(const AgentState& s, std::size_t t,
                                         std::span<const double> threshold) {
    const auto k = s.num_states();
    const double periods = static_cast<double>(t);
    // Each unordered pair is summed once; the reverse orientation is its negation.
    thread_local std::vector<double> l;
    l.assign(k * k, 0.0);
    for (StateIndex f = 0; f < k; ++f)
        for (StateIndex g = f + 1; g < k; ++g) {
            l[f * k + g] = s.llr(f, g);
            l[g * k + f] = -l[f * k + g];
        }
    for (StateIndex f = 0; f < k; ++f) {
        bool ok = true;
        for (StateIndex g = 0; g < k && ok; ++g)
            if (g != f && !(l[f * k + g] >= threshold[f * k + g] * periods)) ok = false;
        if (ok) return f;
    }
    return std::nullopt;
}

Action act_coordination(AgentState& s, std::size_t t, std::span<const double> threshold,
                        std::optional<Action> popular, Action first_action) {
    s.last_decisive = false;
    if (t <= 1 || !popular) return first_action;
    if (const auto f = decisive_state(s, t, threshold)) {
        s.last_decisive = true;
        return Action{*f};
    }
    return *popular;
}

Action most_popular_tally(std::span<const std::int64_t> tally) {
    if (tally.empty()) throw DomainError("most_popular: no states");
    StateIndex best = 0;
    for (StateIndex f = 1; f < tally.size(); ++f)
        if (tally[f] > tally[best]) best = f;
    return Action{best};
}

Action most_popular(std::span<const Action> actions, std::size_t num_states) {
    if (actions.empty()) throw DomainError("most_popular: empty multiset");
    std::vector<std::int64_t> tally(num_states, 0);
    for (const auto& a : actions) {
        if (a.state >= num_states) throw DomainError("most_popular: action out of range");
        ++tally[a.state];
    }
    return most_popular_tally(tally);
}

Action act_connected(AgentState& s, std::size_t t, const PropagationSchedule& schedule,
                     std::span<const double> threshold, const NeighborView& view,
                     Action first_action, std::size_t num_states) {
    const auto block = schedule.block_length();
    const auto offset = schedule.offset_of(t);
    const auto i = s.agent();
    if (offset == 0) {
        if (t == 1) return act_coordination(s, t, threshold, std::nullopt, first_action);
        const auto previous_vote = t - block;
        std::vector<std::int64_t> tally(num_states, 0);
        for (std::size_t j = 0; j < schedule.agents(); ++j) {
            const auto& src = schedule.knowledge_source(i, j);
            if (!view.observes(src.agent))
                throw ScheduleIntegrityError("act_connected: knowledge source is not observed");
            ++tally[view.action(src.agent, previous_vote + src.offset).state];
        }
        return act_coordination(s, t, threshold, most_popular_tally(tally), first_action);
    }
    s.last_decisive = false;
    const auto vote = t - offset;
    const auto& dir = schedule.directive(offset, i);
    if (dir.kind == Directive::Kind::Repeat) return view.action(i, vote);
    if (!view.observes(dir.source_agent))
        throw ScheduleIntegrityError("act_connected: directive source is not observed");
    return view.action(dir.source_agent, vote + dir.source_offset);
}

bool is_odd_numbered(std::size_t agent_index) { return agent_index % 2 == 0; }

Action act_odd_even(std::size_t agent_index, const AgentState& s,
                    std::span<const std::int64_t> odd_tally, double signal_weight) {
    if (s.num_states() != 2) throw UnsupportedError("odd_even: requires exactly two states");
    if (is_odd_numbered(agent_index))
        return Action{s.last_signal_llr(0, 1) >= 0.0 ? StateIndex{0} : StateIndex{1}};
    const double score =
        s.log_prior_ratio(0, 1) +
        signal_weight * static_cast<double>(odd_tally[0] - odd_tally[1]);
    return Action{score >= 0.0 ? StateIndex{0} : StateIndex{1}};
}

StrategyEvaluator::StrategyEvaluator(const SignalModel& model, const Network& net,
                                     StrategyProfile profile)
    : model_(&model), profile_(std::move(profile)) {
    auto problems = profile_violations(model, net, profile_);
    if (!problems.empty()) throw ConfigError(std::move(problems));
    const auto k = model.num_states();
    const auto n = model.n_agents();
    first_action_ = Action{model.states().most_likely()};
    delta_.assign(n, 0.0);
    threshold_.assign(n, std::vector<double>(k * k, 0.0));
    const double fallback_delta = default_delta(model);
    bool connected = false;
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<double> delta;
        bool coordinates = false;
        if (const auto* c = std::get_if<CoordinationComplete>(&profile_.per_agent[i])) {
            delta = c->delta;
            coordinates = true;
        } else if (const auto* c = std::get_if<CoordinationConnected>(&profile_.per_agent[i])) {
            delta = c->delta;
            coordinates = connected = true;
        }
        if (!coordinates) continue;
        delta_[i] = delta.value_or(fallback_delta);
        for (StateIndex f = 0; f < k; ++f)
            for (StateIndex g = 0; g < k; ++g)
                if (f != g)
                    threshold_[i][f * k + g] = PairKernel(model, i, f, g).mean() - delta_[i];
    }
    if (connected) schedule_ = std::make_shared<const PropagationSchedule>(build_schedule(net));
    if (model.family() == Family::BinarySymmetric)
        odd_even_weight_ = std::log(model.p() / (1.0 - model.p()));
}

std::size_t StrategyEvaluator::history_depth() const {
    return (schedule_ ? schedule_->block_length() : 1) + 1;
}

Action StrategyEvaluator::act(AgentState& s, std::size_t t, const NeighborView& view) const {
    const auto i = s.agent();
    const auto& spec = profile_.per_agent[i];
    switch (spec.index()) {
        case 0:
            return act_autarky_ml(s);
        case 1: {
            std::optional<Action> popular;
            if (t > 1) popular = most_popular_tally(view.tally_all(t - 1));
            return act_coordination(s, t, threshold_[i], popular, first_action_);
        }
        case 2:
            return act_connected(s, t, *schedule_, threshold_[i], view, first_action_,
                                 model_->num_states());
        case 3: {
            auto& tally = s.action_tally();
            if (!is_odd_numbered(i) && t > 1)
                for (std::size_t j = 0; j < model_->n_agents(); j += 2)
                    ++tally[view.action(j, t - 1).state];
            return act_odd_even(i, s, tally, odd_even_weight_);
        }
        default:
            return Action{std::get<ConstantAction>(spec).state};
    }
}

}  // namespace ratebound

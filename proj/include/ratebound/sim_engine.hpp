// Conditional Monte Carlo simulation, exact small-instance oracles and
// mistake-curve rate fitting.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ratebound/network.hpp"
#include "ratebound/signal_models.hpp"
#include "ratebound/strategies.hpp"

namespace ratebound {

// Replications run conditionally on each state; estimates mix the states by
// the prior.
struct SimConfig {
    SignalModel model;
    Network network;
    StrategyProfile profile;
    std::size_t horizon = 1;
    std::uint64_t replications = 1;
    std::uint64_t seed = 0;
};

// Every problem with the configuration; empty when runnable.
std::vector<std::string> config_violations(const SimConfig& config);

enum class Provenance { MonteCarlo, ExactEnumeration, ExactBinomial, Synthetic };
const char* provenance_name(Provenance p);

// Per state, agent and period: mistake counts (Monte Carlo) or exact mistake
// probabilities. The prior-mixed estimate weights the per-state values.
class MistakeCurve {
public:
    MistakeCurve(Provenance provenance, std::size_t agents, std::size_t horizon,
                 std::vector<double> state_weights, std::uint64_t trials);

    Provenance provenance() const { return provenance_; }
    bool exact() const { return provenance_ != Provenance::MonteCarlo; }
    std::size_t agents() const { return agents_; }
    std::size_t horizon() const { return horizon_; }
    std::size_t states() const { return weights_.size(); }
    std::uint64_t trials() const { return trials_; }
    const std::vector<double>& state_weights() const { return weights_; }

    // Periods are 1-based.
    std::int64_t& mistakes(std::size_t state, std::size_t agent, std::size_t t) {
        return mistakes_[index(state, agent, t)];
    }
    std::int64_t mistakes(std::size_t state, std::size_t agent, std::size_t t) const {
        return mistakes_[index(state, agent, t)];
    }
    double& probability(std::size_t state, std::size_t agent, std::size_t t) {
        return probability_[index(state, agent, t)];
    }

    double estimate(std::size_t state, std::size_t agent, std::size_t t) const;
    double estimate(std::size_t agent, std::size_t t) const;
    // Standard error of the prior-mixed estimate; zero for exact curves.
    double standard_error(std::size_t agent, std::size_t t) const;
    std::int64_t total_mistakes(std::size_t agent, std::size_t t) const;
    // Mean of the prior-mixed estimate over agents.
    double agent_average(std::size_t t) const;
    double agent_average_standard_error(std::size_t t) const;

private:
    std::size_t index(std::size_t state, std::size_t agent, std::size_t t) const {
        return (state * agents_ + agent) * horizon_ + (t - 1);
    }
    Provenance provenance_;
    std::size_t agents_, horizon_;
    std::vector<double> weights_;
    std::uint64_t trials_;
    std::vector<std::int64_t> mistakes_;
    std::vector<double> probability_;
};

struct Trajectory {
    // [period-1][agent]
    std::vector<std::vector<Action>> actions;
    std::vector<std::vector<bool>> decisive;
    std::vector<std::vector<bool>> mistakes;
};

// Supplies the signal of (agent, period) for one trajectory.
using SignalSource = std::function<CellDraw(std::size_t agent, std::size_t period)>;

class Simulator {
public:
    // Throws ConfigError for invalid configurations.
    explicit Simulator(SimConfig config);
    // The evaluator and LLR table point into config_.
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    const SimConfig& config() const { return config_; }
    const StrategyEvaluator& evaluator() const { return evaluator_; }

    Trajectory run(StateIndex state, std::uint64_t replication) const;
    Trajectory run(StateIndex state, const SignalSource& source) const;

    // Tallies R replications per state across worker threads.
    MistakeCurve mistake_curve(std::size_t workers) const;
    // Brute force over every signal profile; |S|^{nT} <= 2^20 per state.
    MistakeCurve enumerate_exact() const;

    const LlrTable& table() const { return table_; }

private:
    SimConfig config_;
    LlrTable table_;
    StrategyEvaluator evaluator_;
};

// Per-agent per-period mistake indicators for one replication.
std::vector<std::vector<bool>> run_trajectory(const SimConfig& config, StateIndex state,
                                              std::uint64_t replication);

MistakeCurve mistake_curve(const SimConfig& config);
MistakeCurve enumerate_exact(const SimConfig& config);

// Exact autarky curve of the binary symmetric model with uniform prior:
// per period 1/2 (P[Bin(t,p) <= ceil(t/2)-1] + P[Bin(t,p) <= floor(t/2)]).
MistakeCurve exact_autarky_curve(const SignalModel& model, std::size_t horizon);

struct RateFit {
    double rate = 0.0;
    double standard_error = 0.0;
    bool usable = false;
    std::size_t points = 0;
};

// Least-squares slope of -log p_t over t in [first, last], using periods with
// at least 20 recorded mistakes (Monte Carlo) or positive probability (exact).
// The limit is assumed to exist; the liminf is not identifiable at finite T.
RateFit fit_rate(const MistakeCurve& curve, std::size_t agent, std::size_t first,
                 std::size_t last);
// Same regression on an explicit sequence of (t, p_t).
RateFit fit_log_linear(const std::vector<std::size_t>& periods, const std::vector<double>& probs);

inline constexpr std::int64_t kMinMistakesForFit = 20;

}  // namespace ratebound

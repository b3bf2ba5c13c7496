#include "ratebound/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ratebound/errors.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rng.hpp"

namespace ratebound {

std::vector<std::string> config_violations(const SimConfig& config) {
    std::vector<std::string> out;
    if (config.horizon < 1) out.push_back("horizon: must be at least 1");
    if (config.replications < 1) out.push_back("replications: must be at least 1");
    if (config.horizon > 0xFFFFFFFFull) out.push_back("horizon: too large");
    for (auto& v : validate(config.model).violations) out.push_back("model: " + v);
    if (out.empty())
        for (auto& v : profile_violations(config.model, config.network, config.profile))
            out.push_back(v);
    return out;
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::MonteCarlo: return "monte-carlo";
        case Provenance::ExactEnumeration: return "exact-enumeration";
        case Provenance::ExactBinomial: return "exact-binomial";
        case Provenance::Synthetic: return "synthetic";
    }
    return "unknown";
}

MistakeCurve::MistakeCurve(Provenance provenance, std::size_t agents, std::size_t horizon,
                           std::vector<double> state_weights, std::uint64_t trials)
    : provenance_(provenance),
      agents_(agents),
      horizon_(horizon),
      weights_(std::move(state_weights)),
      trials_(trials) {
    const auto cells = weights_.size() * agents_ * horizon_;
    mistakes_.assign(cells, 0);
    probability_.assign(cells, 0.0);
}

double MistakeCurve::estimate(std::size_t state, std::size_t agent, std::size_t t) const {
    if (exact()) return probability_[index(state, agent, t)];
    return static_cast<double>(mistakes_[index(state, agent, t)]) / static_cast<double>(trials_);
}

double MistakeCurve::estimate(std::size_t agent, std::size_t t) const {
    double total = 0.0;
    for (std::size_t f = 0; f < weights_.size(); ++f) total += weights_[f] * estimate(f, agent, t);
    return total;
}

double MistakeCurve::standard_error(std::size_t agent, std::size_t t) const {
    if (exact()) return 0.0;
    double var = 0.0;
    for (std::size_t f = 0; f < weights_.size(); ++f) {
        const double p = estimate(f, agent, t);
        var += weights_[f] * weights_[f] * p * (1.0 - p) / static_cast<double>(trials_);
    }
    return std::sqrt(var);
}

std::int64_t MistakeCurve::total_mistakes(std::size_t agent, std::size_t t) const {
    std::int64_t total = 0;
    for (std::size_t f = 0; f < weights_.size(); ++f) total += mistakes_[index(f, agent, t)];
    return total;
}

double MistakeCurve::agent_average(std::size_t t) const {
    double total = 0.0;
    for (std::size_t i = 0; i < agents_; ++i) total += estimate(i, t);
    return total / static_cast<double>(agents_);
}

double MistakeCurve::agent_average_standard_error(std::size_t t) const {
    // Agents within a trajectory are dependent; the mean of per-agent errors
    // bounds the error of the mean.
    double total = 0.0;
    for (std::size_t i = 0; i < agents_; ++i) total += standard_error(i, t);
    return total / static_cast<double>(agents_);
}

namespace {

SimConfig validated(SimConfig c) {
    auto v = config_violations(c);
    if (!v.empty()) throw ConfigError(std::move(v));
    return c;
}

struct Workspace {
    std::vector<AgentState> agents;
    ActionHistory history;
    std::vector<Action> current;

    explicit Workspace(const Simulator& sim)
        : history(sim.config().model.n_agents(), sim.config().model.num_states(),
                  sim.evaluator().history_depth()),
          current(sim.config().model.n_agents()) {
        for (std::size_t i = 0; i < sim.config().model.n_agents(); ++i)
            agents.emplace_back(sim.table(), i);
    }
};

// One trajectory under `state`: each period every agent observes her signal,
// then acts on her information set; actions become visible next period.
template <class Source, class Sink>
void play(const Simulator& sim, Workspace& ws, Source&& source, Sink&& sink) {
    const auto& cfg = sim.config();
    const auto n = cfg.model.n_agents();
    const bool discrete = cfg.model.is_discrete();
    for (auto& a : ws.agents) a.reset();
    ws.history.clear();
    for (std::size_t t = 1; t <= cfg.horizon; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const CellDraw d = source(i, t);
            if (discrete)
                ws.agents[i].observe_label(d.label);
            else
                ws.agents[i].observe_value(d.value);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const NeighborView view(ws.history, cfg.network, i, t);
            ws.current[i] = sim.evaluator().act(ws.agents[i], t, view);
            sink(i, t, ws.current[i], ws.agents[i].last_decisive);
        }
        ws.history.record(t, ws.current);
    }
}

constexpr std::uint64_t kChunk = 2048;

}  // namespace

Simulator::Simulator(SimConfig config)
    : config_(validated(std::move(config))),
      table_(config_.model),
      evaluator_(config_.model, config_.network, config_.profile) {}

Trajectory Simulator::run(StateIndex state, const SignalSource& source) const {
    if (state >= config_.model.num_states()) throw InvalidPairError("run: invalid state");
    Workspace ws(*this);
    Trajectory tr;
    const auto n = config_.model.n_agents();
    tr.actions.assign(config_.horizon, std::vector<Action>(n));
    tr.decisive.assign(config_.horizon, std::vector<bool>(n));
    tr.mistakes.assign(config_.horizon, std::vector<bool>(n));
    play(*this, ws, source, [&](std::size_t i, std::size_t t, Action a, bool decisive) {
        tr.actions[t - 1][i] = a;
        tr.decisive[t - 1][i] = decisive;
        tr.mistakes[t - 1][i] = a.state != state;
    });
    return tr;
}

Trajectory Simulator::run(StateIndex state, std::uint64_t replication) const {
    const SignalSampler sampler(config_.model);
    return run(state, [&](std::size_t i, std::size_t t) {
        return sampler.draw(state, i, config_.seed, replication, t);
    });
}

MistakeCurve Simulator::mistake_curve(std::size_t workers) const {
    const auto k = config_.model.num_states();
    const auto n = config_.model.n_agents();
    const auto horizon = config_.horizon;
    const auto reps = config_.replications;
    const std::uint64_t chunks_per_state = (reps + kChunk - 1) / kChunk;
    const auto tasks = static_cast<std::size_t>(k * chunks_per_state);
    const SignalSampler sampler(config_.model);
    std::vector<std::vector<std::int64_t>> partial(tasks);
    parallel_for(tasks, workers, [&](std::size_t task) {
        const StateIndex state = task / chunks_per_state;
        const std::uint64_t first = (task % chunks_per_state) * kChunk;
        const std::uint64_t last = std::min(reps, first + kChunk);
        auto& counts = partial[task];
        counts.assign(n * horizon, 0);
        Workspace ws(*this);
        for (std::uint64_t r = first; r < last; ++r) {
            play(
                *this, ws,
                [&](std::size_t i, std::size_t t) {
                    return sampler.draw(state, i, config_.seed, r, t);
                },
                [&](std::size_t i, std::size_t t, Action a, bool) {
                    if (a.state != state) ++counts[i * horizon + (t - 1)];
                });
        }
    });
    MistakeCurve curve(Provenance::MonteCarlo, n, horizon, config_.model.states().prior, reps);
    for (std::size_t task = 0; task < tasks; ++task) {
        const StateIndex state = task / chunks_per_state;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 1; t <= horizon; ++t)
                curve.mistakes(state, i, t) += partial[task][i * horizon + (t - 1)];
    }
    return curve;
}

MistakeCurve Simulator::enumerate_exact() const {
    const auto& model = config_.model;
    if (!model.is_discrete())
        throw UnsupportedError("enumerate_exact: requires a finite or binary signal model");
    const auto n = model.n_agents();
    const auto horizon = config_.horizon;
    const auto cells = n * horizon;
    const auto base = model.support_size();
    double size = std::pow(static_cast<double>(base), static_cast<double>(cells));
    if (size > static_cast<double>(1u << 20))
        throw SizeError("enumerate_exact: |S|^(n*T) exceeds 2^20");
    const auto total = static_cast<std::uint64_t>(std::llround(size));
    MistakeCurve curve(Provenance::ExactEnumeration, n, horizon, model.states().prior, 0);
    Workspace ws(*this);
    std::vector<std::size_t> digits(cells);
    for (StateIndex state = 0; state < model.num_states(); ++state) {
        for (std::uint64_t code = 0; code < total; ++code) {
            auto rest = code;
            double weight = 1.0;
            for (std::size_t c = 0; c < cells; ++c) {
                digits[c] = rest % base;
                rest /= base;
                weight *= model.pmf(c % n, state, digits[c]);
            }
            if (weight == 0.0) continue;
            play(
                *this, ws,
                [&](std::size_t i, std::size_t t) {
                    return CellDraw{digits[(t - 1) * n + i], 0.0};
                },
                [&](std::size_t i, std::size_t t, Action a, bool) {
                    if (a.state != state) curve.probability(state, i, t) += weight;
                });
        }
    }
    return curve;
}

std::vector<std::vector<bool>> run_trajectory(const SimConfig& config, StateIndex state,
                                              std::uint64_t replication) {
    const Simulator sim(config);
    const auto tr = sim.run(state, replication);
    const auto n = config.model.n_agents();
    std::vector<std::vector<bool>> out(n, std::vector<bool>(config.horizon));
    for (std::size_t t = 0; t < config.horizon; ++t)
        for (std::size_t i = 0; i < n; ++i) out[i][t] = tr.mistakes[t][i];
    return out;
}

MistakeCurve mistake_curve(const SimConfig& config) {
    return Simulator(config).mistake_curve(worker_count());
}

MistakeCurve enumerate_exact(const SimConfig& config) { return Simulator(config).enumerate_exact(); }

MistakeCurve exact_autarky_curve(const SignalModel& model, std::size_t horizon) {
    if (model.family() != Family::BinarySymmetric)
        throw UnsupportedError("exact_autarky_curve: requires the binary symmetric family");
    const auto& prior = model.states().prior;
    if (prior.size() != 2 || prior[0] != prior[1])
        throw UnsupportedError("exact_autarky_curve: requires a uniform prior");
    MistakeCurve curve(Provenance::ExactBinomial, model.n_agents(), horizon, prior, 0);
    const double p = model.p();
    for (std::size_t t = 1; t <= horizon; ++t) {
        const auto tt = static_cast<std::int64_t>(t);
        // Ties favour the lower-indexed state.
        const double lower = binomial_cdf(tt, (tt + 1) / 2 - 1, p);
        const double upper = binomial_cdf(tt, tt / 2, p);
        for (std::size_t i = 0; i < model.n_agents(); ++i) {
            curve.probability(0, i, t) = lower;
            curve.probability(1, i, t) = upper;
        }
    }
    return curve;
}

RateFit fit_log_linear(const std::vector<std::size_t>& periods, const std::vector<double>& probs) {
    RateFit fit;
    fit.points = periods.size();
    if (periods.size() < 3) return fit;
    const double count = static_cast<double>(periods.size());
    double mean_t = 0.0, mean_y = 0.0;
    for (std::size_t k = 0; k < periods.size(); ++k) {
        mean_t += static_cast<double>(periods[k]);
        mean_y += -std::log(probs[k]);
    }
    mean_t /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < periods.size(); ++k) {
        const double dt = static_cast<double>(periods[k]) - mean_t;
        sxx += dt * dt;
        sxy += dt * (-std::log(probs[k]) - mean_y);
    }
    fit.rate = sxy / sxx;
    double sse = 0.0;
    for (std::size_t k = 0; k < periods.size(); ++k) {
        const double resid = -std::log(probs[k]) - mean_y -
                             fit.rate * (static_cast<double>(periods[k]) - mean_t);
        sse += resid * resid;
    }
    fit.standard_error = std::sqrt(sse / (count - 2.0) / sxx);
    fit.usable = true;
    return fit;
}

RateFit fit_rate(const MistakeCurve& curve, std::size_t agent, std::size_t first,
                 std::size_t last) {
    std::vector<std::size_t> periods;
    std::vector<double> probs;
    last = std::min(last, curve.horizon());
    for (std::size_t t = std::max<std::size_t>(first, 1); t <= last; ++t) {
        const double p = curve.estimate(agent, t);
        if (!(p > 0.0)) continue;
        if (!curve.exact() && curve.total_mistakes(agent, t) < kMinMistakesForFit) continue;
        periods.push_back(t);
        probs.push_back(p);
    }
    return fit_log_linear(periods, probs);
}

}  // namespace ratebound

#include "ratebound/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ratebound/errors.hpp"
#include "ratebound/rng.hpp"

namespace ratebound {

StateIndex StateSpace::index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvalidPairError("unknown state label '" + label + "'");
    return static_cast<StateIndex>(it - labels.begin());
}

StateIndex StateSpace::most_likely() const {
    StateIndex best = 0;
    for (StateIndex f = 1; f < prior.size(); ++f)
        if (prior[f] > prior[best]) best = f;
    return best;
}

StateSpace StateSpace::uniform(std::vector<std::string> labels) {
    const auto k = labels.size();
    return StateSpace{std::move(labels), std::vector<double>(k, k ? 1.0 / k : 0.0)};
}

const char* family_name(Family f) {
    switch (f) {
        case Family::BinarySymmetric: return "binary_symmetric";
        case Family::Finite: return "finite";
        case Family::Gaussian: return "gaussian";
    }
    return "unknown";
}

SignalModel SignalModel::binary_symmetric(double p, std::size_t n_agents,
                                          std::vector<double> prior,
                                          std::vector<std::string> labels) {
    SignalModel m;
    m.family_ = Family::BinarySymmetric;
    m.states_.labels = labels.empty() ? std::vector<std::string>{"f", "g"} : std::move(labels);
    m.states_.prior = prior.empty() ? std::vector<double>{0.5, 0.5} : std::move(prior);
    m.n_agents_ = n_agents;
    m.p_ = p;
    m.support_.clear();
    for (const auto& l : m.states_.labels) m.support_.push_back("s_" + l);
    m.pmf_.assign(n_agents, {{p, 1.0 - p}, {1.0 - p, p}});
    return m;
}

SignalModel SignalModel::finite(StateSpace states, std::vector<std::string> support,
                                std::vector<std::vector<std::vector<double>>> pmf) {
    SignalModel m;
    m.family_ = Family::Finite;
    m.states_ = std::move(states);
    m.n_agents_ = pmf.size();
    m.support_ = std::move(support);
    m.pmf_ = std::move(pmf);
    return m;
}

SignalModel SignalModel::finite_iid(StateSpace states, std::vector<std::string> support,
                                    std::vector<std::vector<double>> pmf,
                                    std::size_t n_agents) {
    return finite(std::move(states), std::move(support),
                  std::vector<std::vector<std::vector<double>>>(n_agents, pmf));
}

SignalModel SignalModel::gaussian(StateSpace states, std::vector<std::vector<double>> mean,
                                  std::vector<double> sigma) {
    SignalModel m;
    m.family_ = Family::Gaussian;
    m.states_ = std::move(states);
    m.n_agents_ = mean.size();
    m.mean_ = std::move(mean);
    m.sigma_ = std::move(sigma);
    return m;
}

SignalModel SignalModel::gaussian_iid(StateSpace states, std::vector<double> mean,
                                      double sigma, std::size_t n_agents) {
    const auto k = states.size();
    return gaussian(std::move(states),
                    std::vector<std::vector<double>>(n_agents, std::move(mean)),
                    std::vector<double>(k, sigma));
}

bool SignalModel::agents_identical() const {
    if (is_discrete())
        return std::all_of(pmf_.begin(), pmf_.end(),
                           [&](const auto& a) { return a == pmf_.front(); });
    return std::all_of(mean_.begin(), mean_.end(),
                       [&](const auto& a) { return a == mean_.front(); });
}

namespace {

void validate_states(const StateSpace& s, std::vector<std::string>& out) {
    if (s.size() < 2) out.push_back("states: at least 2 states required");
    if (s.prior.size() != s.size()) {
        out.push_back("prior: length must equal the number of states");
        return;
    }
    double total = 0.0;
    for (double q : s.prior) {
        if (!(q > 0.0) || !std::isfinite(q)) {
            out.push_back("prior: entries must be strictly positive (full support)");
            break;
        }
    }
    for (double q : s.prior) total += q;
    if (std::abs(total - 1.0) > 1e-12) out.push_back("prior: must sum to 1");
    auto sorted = s.labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        out.push_back("states: labels must be distinct");
}

std::string agent_tag(std::size_t i) { return "agent " + std::to_string(i) + ": "; }

void validate_discrete(const SignalModel& m, std::vector<std::string>& out) {
    const auto k = m.num_states();
    const auto ns = m.support_size();
    if (ns < 2) out.push_back("support: at least 2 signals required");
    for (std::size_t i = 0; i < m.n_agents(); ++i) {
        bool shape_ok = m.pmf_table()[i].size() == k;
        if (!shape_ok) out.push_back(agent_tag(i) + "pmf needs one row per state");
        for (std::size_t f = 0; f < k && shape_ok; ++f) {
            const auto& row = m.pmf_row(i, f);
            if (row.size() != ns) {
                out.push_back(agent_tag(i) + "pmf length must equal support size");
                shape_ok = false;
                break;
            }
            double total = 0.0;
            for (double q : row) {
                if (!(q >= 0.0) || !std::isfinite(q)) {
                    out.push_back(agent_tag(i) + "pmf entries must be nonnegative");
                    shape_ok = false;
                }
                total += q;
            }
            if (std::abs(total - 1.0) > 1e-9)
                out.push_back(agent_tag(i) + "pmf for state " + m.states().labels[f] +
                              " must sum to 1");
        }
        if (!shape_ok) continue;
        bool supports_match = true;
        for (std::size_t f = 1; f < k; ++f)
            for (std::size_t s = 0; s < ns; ++s)
                if ((m.pmf(i, f, s) > 0.0) != (m.pmf(i, 0, s) > 0.0)) supports_match = false;
        if (!supports_match) {
            out.push_back(agent_tag(i) + "supports differ: absolute continuity fails");
            continue;
        }
        for (std::size_t f = 0; f < k; ++f)
            for (std::size_t g = f + 1; g < k; ++g) {
                bool differs = false;
                for (std::size_t s = 0; s < ns; ++s)
                    if (m.pmf(i, f, s) > 0.0 &&
                        std::abs(std::log(m.pmf(i, f, s)) - std::log(m.pmf(i, g, s))) > 0.0)
                        differs = true;
                if (!differs)
                    out.push_back(agent_tag(i) + "LLR identically zero for states " +
                                  m.states().labels[f] + "," + m.states().labels[g]);
            }
    }
}

}  // namespace

ValidationReport validate(const SignalModel& m) {
    ValidationReport r;
    auto& out = r.violations;
    validate_states(m.states(), out);
    if (m.n_agents() < 1) out.push_back("n_agents: must be positive");
    switch (m.family()) {
        case Family::BinarySymmetric:
            if (m.num_states() != 2) out.push_back("states: binary_symmetric requires exactly 2 states");
            if (!(m.p() > 0.5 && m.p() < 1.0)) out.push_back("p must lie in (1/2,1)");
            break;
        case Family::Finite:
            validate_discrete(m, out);
            break;
        case Family::Gaussian: {
            const auto& sig = m.sigmas();
            if (sig.size() != m.num_states()) {
                out.push_back("sigma: one value per state required");
            } else {
                for (double s : sig)
                    if (!(s > 0.0) || !std::isfinite(s)) {
                        out.push_back("sigma must be positive");
                        break;
                    }
                if (std::any_of(sig.begin(), sig.end(), [&](double s) { return s != sig.front(); }))
                    out.push_back("sigma: unequal variances across states give an infinite CGF");
            }
            for (std::size_t i = 0; i < m.n_agents(); ++i) {
                if (m.mean_table()[i].size() != m.num_states()) {
                    out.push_back(agent_tag(i) + "mean needs one value per state");
                    continue;
                }
                bool finite = true;
                for (std::size_t f = 0; f < m.num_states(); ++f)
                    if (!std::isfinite(m.mean(i, f))) finite = false;
                if (!finite) {
                    out.push_back(agent_tag(i) + "means must be finite");
                    continue;
                }
                for (std::size_t f = 0; f < m.num_states(); ++f)
                    for (std::size_t g = f + 1; g < m.num_states(); ++g)
                        if (m.mean(i, f) == m.mean(i, g))
                            out.push_back(agent_tag(i) + "LLR identically zero for states " +
                                          m.states().labels[f] + "," + m.states().labels[g]);
            }
            break;
        }
    }
    return r;
}

void require_admissible(const SignalModel& model) {
    auto report = validate(model);
    if (!report.ok()) throw ConfigError(std::move(report.violations));
}

double llr(const SignalModel& m, std::size_t agent, StateIndex f, StateIndex g,
           const Signal& s) {
    if (f == g) throw InvalidPairError("llr: states must differ");
    if (f >= m.num_states() || g >= m.num_states())
        throw InvalidPairError("llr: state index out of range");
    if (agent >= m.n_agents()) throw InvalidPairError("llr: agent index out of range");
    if (m.is_discrete()) {
        const auto* label = std::get_if<std::size_t>(&s);
        if (label == nullptr) throw InvalidSignalError("llr: discrete model needs a label");
        if (*label >= m.support_size() || !(m.pmf(agent, f, *label) > 0.0))
            throw InvalidSignalError("llr: signal outside support");
        // Computed for f<g and negated otherwise so antisymmetry is exact.
        const auto lo = std::min(f, g), hi = std::max(f, g);
        const double v = std::log(m.pmf(agent, lo, *label)) - std::log(m.pmf(agent, hi, *label));
        return f < g ? v : -v;
    }
    const auto* value = std::get_if<double>(&s);
    if (value == nullptr) throw InvalidSignalError("llr: gaussian model needs a real value");
    const auto lo = std::min(f, g), hi = std::max(f, g);
    const double a = m.mean(agent, lo), b = m.mean(agent, hi), sg = m.sigma();
    const double v = (a - b) * (*value - 0.5 * (a + b)) / (sg * sg);
    return f < g ? v : -v;
}

SignalSampler::SignalSampler(const SignalModel& model)
    : discrete_(model.is_discrete()), states_(model.num_states()) {
    const auto n = model.n_agents();
    if (discrete_) {
        cdf_.resize(n * states_);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < states_; ++f) {
                auto& c = cdf_[i * states_ + f];
                const auto& row = model.pmf_row(i, f);
                c.resize(row.size());
                std::partial_sum(row.begin(), row.end(), c.begin());
                // Last positive-mass signal absorbs rounding at the top end.
                for (std::size_t s = row.size(); s-- > 0;)
                    if (row[s] > 0.0) {
                        for (std::size_t t = s; t < row.size(); ++t) c[t] = 1.0;
                        break;
                    }
            }
    } else {
        mean_.resize(n * states_);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < states_; ++f) mean_[i * states_ + f] = model.mean(i, f);
        sigma_ = model.sigma();
    }
}

CellDraw SignalSampler::draw(StateIndex state, std::size_t agent, std::uint64_t seed,
                             std::uint64_t replication, std::size_t period) const {
    const auto bits = draw_bits({seed, static_cast<std::uint32_t>(state), replication,
                                 static_cast<std::uint32_t>(agent),
                                 static_cast<std::uint32_t>(period)});
    CellDraw d;
    if (discrete_) {
        const auto& c = cdf_[agent * states_ + state];
        const double u = to_unit(bits[0], bits[1]);
        std::size_t s = 0;
        // Zero-mass labels share a cdf value with their predecessor and are skipped.
        while (s + 1 < c.size() && u >= c[s]) ++s;
        d.label = s;
    } else {
        d.value = mean_[agent * states_ + state] + sigma_ * to_standard_normal(bits);
    }
    return d;
}

std::vector<std::vector<SignalDraw>> sample_profile(const SignalModel& model,
                                                    StateIndex state,
                                                    std::size_t period_count,
                                                    std::uint64_t seed) {
    if (state >= model.num_states()) throw InvalidPairError("sample_profile: invalid state");
    const SignalSampler sampler(model);
    std::vector<std::vector<SignalDraw>> out(model.n_agents());
    parallel_for(model.n_agents(), worker_count(), [&](std::size_t i) {
        auto& row = out[i];
        row.resize(period_count);
        for (std::size_t t = 1; t <= period_count; ++t) {
            const auto d = sampler.draw(state, i, seed, 0, t);
            row[t - 1].agent = i;
            row[t - 1].period = t;
            if (model.is_discrete())
                row[t - 1].value = d.label;
            else
                row[t - 1].value = d.value;
        }
    });
    return out;
}

}  // namespace ratebound

// States, signal distributions and per-signal log-likelihood ratios.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ratebound {

using StateIndex = std::size_t;

struct StateSpace {
    std::vector<std::string> labels;
    std::vector<double> prior;

    std::size_t size() const { return labels.size(); }
    // Throws InvalidPairError for unknown labels.
    StateIndex index_of(const std::string& label) const;
    // Lowest-indexed state of maximal prior probability.
    StateIndex most_likely() const;

    static StateSpace uniform(std::vector<std::string> labels);
    bool operator==(const StateSpace&) const = default;
};

enum class Family { BinarySymmetric, Finite, Gaussian };

const char* family_name(Family f);

// A signal realisation: a label index for discrete families, a real for
// the Gaussian family.
using Signal = std::variant<std::size_t, double>;

struct SignalDraw {
    std::size_t agent = 0;
    std::size_t period = 0;  // 1-based
    Signal value;
};

// Conditionally independent (across agents and periods) signal model.
//
// Discrete families keep the full pmf table; BinarySymmetric is stored as a
// two-signal Finite table where signal k "matches" state k.
class SignalModel {
public:
    static SignalModel binary_symmetric(double p, std::size_t n_agents,
                                        std::vector<double> prior = {},
                                        std::vector<std::string> labels = {});
    // pmf[agent][state][signal]
    static SignalModel finite(StateSpace states, std::vector<std::string> support,
                              std::vector<std::vector<std::vector<double>>> pmf);
    // Same pmf for every agent.
    static SignalModel finite_iid(StateSpace states, std::vector<std::string> support,
                                  std::vector<std::vector<double>> pmf,
                                  std::size_t n_agents);
    // mean[agent][state]; sigma[state] (must all be equal to be admissible).
    static SignalModel gaussian(StateSpace states,
                                std::vector<std::vector<double>> mean,
                                std::vector<double> sigma);
    static SignalModel gaussian_iid(StateSpace states, std::vector<double> mean,
                                    double sigma, std::size_t n_agents);

    Family family() const { return family_; }
    bool is_discrete() const { return family_ != Family::Gaussian; }
    const StateSpace& states() const { return states_; }
    std::size_t num_states() const { return states_.size(); }
    std::size_t n_agents() const { return n_agents_; }

    // BinarySymmetric only.
    double p() const { return p_; }

    // Discrete families.
    const std::vector<std::string>& support() const { return support_; }
    std::size_t support_size() const { return support_.size(); }
    double pmf(std::size_t agent, StateIndex state, std::size_t signal) const {
        return pmf_[agent][state][signal];
    }
    const std::vector<double>& pmf_row(std::size_t agent, StateIndex state) const {
        return pmf_[agent][state];
    }
    const std::vector<std::vector<std::vector<double>>>& pmf_table() const { return pmf_; }

    // Gaussian family.
    double mean(std::size_t agent, StateIndex state) const { return mean_[agent][state]; }
    const std::vector<std::vector<double>>& mean_table() const { return mean_; }
    double sigma() const { return sigma_.empty() ? 0.0 : sigma_.front(); }
    const std::vector<double>& sigmas() const { return sigma_; }

    // Signals correlated across agents are outside the supported regime;
    // the flag exists so such models can be rejected explicitly.
    bool correlated() const { return correlated_; }
    void set_correlated(bool c) { correlated_ = c; }

    // True when every agent has the same marginal distributions.
    bool agents_identical() const;

    bool operator==(const SignalModel&) const = default;

private:
    Family family_ = Family::Finite;
    StateSpace states_;
    std::size_t n_agents_ = 0;
    double p_ = 0.0;
    std::vector<std::string> support_;
    std::vector<std::vector<std::vector<double>>> pmf_;
    std::vector<std::vector<double>> mean_;
    std::vector<double> sigma_;
    bool correlated_ = false;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Lists every violated admissibility condition.
ValidationReport validate(const SignalModel& model);
// Throws ConfigError when validate() reports anything.
void require_admissible(const SignalModel& model);

// log dmu_f/dmu_g (s) for the given agent.
double llr(const SignalModel& model, std::size_t agent, StateIndex f, StateIndex g,
           const Signal& s);

// Agents x periods matrix of draws under `state`, reproducible from `seed`
// irrespective of the worker count.
std::vector<std::vector<SignalDraw>> sample_profile(const SignalModel& model,
                                                    StateIndex state,
                                                    std::size_t period_count,
                                                    std::uint64_t seed);

// Draws single (state, agent, period) cells; the building block shared by
// sample_profile and the simulator. Discrete models yield a label index,
// Gaussian models a real value.
struct CellDraw {
    std::size_t label = 0;
    double value = 0.0;
};

class SignalSampler {
public:
    explicit SignalSampler(const SignalModel& model);

    CellDraw draw(StateIndex state, std::size_t agent, std::uint64_t seed,
                  std::uint64_t replication, std::size_t period) const;

private:
    bool discrete_;
    std::size_t states_;
    // cdf_[agent * states + state][signal], last entry forced to 1.
    std::vector<std::vector<double>> cdf_;
    std::vector<double> mean_;  // agent * states + state
    double sigma_ = 0.0;
};

}  // namespace ratebound

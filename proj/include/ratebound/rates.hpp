// Learning-rate constants computed from a signal model.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ratebound/network.hpp"
#include "ratebound/signal_models.hpp"

namespace ratebound {

using StatePair = std::pair<StateIndex, StateIndex>;

// Best rate of a single agent acting alone: min over ordered pairs of
// lambda*_{f,g}(0).
double autarky_rate(const SignalModel& model, std::size_t agent);

struct MinMax {
    double value = 0.0;
    StatePair pair{0, 1};
    std::size_t agent = 0;
};

// min over ordered pairs of max over agents of table[pair][agent], where
// pairs are enumerated as ordered_pairs(k). Ties go to the lexicographically
// smallest (pair, agent).
MinMax min_over_pairs_max_over_agents(std::size_t num_states,
                                      const std::vector<std::vector<double>>& table);

std::vector<StatePair> ordered_pairs(std::size_t num_states);

// min_{f!=g} max_i E_f[l^i_{f,g}], with the attaining pair and agent.
MinMax bounded_rate(const SignalModel& model);

// 2 min_{f!=g} max_i sup_s |l^i_{f,g}(s)|; nullopt when the LLR is unbounded.
std::optional<double> weak_bounded_rate(const SignalModel& model);

struct NeighborhoodRate {
    double exact = 0.0;        // min_{f!=g} max_i sum_{j in N^i} E_f[l^j_{f,g}]
    double delta_bound = 0.0;  // max_i |N^i| * r_bdd
};
NeighborhoodRate neighborhood_bounded_rate(const SignalModel& model, const Network& net);

// min_{f!=g} m_{f,g} for an agent (the admissible ceiling for delta).
double min_mean_llr(const SignalModel& model, std::size_t agent = 0);

// Default coordination slack: a tenth of min_{f!=g} m_{f,g}.
double default_delta(const SignalModel& model);

// Smallest n with n >= 2 min lambda*_{f,g}(-m_{g,f}+delta) /
// min lambda*_{f,g}(m_{f,g}-delta). Valid for the complete-network argument;
// requires identically distributed agents and 0 < delta < min m_{f,g}.
std::int64_t coordination_threshold(const SignalModel& model, double delta);

// min_{f!=g} lambda*_{f,g}(-m_{g,f}+delta): the rate the coordination strategy
// guarantees on its decisive branch.
double coordinated_rate(const SignalModel& model, double delta);

struct RateReport {
    std::vector<double> r_aut;
    double r_bdd = 0.0;
    std::optional<double> r_tilde_bdd;
    StatePair argmin_pair{0, 1};
    std::size_t argmax_agent = 0;
};
RateReport rate_report(const SignalModel& model);

struct SweepRow {
    double q = 0.0;
    double raut = 0.0;
    double rmaj = 0.0;
};

// One row per p for the binary symmetric example.
std::vector<SweepRow> sweep_figure1(const std::vector<double>& p_grid);

// Inclusive evenly spaced grid; a single point yields {from}.
std::vector<double> linear_grid(double from, double to, std::size_t points);

}  // namespace ratebound

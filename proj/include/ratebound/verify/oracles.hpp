// Brute-force reference computations. Each one works straight from the model
// definition and shares no code path with the routine it checks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ratebound/network.hpp"
#include "ratebound/signal_models.hpp"

namespace ratebound::oracle {

// (llr value, probability under f) for every positive-mass signal, computed
// from the raw pmf.
struct Atom {
    double llr;
    double prob;
};
std::vector<Atom> llr_atoms(const SignalModel& model, std::size_t agent, StateIndex f,
                            StateIndex g);

// log sum_s p_s exp(z l_s) without any shifting.
double direct_cgf(const std::vector<Atom>& atoms, double z);

// sup over z in [lo, hi] on a uniform grid of the given step.
double grid_conjugate(const std::vector<Atom>& atoms, double eta, double lo = -30.0,
                      double hi = 30.0, double step = 1e-4);

// Central difference of direct_cgf.
double finite_difference_cgf(const std::vector<Atom>& atoms, double z, double h = 1e-5);

// P[Bin(n,q) <= k] with binomial coefficients built multiplicatively.
double binomial_cdf_direct(int n, int k, double q);

std::vector<std::vector<std::size_t>> floyd_warshall(const Network& net);

// Mistake probability of a maximum-likelihood agent in autarky (binary
// symmetric signals, uniform prior, ties to the first state) by listing all
// 2^t signal sequences.
double autarky_mistake_bruteforce(double p, int t);

// Exact per-agent, per-period mistake probabilities of the coordination rule
// on a complete network with binary symmetric signals, written directly from
// the rule: result[state][agent][t-1].
std::vector<std::vector<std::vector<double>>> coordination_bruteforce(double p, std::size_t n,
                                                                      std::size_t horizon,
                                                                      double delta);

// Random finite model with full-support pmfs, for property checks.
SignalModel random_finite_model(std::uint64_t seed, std::size_t max_states = 4,
                                std::size_t max_signals = 5, std::size_t agents = 1);

}  // namespace ratebound::oracle

// Large-deviations numerics for one-period log-likelihood ratios: cumulant
// generating functions, their Fenchel-Legendre transforms, mean LLRs and the
// Bernoulli KL / binomial Chernoff tail bound.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ratebound/signal_models.hpp"

namespace ratebound {

enum class Boundary { None, Lower, Upper };

struct ConjugateResult {
    double eta = 0.0;
    double value = 0.0;
    double argmax_z = 0.0;  // +-inf when the supremum is approached at a boundary
    Boundary boundary = Boundary::None;
    bool converged = false;
    int iterations = 0;
};

// The law of l_{f,g} = log dmu_f/dmu_g under state f, for one agent.
//
// lambda(z) = log E_f[exp(z l)] is finite everywhere for admissible models;
// lambda(0) = lambda(-1) = 0.
class PairKernel {
public:
    PairKernel(const SignalModel& model, std::size_t agent, StateIndex f, StateIndex g);

    StateIndex f() const { return f_; }
    StateIndex g() const { return g_; }
    std::size_t agent() const { return agent_; }
    bool gaussian() const { return gaussian_; }

    double mean() const { return mean_; }
    // Essential range of l under f; +-inf for Gaussian models.
    double inf_llr() const { return inf_; }
    double sup_llr() const { return sup_; }

    double cgf(double z) const;
    // Analytic lambda'(z) = E[l e^{zl}] / E[e^{zl}].
    double cgf_derivative(double z) const;
    double cgf_second_derivative(double z) const;

    ConjugateResult legendre(double eta) const;

    // Atoms (llr value, probability under f) for discrete models.
    struct Atom {
        double llr;
        double prob;
    };
    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    // Weighted moments of the tilted law at z, each scaled by exp(-shift).
    struct Moments {
        double m0, m1, m2;
    };
    Moments tilted(double z) const;

    std::size_t agent_;
    StateIndex f_, g_;
    bool gaussian_ = false;
    std::vector<Atom> atoms_;
    double mean_ = 0.0;
    double variance_ = 0.0;  // Gaussian family
    double inf_ = 0.0, sup_ = 0.0;
    double prob_inf_ = 0.0, prob_sup_ = 0.0;
};

// Convenience free functions mirroring the kernel members.
double cgf(const PairKernel& k, double z);
ConjugateResult legendre(const PairKernel& k, double eta);
double mean_llr(const PairKernel& k);

// D(a||b) for Bernoulli laws with 0 log 0 = 0. Returns +inf when b is 0 or 1
// and a differs from b.
double kl_bernoulli(double a, double b);

// Chernoff bound exp(-n D(k/n || q)) on P[Bin(n,q) <= k]; requires k/n <= q.
double binomial_tail_bound(std::int64_t n, std::int64_t k, double q);

// P[Bin(n,q) <= k], summed in log space.
double binomial_cdf(std::int64_t n, std::int64_t k, double q);

}  // namespace ratebound

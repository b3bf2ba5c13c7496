#include "ratebound/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ratebound/errors.hpp"

namespace ratebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTolerance = 1e-9;
constexpr int kIterationCap = 200;
constexpr double kBracketLimit = 1e12;

}  // namespace

PairKernel::PairKernel(const SignalModel& model, std::size_t agent, StateIndex f, StateIndex g)
    : agent_(agent), f_(f), g_(g) {
    if (f == g) throw InvalidPairError("PairKernel: states must differ");
    if (f >= model.num_states() || g >= model.num_states())
        throw InvalidPairError("PairKernel: state index out of range");
    if (agent >= model.n_agents()) throw InvalidPairError("PairKernel: agent out of range");
    if (model.is_discrete()) {
        for (std::size_t s = 0; s < model.support_size(); ++s) {
            const double q = model.pmf(agent, f, s);
            if (q > 0.0) atoms_.push_back({llr(model, agent, f, g, s), q});
        }
        if (atoms_.empty()) throw DomainError("PairKernel: empty support");
        inf_ = kInf;
        sup_ = -kInf;
        for (const auto& a : atoms_) {
            mean_ += a.prob * a.llr;
            inf_ = std::min(inf_, a.llr);
            sup_ = std::max(sup_, a.llr);
        }
        for (const auto& a : atoms_) {
            if (a.llr == inf_) prob_inf_ += a.prob;
            if (a.llr == sup_) prob_sup_ += a.prob;
        }
    } else {
        gaussian_ = true;
        const double d = (model.mean(agent, f) - model.mean(agent, g)) / model.sigma();
        mean_ = 0.5 * d * d;
        variance_ = d * d;
        inf_ = -kInf;
        sup_ = kInf;
    }
}

PairKernel::Moments PairKernel::tilted(double z) const {
    double shift = -kInf;
    for (const auto& a : atoms_) shift = std::max(shift, z * a.llr);
    Moments m{0.0, 0.0, 0.0};
    for (const auto& a : atoms_) {
        const double w = a.prob * std::exp(z * a.llr - shift);
        m.m0 += w;
        m.m1 += w * a.llr;
        m.m2 += w * a.llr * a.llr;
    }
    return m;
}

double PairKernel::cgf(double z) const {
    if (gaussian_) return mean_ * z + 0.5 * variance_ * z * z;
    double shift = -kInf;
    for (const auto& a : atoms_) shift = std::max(shift, z * a.llr);
    double total = 0.0;
    for (const auto& a : atoms_) total += a.prob * std::exp(z * a.llr - shift);
    return shift + std::log(total);
}

double PairKernel::cgf_derivative(double z) const {
    if (gaussian_) return mean_ + variance_ * z;
    const auto m = tilted(z);
    return m.m1 / m.m0;
}

double PairKernel::cgf_second_derivative(double z) const {
    if (gaussian_) return variance_;
    const auto m = tilted(z);
    const double mu = m.m1 / m.m0;
    return std::max(0.0, m.m2 / m.m0 - mu * mu);
}

ConjugateResult PairKernel::legendre(double eta) const {
    ConjugateResult r;
    r.eta = eta;
    if (gaussian_) {
        const double z = (eta - mean_) / variance_;
        r.argmax_z = z;
        r.value = (eta - mean_) * (eta - mean_) / (2.0 * variance_);
        r.converged = true;
        return r;
    }
    const double scale = std::max({1.0, std::abs(inf_), std::abs(sup_)});
    const double edge_tol = 1e-12 * scale;
    if (eta >= sup_ - edge_tol) {
        r.boundary = Boundary::Upper;
        r.argmax_z = kInf;
        r.value = eta > sup_ + edge_tol ? kInf : -std::log(prob_sup_);
        r.converged = true;
        return r;
    }
    if (eta <= inf_ + edge_tol) {
        r.boundary = Boundary::Lower;
        r.argmax_z = -kInf;
        r.value = eta < inf_ - edge_tol ? kInf : -std::log(prob_inf_);
        r.converged = true;
        return r;
    }

    const auto h = [&](double z) { return cgf_derivative(z) - eta; };
    double lo = -1.0, hi = 1.0;
    double h_lo = h(lo), h_hi = h(hi);
    while (h_lo > 0.0) {
        hi = lo;
        h_hi = h_lo;
        lo *= 2.0;
        if (lo < -kBracketLimit) throw ConvergenceError("legendre: bracket growth failed", lo, hi);
        h_lo = h(lo);
    }
    while (h_hi < 0.0) {
        lo = hi;
        h_lo = h_hi;
        hi *= 2.0;
        if (hi > kBracketLimit) throw ConvergenceError("legendre: bracket growth failed", lo, hi);
        h_hi = h(hi);
    }

    // Safeguarded Newton on the strictly increasing lambda'.
    double z = (std::abs(h_lo) < std::abs(h_hi)) ? lo : hi;
    double hz = (z == lo) ? h_lo : h_hi;
    for (int it = 1; it <= kIterationCap; ++it) {
        r.iterations = it;
        if (std::abs(hz) <= kRootTolerance) {
            r.converged = true;
            break;
        }
        if (hz < 0.0)
            lo = z;
        else
            hi = z;
        const double slope = cgf_second_derivative(z);
        double next = slope > 0.0 ? z - hz / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == z) {
            // Bracket collapsed to adjacent doubles.
            r.converged = std::abs(hz) <= 1e3 * kRootTolerance;
            break;
        }
        z = next;
        hz = h(z);
    }
    if (!r.converged)
        throw ConvergenceError("legendre: no convergence within iteration cap", lo, hi);
    r.argmax_z = z;
    r.value = std::max(0.0, eta * z - cgf(z));
    return r;
}

double cgf(const PairKernel& k, double z) { return k.cgf(z); }
ConjugateResult legendre(const PairKernel& k, double eta) { return k.legendre(eta); }
double mean_llr(const PairKernel& k) { return k.mean(); }

double kl_bernoulli(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("kl_bernoulli: a must lie in [0,1]");
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("kl_bernoulli: b must lie in [0,1]");
    if (a == b) return 0.0;
    if (b == 0.0 || b == 1.0) return kInf;
    double d = 0.0;
    if (a > 0.0) d += a * std::log(a / b);
    if (a < 1.0) d += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return std::max(0.0, d);
}

double binomial_tail_bound(std::int64_t n, std::int64_t k, double q) {
    if (n < 1 || k < 0 || k > n)
        throw DomainError("binomial_tail_bound: need 0 <= k <= n and n >= 1");
    const double a = static_cast<double>(k) / static_cast<double>(n);
    if (a > q)
        throw DomainError("binomial_tail_bound: k/n must not exceed q (left tail only)");
    return std::exp(-static_cast<double>(n) * kl_bernoulli(a, q));
}

double binomial_cdf(std::int64_t n, std::int64_t k, double q) {
    if (n < 0) throw DomainError("binomial_cdf: n must be nonnegative");
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (q <= 0.0) return 1.0;
    if (q >= 1.0) return 0.0;
    const double lq = std::log(q), l1q = std::log1p(-q);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(k) + 1);
    double top = -kInf;
    for (std::int64_t j = 0; j <= k; ++j) {
        const double v = lgn - std::lgamma(static_cast<double>(j) + 1.0) -
                         std::lgamma(static_cast<double>(n - j) + 1.0) +
                         static_cast<double>(j) * lq + static_cast<double>(n - j) * l1q;
        logs.push_back(v);
        top = std::max(top, v);
    }
    double total = 0.0;
    for (double v : logs) total += std::exp(v - top);
    return std::min(1.0, std::exp(top) * total);
}

}  // namespace ratebound

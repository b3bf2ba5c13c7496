#include "ratebound/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratebound/rng.hpp"

namespace ratebound::oracle {

std::vector<Atom> llr_atoms(const SignalModel& model, std::size_t agent, StateIndex f,
                            StateIndex g) {
    std::vector<Atom> atoms;
    for (std::size_t s = 0; s < model.support_size(); ++s) {
        const double pf = model.pmf(agent, f, s), pg = model.pmf(agent, g, s);
        if (pf > 0.0) atoms.push_back({std::log(pf / pg), pf});
    }
    return atoms;
}

double direct_cgf(const std::vector<Atom>& atoms, double z) {
    double total = 0.0;
    for (const auto& a : atoms) total += a.prob * std::exp(z * a.llr);
    return std::log(total);
}

double grid_conjugate(const std::vector<Atom>& atoms, double eta, double lo, double hi,
                      double step) {
    const auto points = static_cast<std::int64_t>(std::llround((hi - lo) / step));
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= points; ++k) {
        const double z = lo + static_cast<double>(k) * step;
        best = std::max(best, eta * z - direct_cgf(atoms, z));
    }
    return best;
}

double finite_difference_cgf(const std::vector<Atom>& atoms, double z, double h) {
    return (direct_cgf(atoms, z + h) - direct_cgf(atoms, z - h)) / (2.0 * h);
}

double binomial_cdf_direct(int n, int k, double q) {
    double total = 0.0;
    for (int j = 0; j <= std::min(k, n); ++j) {
        double c = 1.0;
        for (int r = 1; r <= j; ++r) c = c * static_cast<double>(n - j + r) / static_cast<double>(r);
        total += c * std::pow(q, j) * std::pow(1.0 - q, n - j);
    }
    return total;
}

std::vector<std::vector<std::size_t>> floyd_warshall(const Network& net) {
    const auto n = net.size();
    const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (auto j : net.neighborhood(i))
            if (j != i) d[i][j] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

double autarky_mistake_bruteforce(double p, int t) {
    double total = 0.0;
    for (int truth = 0; truth < 2; ++truth)
        for (std::uint32_t code = 0; code < (1u << t); ++code) {
            int matching = 0;
            for (int r = 0; r < t; ++r) matching += ((code >> r) & 1u) ? 1 : 0;
            const double w = std::pow(p, matching) * std::pow(1.0 - p, t - matching);
            // Signals favouring state 0 under this truth.
            const int favour0 = truth == 0 ? matching : t - matching;
            const int chosen = (2 * favour0 >= t) ? 0 : 1;
            if (chosen != truth) total += 0.5 * w;
        }
    return total;
}

std::vector<std::vector<std::vector<double>>> coordination_bruteforce(double p, std::size_t n,
                                                                      std::size_t horizon,
                                                                      double delta) {
    const double c = std::log(p / (1.0 - p));
    const double m = (2.0 * p - 1.0) * c;
    const double threshold = m - delta;
    const std::size_t cells = n * horizon;
    std::vector<std::vector<std::vector<double>>> out(
        2, std::vector<std::vector<double>>(n, std::vector<double>(horizon, 0.0)));
    for (int truth = 0; truth < 2; ++truth)
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << cells); ++code) {
            // bit (t*n + i) set: agent i's signal in period t+1 matches the truth.
            double w = 1.0;
            for (std::size_t cell = 0; cell < cells; ++cell)
                w *= ((code >> cell) & 1u) ? p : 1.0 - p;
            std::vector<int> favour0(n, 0);  // signals pointing at state 0
            std::vector<int> prev(n, 0);
            for (std::size_t t = 1; t <= horizon; ++t) {
                std::vector<int> now(n, 0);
                int votes0 = 0;
                for (auto a : prev) votes0 += a == 0 ? 1 : 0;
                const int popular = (2 * votes0 >= static_cast<int>(n)) ? 0 : 1;
                for (std::size_t i = 0; i < n; ++i) {
                    const bool match = (code >> ((t - 1) * n + i)) & 1u;
                    const bool points0 = (truth == 0) == match;
                    favour0[i] += points0 ? 1 : 0;
                    const double L01 = c * (2.0 * favour0[i] - static_cast<double>(t));
                    int action;
                    if (t == 1)
                        action = 0;
                    else if (L01 >= threshold * static_cast<double>(t))
                        action = 0;
                    else if (-L01 >= threshold * static_cast<double>(t))
                        action = 1;
                    else
                        action = popular;
                    now[i] = action;
                    if (action != truth) out[truth][i][t - 1] += w;
                }
                prev = now;
            }
        }
    return out;
}

SignalModel random_finite_model(std::uint64_t seed, std::size_t max_states,
                                std::size_t max_signals, std::size_t agents) {
    CounterStream rng(seed, 77);
    const auto k = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_states)));
    const auto s = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_signals)));
    std::vector<std::string> labels, support;
    for (std::size_t f = 0; f < k; ++f) labels.push_back("w" + std::to_string(f));
    for (std::size_t x = 0; x < s; ++x) support.push_back("s" + std::to_string(x));
    std::vector<std::vector<std::vector<double>>> pmf(agents);
    for (auto& per_agent : pmf)
        for (std::size_t f = 0; f < k; ++f) {
            std::vector<double> row(s);
            double total = 0.0;
            for (auto& v : row) {
                v = 0.05 + rng.uniform();
                total += v;
            }
            for (auto& v : row) v /= total;
            per_agent.push_back(row);
        }
    return SignalModel::finite(StateSpace::uniform(labels), support, pmf);
}

}  // namespace ratebound::oracle

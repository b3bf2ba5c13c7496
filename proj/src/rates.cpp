#include "ratebound/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratebound/errors.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rng.hpp"

namespace ratebound {

std::vector<StatePair> ordered_pairs(std::size_t num_states) {
    std::vector<StatePair> out;
    for (StateIndex f = 0; f < num_states; ++f)
        for (StateIndex g = 0; g < num_states; ++g)
            if (f != g) out.emplace_back(f, g);
    return out;
}

double autarky_rate(const SignalModel& model, std::size_t agent) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [f, g] : ordered_pairs(model.num_states()))
        best = std::min(best, PairKernel(model, agent, f, g).legendre(0.0).value);
    return best;
}

MinMax min_over_pairs_max_over_agents(std::size_t num_states,
                                      const std::vector<std::vector<double>>& table) {
    const auto pairs = ordered_pairs(num_states);
    if (table.size() != pairs.size()) throw DomainError("min-max: one row per ordered pair");
    MinMax best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& row = table[p];
        if (row.empty()) throw DomainError("min-max: empty agent row");
        std::size_t arg = 0;
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] > row[arg]) arg = i;
        if (row[arg] < best.value) {
            best.value = row[arg];
            best.pair = pairs[p];
            best.agent = arg;
        }
    }
    return best;
}

namespace {

std::vector<std::vector<double>> mean_table(const SignalModel& model) {
    std::vector<std::vector<double>> table;
    for (const auto& [f, g] : ordered_pairs(model.num_states())) {
        auto& row = table.emplace_back();
        for (std::size_t i = 0; i < model.n_agents(); ++i)
            row.push_back(PairKernel(model, i, f, g).mean());
    }
    return table;
}

}  // namespace

MinMax bounded_rate(const SignalModel& model) {
    return min_over_pairs_max_over_agents(model.num_states(), mean_table(model));
}

std::optional<double> weak_bounded_rate(const SignalModel& model) {
    if (!model.is_discrete()) return std::nullopt;
    std::vector<std::vector<double>> table;
    for (const auto& [f, g] : ordered_pairs(model.num_states())) {
        auto& row = table.emplace_back();
        for (std::size_t i = 0; i < model.n_agents(); ++i) {
            const PairKernel k(model, i, f, g);
            row.push_back(std::max(std::abs(k.inf_llr()), std::abs(k.sup_llr())));
        }
    }
    return 2.0 * min_over_pairs_max_over_agents(model.num_states(), table).value;
}

NeighborhoodRate neighborhood_bounded_rate(const SignalModel& model, const Network& net) {
    if (model.correlated())
        throw UnsupportedError(
            "neighborhood_bounded_rate: requires signals conditionally independent across agents");
    if (net.size() != model.n_agents())
        throw DomainError("neighborhood_bounded_rate: network size differs from n_agents");
    const auto means = mean_table(model);
    std::vector<std::vector<double>> sums;
    for (const auto& row : means) {
        auto& out = sums.emplace_back();
        for (std::size_t i = 0; i < net.size(); ++i) {
            double s = 0.0;
            for (auto j : net.neighborhood(i)) s += row[j];
            out.push_back(s);
        }
    }
    NeighborhoodRate r;
    r.exact = min_over_pairs_max_over_agents(model.num_states(), sums).value;
    r.delta_bound = static_cast<double>(net.max_neighborhood()) *
                    min_over_pairs_max_over_agents(model.num_states(), means).value;
    return r;
}

double min_mean_llr(const SignalModel& model, std::size_t agent) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [f, g] : ordered_pairs(model.num_states()))
        best = std::min(best, PairKernel(model, agent, f, g).mean());
    return best;
}

double default_delta(const SignalModel& model) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.n_agents(); ++i) best = std::min(best, min_mean_llr(model, i));
    return 0.1 * best;
}

namespace {

void check_delta(const SignalModel& model, double delta) {
    if (!model.agents_identical())
        throw UnsupportedError("coordination threshold: agents must be identically distributed");
    const double ceiling = min_mean_llr(model, 0);
    if (!(delta > 0.0 && delta < ceiling))
        throw DomainError("delta must lie in (0, min m_{f,g}) = (0, " + std::to_string(ceiling) +
                          ")");
}

}  // namespace

double coordinated_rate(const SignalModel& model, double delta) {
    check_delta(model, delta);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [f, g] : ordered_pairs(model.num_states())) {
        const double m_gf = PairKernel(model, 0, g, f).mean();
        best = std::min(best, PairKernel(model, 0, f, g).legendre(-m_gf + delta).value);
    }
    return best;
}

std::int64_t coordination_threshold(const SignalModel& model, double delta) {
    const double numerator = coordinated_rate(model, delta);
    double denominator = std::numeric_limits<double>::infinity();
    for (const auto& [f, g] : ordered_pairs(model.num_states())) {
        const PairKernel k(model, 0, f, g);
        denominator = std::min(denominator, k.legendre(k.mean() - delta).value);
    }
    if (!(denominator > 0.0))
        throw DomainError("coordination threshold: delta too close to min m_{f,g}");
    const double ratio = std::ceil(2.0 * numerator / denominator);
    if (!(ratio < 9.0e18)) throw DomainError("coordination threshold: overflow");
    return static_cast<std::int64_t>(ratio);
}

RateReport rate_report(const SignalModel& model) {
    RateReport r;
    for (std::size_t i = 0; i < model.n_agents(); ++i) r.r_aut.push_back(autarky_rate(model, i));
    const auto b = bounded_rate(model);
    r.r_bdd = b.value;
    r.argmin_pair = b.pair;
    r.argmax_agent = b.agent;
    r.r_tilde_bdd = weak_bounded_rate(model);
    return r;
}

std::vector<SweepRow> sweep_figure1(const std::vector<double>& p_grid) {
    for (double p : p_grid)
        if (!(p > 0.5 && p < 1.0)) throw DomainError("sweep: p must lie in (1/2,1)");
    std::vector<SweepRow> rows(p_grid.size());
    parallel_for(p_grid.size(), worker_count(), [&](std::size_t idx) {
        const auto model = SignalModel::binary_symmetric(p_grid[idx], 1);
        rows[idx] = {p_grid[idx], autarky_rate(model, 0), bounded_rate(model).value};
    });
    return rows;
}

std::vector<double> linear_grid(double from, double to, std::size_t points) {
    std::vector<double> grid;
    if (points == 0) return grid;
    if (points == 1) return {from};
    grid.reserve(points);
    const double step = (to - from) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid.push_back(i + 1 == points ? to : from + step * static_cast<double>(i));
    return grid;
}

}  // namespace ratebound

#include "ratebound/verify/acceptance.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ratebound/io.hpp"
#include "ratebound/ldp.hpp"
#include "ratebound/rates.hpp"
#include "ratebound/rng.hpp"
#include "ratebound/sim_engine.hpp"
#include "ratebound/verify/oracles.hpp"

namespace ratebound::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// Collects sub-check outcomes; the first failures are kept for the report.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        ++total_;
        if (!ok) {
            ++failed_;
            if (failures_.size() < 4) failures_.push_back(what);
        }
    }
    bool ok() const { return failed_ == 0; }
    std::string summary(const std::string& extra) const {
        std::ostringstream s;
        s << (total_ - failed_) << "/" << total_ << " checks";
        if (!extra.empty()) s << "; " << extra;
        for (const auto& f : failures_) s << "; FAIL " << f;
        return s.str();
    }

private:
    int total_ = 0, failed_ = 0;
    std::vector<std::string> failures_;
};

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

template <class Body>
CriterionResult timed(int id, std::string name, double budget, Body&& body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.budget_seconds = budget;
    const auto start = Clock::now();
    Checks checks;
    std::string extra;
    try {
        extra = body(checks);
    } catch (const std::exception& e) {
        checks.expect(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    checks.expect(r.seconds < budget, "runtime " + fmt(r.seconds, 3) + " s over budget");
    r.passed = checks.ok();
    r.detail = checks.summary(extra);
    return r;
}

SimConfig binary_config(double p, std::size_t n, const StrategySpec& spec, std::size_t horizon,
                        std::uint64_t reps, std::uint64_t seed) {
    SimConfig c;
    c.model = SignalModel::binary_symmetric(p, n);
    c.network = Network::complete(n);
    c.profile = StrategyProfile::uniform(spec, n);
    c.horizon = horizon;
    c.replications = reps;
    c.seed = seed;
    return c;
}

}  // namespace

CriterionResult figure1_reproduction() {
    return timed(1, "Binary sweep reproduction", 5.0, [](Checks& c) {
        const auto single = sweep_figure1({0.75});
        c.expect(std::abs(single[0].raut - 0.143841) <= 0.001, "raut(0.75)=" + fmt(single[0].raut));
        c.expect(std::abs(single[0].rmaj - 0.549306) <= 1e-6, "rmaj(0.75)=" + fmt(single[0].rmaj));
        const auto grid = linear_grid(0.51, 0.99, 200);
        const auto rows = sweep_figure1(grid);
        c.expect(rows.size() == 200, "row count");
        double worst_rmaj = 0.0, worst_raut = 0.0;
        for (const auto& row : rows) {
            const double closed = (2.0 * row.q - 1.0) * std::log(row.q / (1.0 - row.q));
            worst_rmaj = std::max(worst_rmaj, std::abs(row.rmaj - closed));
            const auto model = SignalModel::binary_symmetric(row.q, 1);
            const double grid_value = oracle::grid_conjugate(oracle::llr_atoms(model, 0, 0, 1), 0.0);
            worst_raut = std::max(worst_raut, std::abs(row.raut - grid_value));
        }
        c.expect(worst_rmaj <= 1e-9, "rmaj closed-form error " + fmt(worst_rmaj));
        c.expect(worst_raut <= 1e-6, "raut grid-oracle error " + fmt(worst_raut));
        return "raut(0.75)=" + fmt(single[0].raut) + " rmaj(0.75)=" + fmt(single[0].rmaj) +
               " max|rmaj-closed|=" + fmt(worst_rmaj, 3) + " max|raut-grid|=" + fmt(worst_raut, 3);
    });
}

CriterionResult conjugate_identities() {
    return timed(2, "Conjugate identities", 10.0, [](Checks& c) {
        double worst_swap = 0.0, worst_mean = 0.0, worst_deriv = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto model = oracle::random_finite_model(1000 + seed);
            CounterStream rng(seed, 5);
            for (StateIndex f = 0; f < model.num_states(); ++f)
                for (StateIndex g = 0; g < model.num_states(); ++g) {
                    if (f == g) continue;
                    const PairKernel fg(model, 0, f, g), gf(model, 0, g, f);
                    for (int k = 1; k <= 50; ++k) {
                        const double eta = fg.inf_llr() + (fg.sup_llr() - fg.inf_llr()) * k / 51.0;
                        const double lhs = fg.legendre(eta).value;
                        const double rhs = gf.legendre(-eta).value - eta;
                        worst_swap = std::max(worst_swap, std::abs(lhs - rhs));
                    }
                    worst_mean = std::max(worst_mean, std::abs(fg.legendre(fg.mean()).value));
                    c.expect(fg.legendre(0.0).value < fg.mean() - 1e-10,
                             "strict gap seed " + std::to_string(seed));
                    const auto atoms = oracle::llr_atoms(model, 0, f, g);
                    for (int k = 0; k < 10; ++k) {
                        const double z = -3.0 + 6.0 * rng.uniform();
                        worst_deriv = std::max(worst_deriv, std::abs(fg.cgf_derivative(z) -
                                                                     oracle::finite_difference_cgf(atoms, z)));
                    }
                }
        }
        c.expect(worst_swap <= 1e-8, "state-swap error " + fmt(worst_swap));
        c.expect(worst_mean <= 1e-10, "lambda*(m) error " + fmt(worst_mean));
        c.expect(worst_deriv <= 1e-6, "derivative error " + fmt(worst_deriv));
        return "max swap err=" + fmt(worst_swap, 3) + " max |lambda*(m)|=" + fmt(worst_mean, 3) +
               " max derivative err=" + fmt(worst_deriv, 3);
    });
}

CriterionResult autarky_exactness() {
    return timed(3, "Autarky exactness", 60.0, [](Checks& c) {
        const auto model = SignalModel::binary_symmetric(0.75, 1);
        double worst_enum = 0.0;
        for (std::size_t horizon = 1; horizon <= 12; ++horizon) {
            const auto exact = exact_autarky_curve(model, horizon);
            const auto brute = enumerate_exact(binary_config(0.75, 1, AutarkyMl{}, horizon, 1, 0));
            for (std::size_t t = 1; t <= horizon; ++t)
                worst_enum = std::max(worst_enum, std::abs(exact.estimate(0, t) - brute.estimate(0, t)));
        }
        c.expect(worst_enum <= 1e-12, "binomial vs enumeration " + fmt(worst_enum));

        const std::size_t horizon = 12;
        const auto exact = exact_autarky_curve(model, horizon);
        const auto mc = mistake_curve(binary_config(0.75, 1, AutarkyMl{}, horizon, 100000, 20251));
        int within = 0;
        for (std::size_t t = 1; t <= horizon; ++t)
            if (std::abs(mc.estimate(0, t) - exact.estimate(0, t)) <= 3.0 * mc.standard_error(0, t))
                ++within;
        c.expect(within >= static_cast<int>(std::ceil(0.95 * horizon)),
                 "MC within 3 SE on " + std::to_string(within) + "/12");

        const auto long_curve = exact_autarky_curve(model, 120);
        const auto fit = fit_rate(long_curve, 0, 40, 120);
        const double r_aut = autarky_rate(model, 0);
        c.expect(fit.usable && std::abs(fit.rate - r_aut) <= 0.10 * r_aut,
                 "fitted " + fmt(fit.rate) + " vs " + fmt(r_aut));
        return "max|binomial-enum|=" + fmt(worst_enum, 3) + " MC cells within 3SE=" +
               std::to_string(within) + "/12 fitted rate=" + fmt(fit.rate);
    });
}

CriterionResult schedule_correctness() {
    return timed(4, "Schedule correctness", 5.0, [](Checks& c) {
        int certified = 0;
        for (std::uint64_t g = 0; g < 100; ++g) {
            CounterStream rng(g, 9);
            const auto n = static_cast<std::size_t>(rng.uniform_int(3, 12));
            const double p = 0.1 + 0.4 * rng.uniform();
            const auto net = Network::erdos_renyi_strongly_connected(n, p, 7000 + g);
            const auto schedule = build_schedule(net);
            check_schedule_integrity(net, schedule);
            const auto known = replay_knowledge(net, schedule);
            bool full = true;
            for (const auto& row : known)
                for (bool k : row) full = full && k;
            c.expect(full, "graph " + std::to_string(g) + " incomplete knowledge");
            certified += full ? 1 : 0;
        }
        return std::to_string(certified) + "/100 graphs certified";
    });
}

CriterionResult coordination_dominance() {
    return timed(5, "Coordination dominance (n=50)", 600.0, [](Checks& c) {
        const auto config = binary_config(0.75, 50, CoordinationComplete{0.05}, 30, 1000000, 50);
        const auto curve = mistake_curve(config);
        const auto autarky = exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1), 30);
        double worst_ratio = 0.0;
        for (std::size_t t = 15; t <= 30; ++t) {
            const double coord = curve.agent_average(t), aut = autarky.estimate(0, t);
            c.expect(coord < aut, "t=" + std::to_string(t) + " " + fmt(coord) + " >= " + fmt(aut));
            worst_ratio = std::max(worst_ratio, coord / aut);
        }
        return "max coordination/autarky ratio on [15,30]=" + fmt(worst_ratio, 3) +
               " (t=15: " + fmt(curve.agent_average(15), 3) + " vs " + fmt(autarky.estimate(0, 15), 3) + ")";
    });
}

CriterionResult small_instance_bruteforce() {
    return timed(6, "Small-instance brute force (n=2,T=3)", 30.0, [](Checks& c) {
        const auto config = binary_config(0.75, 2, CoordinationComplete{0.05}, 3, 100000, 66);
        const auto exact = enumerate_exact(config);
        const auto mc = mistake_curve(config);
        int cells = 0, within = 0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t t = 1; t <= 3; ++t) {
                ++cells;
                // 1e-12 absorbs rounding in the exact weight sums where SE is 0.
                const bool ok = std::abs(mc.estimate(i, t) - exact.estimate(i, t)) <=
                                3.0 * mc.standard_error(i, t) + 1e-12;
                c.expect(ok, "agent " + std::to_string(i) + " t=" + std::to_string(t));
                within += ok ? 1 : 0;
            }
        return std::to_string(within) + "/" + std::to_string(cells) + " cells within 3 SE";
    });
}

CriterionResult bounded_rate_consistency() {
    return timed(7, "Bounded-rate consistency (n=10)", 300.0, [](Checks& c) {
        const double r_bdd = bounded_rate(SignalModel::binary_symmetric(0.75, 10)).value;
        const std::vector<StrategySpec> profiles{AutarkyMl{}, CoordinationComplete{0.05},
                                                 CoordinationConnected{0.05}, OddEven{},
                                                 ConstantAction{0}};
        std::string summary;
        for (const auto& spec : profiles) {
            const auto curve = mistake_curve(binary_config(0.75, 10, spec, 40, 200000, 77));
            std::optional<double> min_rate;
            double worst_odd = 0.0;
            for (std::size_t i = 0; i < 10; ++i) {
                const auto fit = fit_rate(curve, i, 5, 40);
                if (!fit.usable) continue;
                min_rate = min_rate ? std::min(*min_rate, fit.rate) : fit.rate;
                if (std::holds_alternative<OddEven>(spec) && is_odd_numbered(i)) {
                    worst_odd = std::max(worst_odd, std::abs(fit.rate));
                    c.expect(std::abs(fit.rate) <= 0.01, "odd agent rate " + fmt(fit.rate));
                }
            }
            const auto name = strategy_name(spec);
            c.expect(min_rate.has_value(), name + ": no usable fit");
            if (min_rate) c.expect(*min_rate <= r_bdd + 0.10, name + " min rate " + fmt(*min_rate));
            summary += name + "=" + (min_rate ? fmt(*min_rate, 3) : std::string("n/a")) + " ";
            if (std::holds_alternative<OddEven>(spec)) summary += "(odd max|rate|=" + fmt(worst_odd, 2) + ") ";
        }
        return "min fitted rates: " + summary + "bound=" + fmt(r_bdd + 0.10, 4);
    });
}

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

CriterionResult determinism(const std::string& cli_path) {
    return timed(8, "Determinism across runs and thread counts", 120.0, [&](Checks& c) {
        namespace fs = std::filesystem;
        if (cli_path.empty() || !fs::exists(cli_path))
            throw std::runtime_error("CLI executable not found: " + cli_path);
        const auto dir = fs::temp_directory_path() / ("ratebound_det_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        auto model = SignalModel::binary_symmetric(0.75, 4);
        write_text_file(dir / "model.json", model_to_json(model).dump(2) + "\n");
        Json cfg{{"model", "model.json"},
                 {"network", {{"generator", "cycle"}, {"n", 4}}},
                 {"strategy", "coordination_connected"},
                 {"delta", 0.05},
                 {"horizon", 12},
                 {"replications", 5000},
                 {"seed", 4242}};
        write_text_file(dir / "config.json", cfg.dump(2) + "\n");
        const std::vector<std::pair<std::string, std::string>> commands{
            {"sweep", "sweep --from 0.51 --to 0.99 --points 200 --out {out}"},
            {"show", "rates show --model " + (dir / "model.json").string() + " > {out}"},
            {"simulate", "simulate --config " + (dir / "config.json").string() + " --out {out}"},
            {"fit", "fit --curve {dir}/simulate_1.csv --window 2:12 > {out}"},
            {"schedule", "schedule --generator cycle:6 > {out}"},
        };
        int identical = 0;
        for (const auto& [name, tmpl] : commands) {
            std::vector<std::string> outputs;
            for (int threads : {1, 3, 1}) {
                const auto out = dir / (name + "_" + std::to_string(outputs.size() + 1) + ".csv");
                std::string cmd = tmpl;
                for (std::size_t pos; (pos = cmd.find("{out}")) != std::string::npos;)
                    cmd.replace(pos, 5, out.string());
                for (std::size_t pos; (pos = cmd.find("{dir}")) != std::string::npos;)
                    cmd.replace(pos, 5, dir.string());
                const auto full = "RATEBOUND_THREADS=" + std::to_string(threads) + " '" + cli_path +
                                  "' " + cmd;
                const int rc = std::system(full.c_str());
                c.expect(rc == 0, name + " exited with " + std::to_string(rc));
                outputs.push_back(slurp(out));
            }
            const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2];
            c.expect(same, name + " outputs differ");
            identical += same ? 1 : 0;
        }
        fs::remove_all(dir);
        return std::to_string(identical) + "/" + std::to_string(commands.size()) +
               " commands byte-identical over threads {1,3,1}";
    });
}

bool run_all(const Options& options, const std::function<void(const CriterionResult&)>& report) {
    bool all = true;
    const auto record = [&](const CriterionResult& r) {
        all = all && r.passed;
        report(r);
    };
    record(figure1_reproduction());
    record(conjugate_identities());
    record(autarky_exactness());
    record(schedule_correctness());
    if (!options.skip_heavy) record(coordination_dominance());
    record(small_instance_bruteforce());
    if (!options.skip_heavy) record(bounded_rate_consistency());
    record(determinism(options.cli_path));
    return all;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << " ["
      << fmt(r.seconds, 3) << " s / budget " << fmt(r.budget_seconds, 3) << " s] " << r.detail;
    return s.str();
}

}  // namespace ratebound::acceptance

// ratebound: learning-rate constants, strategy simulation and verification.
//
// Exit codes: 0 ok, 1 invalid input, 2 runtime failure, 3 verify failure.

#include <unistd.h>

#include <climits>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ratebound/errors.hpp"
#include "ratebound/io.hpp"
#include "ratebound/rates.hpp"
#include "ratebound/rng.hpp"
#include "ratebound/sim_engine.hpp"
#include "ratebound/verify/acceptance.hpp"

using namespace ratebound;

namespace {

constexpr int kOk = 0, kInvalid = 1, kRuntime = 2, kVerifyFailed = 3;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << text << std::flush;
    else
        write_text_file(out, text);
}

std::pair<std::size_t, std::size_t> parse_window(const std::string& w) {
    const auto colon = w.find(':');
    if (colon == std::string::npos) throw ConfigError({"window: expected a:b, got '" + w + "'"});
    std::size_t a = 0, b = 0;
    try {
        a = std::stoul(w.substr(0, colon));
        b = std::stoul(w.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError({"window: expected a:b with integer periods, got '" + w + "'"});
    }
    if (a < 1 || b < a) throw ConfigError({"window: need 1 <= a <= b, got '" + w + "'"});
    return {a, b};
}

std::string self_path(const char* argv0) {
    char buf[PATH_MAX];
    const ssize_t len = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (len > 0) return std::string(buf, static_cast<std::size_t>(len));
    return argv0;
}

struct SweepArgs {
    double from = 0.51, to = 0.99;
    std::size_t points = 200;
    std::string out;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
    cmd->add_option("--from", a.from, "first p of the grid")->capture_default_str();
    cmd->add_option("--to", a.to, "last p of the grid")->capture_default_str();
    cmd->add_option("--points", a.points, "number of grid points")->capture_default_str();
    cmd->add_option("--out", a.out, "CSV destination (stdout when omitted)");
}

void run_sweep(const SweepArgs& a) {
    if (!(a.from > 0.5 && a.to < 1.0 && a.from <= a.to))
        throw ConfigError({"grid: need 1/2 < from <= to < 1"});
    const auto rows = sweep_figure1(linear_grid(a.from, a.to, a.points));
    if (a.out.empty())
        std::cout << sweep_csv(rows);
    else
        emit_sweep_csv(rows, a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning-rate constants and strategy simulations for social learning on networks"};
    app.require_subcommand(1);

    auto* rates = app.add_subcommand("rates", "rate constants of a signal model");
    rates->require_subcommand(1);
    std::string model_path, rates_out, show_network;
    std::optional<double> show_delta;
    auto* show = rates->add_subcommand("show", "print the rate report of a model as JSON");
    show->add_option("--model", model_path, "model JSON file")->required();
    show->add_option("--network", show_network,
                     "network JSON file or generator spec; adds the neighborhood bound");
    show->add_option("--delta", show_delta,
                     "adds the coordination threshold and guaranteed rate for this delta");
    show->add_option("--out", rates_out, "destination (stdout when omitted)");
    SweepArgs sweep_args;
    auto* rates_sweep = rates->add_subcommand("sweep", "binary symmetric sweep of raut and rmaj");
    add_sweep_options(rates_sweep, sweep_args);

    auto* sweep = app.add_subcommand("sweep", "same as `rates sweep`");
    add_sweep_options(sweep, sweep_args);

    std::string config_path, sim_out;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo mistake curve of a configuration");
    simulate->add_option("--config", config_path, "run configuration JSON")->required();
    simulate->add_option("--out", sim_out, "curve CSV destination (overrides the config)");

    std::string curve_path, window = "1:0", fit_model, fit_out;
    auto* fit = app.add_subcommand("fit", "fit decay rates to a mistake curve");
    fit->add_option("--curve", curve_path, "curve CSV written by simulate")->required();
    fit->add_option("--window", window, "period window a:b")->required();
    fit->add_option("--model", fit_model, "model JSON supplying the state prior");
    fit->add_option("--out", fit_out, "destination (stdout when omitted)");

    std::string net_path, generator, sched_out;
    auto* schedule = app.add_subcommand("schedule", "propagation schedule of a strongly connected network");
    auto* net_opt = schedule->add_option("--network", net_path, "network JSON file");
    schedule->add_option("--generator", generator, "complete:N, cycle:N, star:N or er:N:P[:SEED]")
        ->excludes(net_opt);
    schedule->add_option("--out", sched_out, "destination (stdout when omitted)");

    bool skip_heavy = false;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_flag("--skip-heavy", skip_heavy, "skip the two long simulation criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*show) {
            const auto model = load_model(model_path);
            auto j = rate_report_json(rate_report(model), model);
            if (!show_network.empty()) {
                const auto net = show_network.find(':') != std::string::npos
                                     ? network_from_generator(show_network)
                                     : load_network(show_network);
                const auto nb = neighborhood_bounded_rate(model, net);
                j["neighborhood_rate"] = {{"exact", nb.exact}, {"delta_bound", nb.delta_bound}};
            }
            if (show_delta) {
                j["coordination"] = {{"delta", *show_delta},
                                     {"n_threshold", coordination_threshold(model, *show_delta)},
                                     {"guaranteed_rate", coordinated_rate(model, *show_delta)}};
            }
            emit(j.dump(2) + "\n", rates_out);
        } else if (*rates_sweep || *sweep) {
            run_sweep(sweep_args);
        } else if (*simulate) {
            const auto config = parse_config(config_path);
            const auto curve = Simulator(config.sim).mistake_curve(worker_count());
            const auto out = sim_out.empty() ? config.curve_out : sim_out;
            emit(curve_csv(curve, config.sim.model.states()), out);
        } else if (*fit) {
            const auto [first, last] = parse_window(window);
            std::vector<double> prior;
            if (!fit_model.empty()) prior = load_model(fit_model).states().prior;
            const auto curve = read_curve_csv(curve_path, prior);
            emit(fit_report_json(curve, first, last).dump(2) + "\n", fit_out);
        } else if (*schedule) {
            if (net_path.empty() && generator.empty())
                throw ConfigError({"schedule: one of --network or --generator is required"});
            const auto net = net_path.empty() ? network_from_generator(generator) : load_network(net_path);
            const auto sched = build_schedule(net);
            emit(schedule_json(net, sched).dump(2) + "\n", sched_out);
        } else if (*verify) {
            acceptance::Options options;
            options.cli_path = self_path(argv[0]);
            options.skip_heavy = skip_heavy;
            const bool ok = acceptance::run_all(options, [](const acceptance::CriterionResult& r) {
                std::cout << acceptance::format_line(r) << std::endl;
            });
            std::cout << (ok ? "verify: all criteria passed" : "verify: FAILED") << std::endl;
            return ok ? kOk : kVerifyFailed;
        }
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "error: " << v << "\n";
        return kInvalid;
    } catch (const InvalidPairError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const InvalidSignalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const NotStronglyConnectedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}

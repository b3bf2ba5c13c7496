#include "ratebound/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ratebound/errors.hpp"

namespace ratebound {

namespace {

// Accumulates schema violations with their field paths.
class Diagnostics {
public:
    void add(const std::string& path, const std::string& msg) {
        errors_.push_back(path.empty() ? msg : path + ": " + msg);
    }
    bool ok() const { return errors_.empty(); }
    void raise() {
        if (!errors_.empty()) throw ConfigError(std::move(errors_));
    }
    void absorb(const std::string& prefix, const ConfigError& e) {
        for (const auto& v : e.violations()) errors_.push_back(prefix + v);
    }
    std::vector<std::string>& errors() { return errors_; }

private:
    std::vector<std::string> errors_;
};

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

std::optional<double> number_at(const Json& j, const std::string& key, const std::string& path,
                                Diagnostics& diag, bool required = true) {
    if (!j.contains(key)) {
        if (required) diag.add(join_path(path, key), "missing required field");
        return std::nullopt;
    }
    if (!j.at(key).is_number()) {
        diag.add(join_path(path, key), "must be a number");
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

std::optional<std::uint64_t> count_at(const Json& j, const std::string& key,
                                      const std::string& path, Diagnostics& diag,
                                      bool required = true) {
    if (!j.contains(key)) {
        if (required) diag.add(join_path(path, key), "missing required field");
        return std::nullopt;
    }
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    diag.add(join_path(path, key), "must be a nonnegative integer");
    return std::nullopt;
}

std::optional<std::vector<double>> numbers(const Json& v, const std::string& path,
                                           Diagnostics& diag) {
    if (!v.is_array()) {
        diag.add(path, "must be an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) {
            diag.add(path, "must be an array of numbers");
            return std::nullopt;
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::optional<std::vector<std::string>> strings(const Json& v, const std::string& path,
                                                Diagnostics& diag) {
    if (!v.is_array()) {
        diag.add(path, "must be an array of strings");
        return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) {
            diag.add(path, "must be an array of strings");
            return std::nullopt;
        }
        out.push_back(x.get<std::string>());
    }
    return out;
}

// Accepts a per-state matrix shared by all agents or one matrix per agent.
std::optional<std::vector<std::vector<std::vector<double>>>> pmf_tensor(
    const Json& v, std::size_t n_agents, const std::string& path, Diagnostics& diag) {
    std::vector<std::vector<std::vector<double>>> out;
    const auto matrix = [&](const Json& m, const std::string& p)
        -> std::optional<std::vector<std::vector<double>>> {
        if (!m.is_array()) {
            diag.add(p, "must be an array of probability vectors");
            return std::nullopt;
        }
        std::vector<std::vector<double>> rows;
        for (const auto& r : m) {
            auto row = numbers(r, p, diag);
            if (!row) return std::nullopt;
            rows.push_back(*row);
        }
        return rows;
    };
    if (!v.is_array() || v.empty()) {
        diag.add(path, "must be a non-empty array");
        return std::nullopt;
    }
    const bool per_agent = v.front().is_array() && !v.front().empty() &&
                           v.front().front().is_array();
    if (per_agent) {
        if (v.size() != n_agents) {
            diag.add(path, "per-agent pmf needs one entry per agent");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto m = matrix(v[i], path + "[" + std::to_string(i) + "]");
            if (!m) return std::nullopt;
            out.push_back(*m);
        }
    } else {
        auto m = matrix(v, path);
        if (!m) return std::nullopt;
        out.assign(n_agents, *m);
    }
    return out;
}

}  // namespace

SignalModel model_from_json(const Json& j) {
    Diagnostics diag;
    if (!j.is_object()) {
        diag.add("model", "must be an object");
        diag.raise();
    }
    const auto n_agents = count_at(j, "n_agents", "", diag);
    std::optional<std::vector<std::string>> labels;
    if (j.contains("states")) labels = strings(j.at("states"), "states", diag);
    std::optional<std::vector<double>> prior;
    if (j.contains("prior")) prior = numbers(j.at("prior"), "prior", diag);
    if (!j.contains("family") || !j.at("family").is_object()) {
        diag.add("family", "missing required object");
        diag.raise();
    }
    const auto& fam = j.at("family");
    const std::string type = fam.value("type", "");
    SignalModel model;
    const std::size_t n = n_agents.value_or(1);
    if (type == "binary_symmetric") {
        const auto p = number_at(fam, "p", "family", diag);
        if (labels && labels->size() != 2)
            diag.add("states", "binary_symmetric requires exactly 2 states");
        if (p && !(*p > 0.5 && *p < 1.0)) diag.add("family.p", "p must lie in (1/2,1)");
        diag.raise();
        model = SignalModel::binary_symmetric(*p, n, prior.value_or(std::vector<double>{}),
                                              labels.value_or(std::vector<std::string>{}));
    } else if (type == "finite") {
        if (!labels) diag.add("states", "missing required field");
        std::optional<std::vector<std::string>> support;
        if (fam.contains("support"))
            support = strings(fam.at("support"), "family.support", diag);
        else
            diag.add("family.support", "missing required field");
        std::optional<std::vector<std::vector<std::vector<double>>>> pmf;
        if (fam.contains("pmf"))
            pmf = pmf_tensor(fam.at("pmf"), n, "family.pmf", diag);
        else
            diag.add("family.pmf", "missing required field");
        diag.raise();
        StateSpace st = prior ? StateSpace{*labels, *prior} : StateSpace::uniform(*labels);
        model = SignalModel::finite(st, *support, *pmf);
    } else if (type == "gaussian") {
        if (!labels) diag.add("states", "missing required field");
        std::vector<std::vector<double>> means;
        if (!fam.contains("mean")) {
            diag.add("family.mean", "missing required field");
        } else if (fam.at("mean").is_array() && !fam.at("mean").empty() &&
                   fam.at("mean").front().is_array()) {
            for (std::size_t i = 0; i < fam.at("mean").size(); ++i)
                if (auto row = numbers(fam.at("mean")[i], "family.mean", diag)) means.push_back(*row);
            if (means.size() != n) diag.add("family.mean", "per-agent means need one row per agent");
        } else if (auto row = numbers(fam.at("mean"), "family.mean", diag)) {
            means.assign(n, *row);
        }
        std::vector<double> sigma;
        if (!fam.contains("sigma"))
            diag.add("family.sigma", "missing required field");
        else if (fam.at("sigma").is_number())
            sigma.assign(labels ? labels->size() : 0, fam.at("sigma").get<double>());
        else if (auto v = numbers(fam.at("sigma"), "family.sigma", diag))
            sigma = *v;
        diag.raise();
        StateSpace st = prior ? StateSpace{*labels, *prior} : StateSpace::uniform(*labels);
        model = SignalModel::gaussian(st, means, sigma);
    } else {
        diag.add("family.type", "must be one of binary_symmetric, finite, gaussian");
        diag.raise();
    }
    if (j.contains("correlated")) {
        if (!j.at("correlated").is_boolean())
            diag.add("correlated", "must be a boolean");
        else
            model.set_correlated(j.at("correlated").get<bool>());
    }
    for (const auto& v : validate(model).violations) diag.add("", v);
    diag.raise();
    return model;
}

Json model_to_json(const SignalModel& model) {
    Json j;
    j["states"] = model.states().labels;
    j["prior"] = model.states().prior;
    j["n_agents"] = model.n_agents();
    Json fam;
    fam["type"] = family_name(model.family());
    switch (model.family()) {
        case Family::BinarySymmetric:
            fam["p"] = model.p();
            break;
        case Family::Finite:
            fam["support"] = model.support();
            if (model.agents_identical() && model.n_agents() > 0)
                fam["pmf"] = model.pmf_table().front();
            else
                fam["pmf"] = model.pmf_table();
            break;
        case Family::Gaussian:
            if (model.agents_identical() && model.n_agents() > 0)
                fam["mean"] = model.mean_table().front();
            else
                fam["mean"] = model.mean_table();
            fam["sigma"] = model.sigmas();
            break;
    }
    j["family"] = fam;
    if (model.correlated()) j["correlated"] = true;
    return j;
}

Network network_from_json(const Json& j) {
    Diagnostics diag;
    if (!j.is_object()) {
        diag.add("network", "must be an object");
        diag.raise();
    }
    if (j.contains("generator")) {
        const auto n = count_at(j, "n", "network", diag);
        const std::string gen = j.at("generator").is_string() ? j.at("generator").get<std::string>() : "";
        diag.raise();
        if (gen == "complete") return Network::complete(*n);
        if (gen == "cycle") return Network::directed_cycle(*n);
        if (gen == "star") return Network::star(*n);
        if (gen == "erdos_renyi") {
            const auto p = number_at(j, "p", "network", diag);
            const auto seed = count_at(j, "seed", "network", diag, false);
            diag.raise();
            return Network::erdos_renyi_strongly_connected(*n, *p, seed.value_or(0));
        }
        diag.add("network.generator", "must be one of complete, cycle, star, erdos_renyi");
        diag.raise();
    }
    const auto n = count_at(j, "n", "network", diag);
    if (!j.contains("neighborhoods") || !j.at("neighborhoods").is_array()) {
        diag.add("network.neighborhoods", "missing required array");
        diag.raise();
    }
    const auto& nbs = j.at("neighborhoods");
    if (n && nbs.size() != *n) diag.add("network.neighborhoods", "needs one list per agent");
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < nbs.size(); ++i) {
        auto& row = out.emplace_back();
        const auto path = "network.neighborhoods[" + std::to_string(i) + "]";
        if (!nbs[i].is_array()) {
            diag.add(path, "must be an array of agent indices");
            continue;
        }
        for (const auto& v : nbs[i]) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
                static_cast<std::size_t>(v.get<std::int64_t>()) >= nbs.size()) {
                diag.add(path, "agent index out of range");
                continue;
            }
            row.push_back(static_cast<std::size_t>(v.get<std::int64_t>()));
        }
    }
    diag.raise();
    return Network(std::move(out));
}

Json network_to_json(const Network& net) {
    return Json{{"n", net.size()}, {"neighborhoods", net.neighborhoods()}};
}

Network network_from_generator(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    try {
        if (parts.size() == 2) {
            const auto n = static_cast<std::size_t>(std::stoul(parts[1]));
            if (parts[0] == "complete") return Network::complete(n);
            if (parts[0] == "cycle") return Network::directed_cycle(n);
            if (parts[0] == "star") return Network::star(n);
        }
        if ((parts.size() == 3 || parts.size() == 4) && parts[0] == "er")
            return Network::erdos_renyi_strongly_connected(
                static_cast<std::size_t>(std::stoul(parts[1])), std::stod(parts[2]),
                parts.size() == 4 ? std::stoull(parts[3]) : 0);
    } catch (const std::logic_error&) {
    }
    throw ConfigError({"network: unrecognised generator '" + spec +
                       "' (expected complete:N, cycle:N, star:N or er:N:P[:SEED])"});
}

StrategyProfile strategy_from_json(const Json& j, const SignalModel& model) {
    Diagnostics diag;
    if (!j.contains("strategy") || !j.at("strategy").is_string()) {
        diag.add("strategy", "missing required string");
        diag.raise();
    }
    const auto name = j.at("strategy").get<std::string>();
    const auto delta = number_at(j, "delta", "", diag, false);
    StrategySpec spec;
    if (name == "autarky") {
        spec = AutarkyMl{};
    } else if (name == "coordination") {
        spec = CoordinationComplete{delta ? delta : std::optional<double>(default_delta(model))};
    } else if (name == "coordination_connected") {
        spec = CoordinationConnected{delta ? delta : std::optional<double>(default_delta(model))};
    } else if (name == "odd_even") {
        spec = OddEven{};
    } else if (name == "constant") {
        StateIndex state = 0;
        if (j.contains("action")) {
            if (!j.at("action").is_string()) {
                diag.add("action", "must be a state label");
            } else {
                try {
                    state = model.states().index_of(j.at("action").get<std::string>());
                } catch (const Error& e) {
                    diag.add("action", e.what());
                }
            }
        }
        spec = ConstantAction{state};
    } else {
        diag.add("strategy",
                 "must be one of autarky, coordination, coordination_connected, odd_even, constant");
    }
    diag.raise();
    return StrategyProfile::uniform(spec, model.n_agents());
}

Json strategy_to_json(const StrategyProfile& profile, const SignalModel& model) {
    Json j;
    if (profile.per_agent.empty()) return j;
    const auto& spec = profile.per_agent.front();
    j["strategy"] = strategy_name(spec);
    if (const auto* c = std::get_if<CoordinationComplete>(&spec); c && c->delta) j["delta"] = *c->delta;
    if (const auto* c = std::get_if<CoordinationConnected>(&spec); c && c->delta) j["delta"] = *c->delta;
    if (const auto* c = std::get_if<ConstantAction>(&spec)) j["action"] = model.states().labels[c->state];
    return j;
}

bool RunConfig::operator==(const RunConfig& o) const {
    return sim.model == o.sim.model && sim.network == o.sim.network &&
           sim.profile == o.sim.profile && sim.horizon == o.sim.horizon &&
           sim.replications == o.sim.replications && sim.seed == o.sim.seed &&
           curve_out == o.curve_out;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError({path.string() + ": malformed JSON: " + e.what()});
    }
}

SignalModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

Network load_network(const std::filesystem::path& path) {
    return network_from_json(read_json_file(path));
}

RunConfig parse_config(const std::filesystem::path& path) {
    return parse_config_json(read_json_file(path), path.parent_path());
}

RunConfig parse_config_json(const Json& j, const std::filesystem::path& base_dir) {
    Diagnostics diag;
    if (!j.is_object()) {
        diag.add("", "config must be a JSON object");
        diag.raise();
    }
    static const std::set<std::string> known{"model", "network", "strategy", "delta",  "action",
                                             "horizon", "replications", "seed", "out"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) diag.add(key, "unknown field");
    // Sections may be inline objects or paths relative to the config file.
    const auto section = [&](const std::string& key) -> std::optional<Json> {
        if (!j.contains(key)) return std::nullopt;
        const auto& v = j.at(key);
        if (!v.is_string()) return v;
        const auto file = base_dir / v.get<std::string>();
        if (!std::filesystem::exists(file)) {
            diag.add(key, "referenced file does not exist: " + file.string());
            return std::nullopt;
        }
        try {
            return read_json_file(file);
        } catch (const ConfigError& e) {
            diag.absorb(key + ": ", e);
        } catch (const IoError& e) {
            diag.add(key, e.what());
        }
        return std::nullopt;
    };

    RunConfig rc;
    std::optional<SignalModel> model;
    if (auto mj = section("model")) {
        try {
            model = model_from_json(*mj);
        } catch (const ConfigError& e) {
            diag.absorb("model.", e);
        }
    } else if (!j.contains("model")) {
        diag.add("model", "missing required field");
    }

    std::optional<Network> net;
    if (auto nj = section("network")) {
        try {
            net = network_from_json(*nj);
        } catch (const ConfigError& e) {
            diag.absorb("", e);
        } catch (const Error& e) {
            diag.add("network", e.what());
        }
    } else if (!j.contains("network") && model) {
        net = Network::complete(model->n_agents());
    }

    const auto horizon = count_at(j, "horizon", "", diag, false);
    const auto reps = count_at(j, "replications", "", diag, false);
    const auto seed = count_at(j, "seed", "", diag, false);
    rc.sim.horizon = horizon.value_or(30);
    rc.sim.replications = reps.value_or(1000);
    rc.sim.seed = seed.value_or(0);
    if (horizon && *horizon < 1) diag.add("horizon", "must be at least 1");
    if (reps && *reps < 1) diag.add("replications", "must be at least 1");
    if (j.contains("out")) {
        if (j.at("out").is_string())
            rc.curve_out = j.at("out").get<std::string>();
        else
            diag.add("out", "must be a path string");
    }

    if (model) {
        try {
            rc.sim.profile = strategy_from_json(j, *model);
        } catch (const ConfigError& e) {
            diag.absorb("", e);
        }
    }
    if (!diag.ok()) diag.raise();

    rc.sim.model = *model;
    rc.sim.network = *net;
    for (const auto& v : config_violations(rc.sim)) diag.add("", v);
    diag.raise();
    return rc;
}

Json config_to_json(const RunConfig& config) {
    Json j = strategy_to_json(config.sim.profile, config.sim.model);
    j["model"] = model_to_json(config.sim.model);
    j["network"] = network_to_json(config.sim.network);
    j["horizon"] = config.sim.horizon;
    j["replications"] = config.sim.replications;
    j["seed"] = config.sim.seed;
    if (!config.curve_out.empty()) j["out"] = config.curve_out;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "q,raut,rmaj\n";
    char line[96];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", r.q, r.raut, r.rmaj);
        out += line;
    }
    return out;
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    write_text_file(path, sweep_csv(rows));
}

std::string curve_csv(const MistakeCurve& curve, const StateSpace& states) {
    if (curve.exact()) throw UnsupportedError("curve_csv: only Monte Carlo curves carry counts");
    std::ostringstream out;
    out << "agent,period,state,mistakes,trials\n";
    for (std::size_t i = 0; i < curve.agents(); ++i)
        for (std::size_t t = 1; t <= curve.horizon(); ++t)
            for (std::size_t f = 0; f < curve.states(); ++f)
                out << i << ',' << t << ',' << states.labels[f] << ',' << curve.mistakes(f, i, t)
                    << ',' << curve.trials() << '\n';
    return out.str();
}

MistakeCurve read_curve_csv(const std::filesystem::path& path, const std::vector<double>& prior,
                            std::vector<std::string>* labels_out) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "agent,period,state,mistakes,trials")
        throw ConfigError({path.string() + ": expected header agent,period,state,mistakes,trials"});
    struct Row {
        std::size_t agent, period, state;
        std::int64_t mistakes;
        std::uint64_t trials;
    };
    std::vector<Row> rows;
    std::vector<std::string> labels;
    std::size_t agents = 0, horizon = 0;
    std::optional<std::uint64_t> trials;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (cells.size() != 5) throw ConfigError({where + ": expected 5 columns"});
        Row r{};
        try {
            r.agent = std::stoul(cells[0]);
            r.period = std::stoul(cells[1]);
            r.mistakes = std::stoll(cells[3]);
            r.trials = std::stoull(cells[4]);
        } catch (const std::logic_error&) {
            throw ConfigError({where + ": malformed number"});
        }
        if (r.period < 1) throw ConfigError({where + ": periods are 1-based"});
        auto it = std::find(labels.begin(), labels.end(), cells[2]);
        if (it == labels.end()) {
            labels.push_back(cells[2]);
            it = labels.end() - 1;
        }
        r.state = static_cast<std::size_t>(it - labels.begin());
        if (trials && *trials != r.trials) throw ConfigError({where + ": trials must be constant"});
        trials = r.trials;
        agents = std::max(agents, r.agent + 1);
        horizon = std::max(horizon, r.period);
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError({path.string() + ": no data rows"});
    std::vector<double> weights = prior;
    if (weights.empty()) weights.assign(labels.size(), 1.0 / static_cast<double>(labels.size()));
    if (weights.size() != labels.size())
        throw ConfigError({path.string() + ": prior length differs from the number of states"});
    MistakeCurve curve(Provenance::MonteCarlo, agents, horizon, weights, *trials);
    for (const auto& r : rows) curve.mistakes(r.state, r.agent, r.period) = r.mistakes;
    if (labels_out) *labels_out = labels;
    return curve;
}

Json rate_report_json(const RateReport& report, const SignalModel& model) {
    Json j;
    j["r_aut"] = report.r_aut;
    j["r_bdd"] = report.r_bdd;
    if (report.r_tilde_bdd)
        j["r_tilde_bdd"] = *report.r_tilde_bdd;
    else
        j["r_tilde_bdd"] = "unbounded";
    j["argmin_pair"] = {model.states().labels[report.argmin_pair.first],
                        model.states().labels[report.argmin_pair.second]};
    j["argmax_agent"] = report.argmax_agent;
    return j;
}

Json schedule_json(const Network& net, const PropagationSchedule& schedule) {
    Json j;
    j["n"] = schedule.agents();
    j["block_length"] = schedule.block_length();
    Json offsets = Json::array();
    for (std::size_t o = 1; o < schedule.block_length(); ++o) {
        Json row = Json::array();
        for (std::size_t i = 0; i < schedule.agents(); ++i) {
            const auto& d = schedule.directive(o, i);
            if (d.kind == Directive::Kind::Repeat)
                row.push_back({{"agent", i}, {"action", "repeat"}});
            else
                row.push_back({{"agent", i},
                               {"action", "imitate"},
                               {"token", d.token},
                               {"source_agent", d.source_agent},
                               {"source_offset", d.source_offset}});
        }
        offsets.push_back({{"offset", o}, {"directives", row}});
    }
    j["propagation"] = offsets;
    const auto known = replay_knowledge(net, schedule);
    bool full = true;
    for (const auto& row : known)
        for (bool k : row) full = full && k;
    j["full_knowledge"] = full;
    return j;
}

Json fit_report_json(const MistakeCurve& curve, std::size_t first, std::size_t last) {
    Json agents = Json::array();
    std::optional<double> min_rate;
    for (std::size_t i = 0; i < curve.agents(); ++i) {
        const auto fit = fit_rate(curve, i, first, last);
        Json a{{"agent", i}, {"usable", fit.usable}, {"points", fit.points}};
        if (fit.usable) {
            a["rate"] = fit.rate;
            a["stderr"] = fit.standard_error;
            min_rate = min_rate ? std::min(*min_rate, fit.rate) : fit.rate;
        }
        agents.push_back(a);
    }
    Json j{{"window", {first, last}}, {"provenance", provenance_name(curve.provenance())},
           {"agents", agents}};
    if (min_rate)
        j["min_rate"] = *min_rate;
    else
        j["min_rate"] = nullptr;
    return j;
}

}  // namespace ratebound

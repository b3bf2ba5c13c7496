#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ratebound/errors.hpp"
#include "ratebound/io.hpp"

using namespace ratebound;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("ratebound_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json binary_model_json(double p, int n) {
    return {{"states", {"f", "g"}}, {"family", {{"type", "binary_symmetric"}, {"p", p}}}, {"n_agents", n}};
}

std::string violations_of(const Json& j) {
    try {
        parse_config_json(j, ".");
    } catch (const ConfigError& e) {
        std::string all;
        for (const auto& v : e.violations()) all += v + "\n";
        return all;
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto rc = parse_config_json({{"model", binary_model_json(0.75, 4)}, {"strategy", "coordination"}}, ".");
    CHECK(rc.sim.horizon == 30);
    CHECK(rc.sim.replications == 1000);
    CHECK(rc.sim.seed == 0);
    CHECK(rc.sim.network == Network::complete(4));
    CHECK(rc.sim.model.states().prior == std::vector<double>{0.5, 0.5});
    const auto* spec = std::get_if<CoordinationComplete>(&rc.sim.profile.per_agent[0]);
    REQUIRE(spec != nullptr);
    REQUIRE(spec->delta.has_value());
    CHECK(*spec->delta == doctest::Approx(default_delta(rc.sim.model)));
    CHECK(rc.curve_out.empty());
}

TEST_CASE("cross-validation names both fields") {
    const auto v = violations_of({{"model", binary_model_json(0.75, 3)},
                                  {"network", {{"n", 3}, {"neighborhoods", {{1}, {0}, Json::array()}}}},
                                  {"strategy", "coordination_connected"}});
    CHECK(v.find("strategy") != std::string::npos);
    CHECK(v.find("network") != std::string::npos);
}

TEST_CASE("schema violations carry field paths") {
    const auto v = violations_of({{"model", binary_model_json(1.2, 3)}, {"strategy", "autarky"}});
    CHECK(v.find("p must lie in (1/2,1)") != std::string::npos);
    CHECK(v.find("model.family.p") != std::string::npos);
    const auto many = violations_of({{"model", binary_model_json(0.75, 3)},
                                     {"strategy", "nonsense"},
                                     {"horizon", -2},
                                     {"replications", 0},
                                     {"modee", 1}});
    CHECK(many.find("strategy") != std::string::npos);
    CHECK(many.find("horizon") != std::string::npos);
    CHECK(many.find("replications") != std::string::npos);
    CHECK(many.find("modee: unknown field") != std::string::npos);
    CHECK(violations_of({{"strategy", "autarky"}}).find("model") != std::string::npos);
}

TEST_CASE("malformed JSON and missing files") {
    TempDir dir;
    {
        std::ofstream(dir.path / "bad.json") << "{\"model\": [1, 2";
    }
    CHECK_THROWS_AS(parse_config(dir.path / "bad.json"), ConfigError);
    CHECK_THROWS(parse_config(dir.path / "absent.json"));
    {
        std::ofstream(dir.path / "cfg.json") << R"({"model": "nowhere.json", "strategy": "autarky"})";
    }
    try {
        parse_config(dir.path / "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("does not exist") != std::string::npos);
    }
}

TEST_CASE("model and network files resolve relative to the config") {
    TempDir dir;
    write_text_file(dir.path / "m.json", binary_model_json(0.7, 5).dump());
    write_text_file(dir.path / "n.json", Json{{"generator", "cycle"}, {"n", 5}}.dump());
    write_text_file(dir.path / "c.json",
                    Json{{"model", "m.json"}, {"network", "n.json"}, {"strategy", "coordination_connected"},
                         {"delta", 0.1}, {"horizon", 7}, {"replications", 11}, {"seed", 5}, {"out", "x.csv"}}
                        .dump());
    const auto rc = parse_config(dir.path / "c.json");
    CHECK(rc.sim.model.p() == 0.7);
    CHECK(rc.sim.network == Network::directed_cycle(5));
    CHECK(rc.sim.horizon == 7);
    CHECK(rc.sim.replications == 11);
    CHECK(rc.sim.seed == 5);
    CHECK(rc.curve_out == "x.csv");
}

TEST_CASE("config round trip") {
    std::vector<Json> configs{
        {{"model", binary_model_json(0.75, 4)}, {"strategy", "odd_even"}, {"seed", 3}},
        {{"model", binary_model_json(0.6, 3)},
         {"network", {{"n", 3}, {"neighborhoods", {{1}, {2}, {0}}}}},
         {"strategy", "coordination_connected"},
         {"delta", 0.01},
         {"out", "curve.csv"}},
        {{"model",
          {{"states", {"a", "b", "c"}},
           {"prior", {0.2, 0.3, 0.5}},
           {"family", {{"type", "finite"}, {"support", {"x", "y"}}, {"pmf", {{0.2, 0.8}, {0.5, 0.5}, {0.9, 0.1}}}}},
           {"n_agents", 2}}},
         {"strategy", "constant"},
         {"action", "c"}},
        {{"model",
          {{"states", {"f", "g"}},
           {"family", {{"type", "gaussian"}, {"mean", {{1.0, 0.0}, {2.0, 0.5}}}, {"sigma", 1.5}}},
           {"n_agents", 2}}},
         {"strategy", "autarky"},
         {"horizon", 4}},
    };
    for (const auto& j : configs) {
        const auto rc = parse_config_json(j, ".");
        const auto again = parse_config_json(config_to_json(rc), ".");
        CHECK(again == rc);
    }
}

TEST_CASE("sweep CSV bytes") {
    CHECK(sweep_csv(sweep_figure1({0.75})) == "q,raut,rmaj\n0.750000,0.143841,0.549306\n");
    CHECK(sweep_csv({}) == "q,raut,rmaj\n");
    TempDir dir;
    emit_sweep_csv({}, dir.path / "empty.csv");
    CHECK(slurp(dir.path / "empty.csv") == "q,raut,rmaj\n");
    emit_sweep_csv(sweep_figure1({0.75}), dir.path / "one.csv");
    CHECK(slurp(dir.path / "one.csv") == "q,raut,rmaj\n0.750000,0.143841,0.549306\n");
    CHECK_THROWS_AS(emit_sweep_csv({}, dir.path / "missing_dir" / "x.csv"), IoError);
}

TEST_CASE("curve CSV round trip") {
    SimConfig c;
    c.model = SignalModel::binary_symmetric(0.75, 2, {}, {"left", "right"});
    c.network = Network::complete(2);
    c.profile = StrategyProfile::uniform(AutarkyMl{}, 2);
    c.horizon = 4;
    c.replications = 300;
    const auto curve = mistake_curve(c);
    const auto text = curve_csv(curve, c.model.states());
    CHECK(text.rfind("agent,period,state,mistakes,trials\n", 0) == 0);
    CHECK(text.find("0,1,left,") != std::string::npos);
    TempDir dir;
    write_text_file(dir.path / "c.csv", text);
    std::vector<std::string> labels;
    const auto back = read_curve_csv(dir.path / "c.csv", {}, &labels);
    CHECK(labels == std::vector<std::string>{"left", "right"});
    CHECK(back.trials() == 300);
    for (StateIndex s = 0; s < 2; ++s)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t t = 1; t <= 4; ++t) CHECK(back.mistakes(s, i, t) == curve.mistakes(s, i, t));
    CHECK(curve_csv(back, c.model.states()) == text);
}

TEST_CASE("network JSON and generators") {
    CHECK(network_from_json({{"n", 3}, {"neighborhoods", {{1}, {2}, {0}}}}) == Network::directed_cycle(3));
    CHECK(network_from_generator("complete:4") == Network::complete(4));
    CHECK(network_from_generator("cycle:5") == Network::directed_cycle(5));
    CHECK(network_from_generator("star:5") == Network::star(5));
    CHECK(network_from_generator("er:7:0.3:9") == Network::erdos_renyi_strongly_connected(7, 0.3, 9));
    CHECK_THROWS_AS(network_from_generator("ring:4"), ConfigError);
    CHECK_THROWS_AS(network_from_json({{"n", 2}, {"neighborhoods", {{5}, {0}}}}), ConfigError);
    const auto net = network_from_generator("er:6:0.4:2");
    CHECK(network_from_json(network_to_json(net)) == net);
}

TEST_CASE("rate report JSON") {
    const auto m = SignalModel::binary_symmetric(0.75, 2);
    const auto j = rate_report_json(rate_report(m), m);
    CHECK(j.at("r_bdd").get<double>() == doctest::Approx(0.549306).epsilon(1e-6));
    CHECK(j.at("argmin_pair") == Json({"f", "g"}));
    const auto g = SignalModel::gaussian_iid(StateSpace::uniform({"f", "g"}), {1.0, 0.0}, 1.0, 1);
    CHECK(rate_report_json(rate_report(g), g).at("r_tilde_bdd") == "unbounded");
}

TEST_CASE("schedule JSON reports full knowledge") {
    const auto net = Network::directed_cycle(4);
    const auto j = schedule_json(net, build_schedule(net));
    CHECK(j.at("block_length") == 9);
    CHECK(j.at("full_knowledge") == true);
}

TEST_CASE("fit report JSON") {
    const auto curve = exact_autarky_curve(SignalModel::binary_symmetric(0.75, 1), 60);
    const auto j = fit_report_json(curve, 20, 60);
    CHECK(j.at("agents").size() == 1);
    CHECK(j.at("agents")[0].at("usable") == true);
    CHECK(j.at("min_rate").get<double>() == doctest::Approx(0.15).epsilon(0.1));
}

// JSON ingestion and CSV/JSON emission for models, networks, run
// configurations, sweeps, mistake curves and reports.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratebound/network.hpp"
#include "ratebound/rates.hpp"
#include "ratebound/sim_engine.hpp"

namespace ratebound {

using Json = nlohmann::json;

struct RunConfig {
    SimConfig sim;
    std::string curve_out;  // empty: stdout

    bool operator==(const RunConfig& o) const;
};

// Each parser collects every violation (prefixed with its field path) and
// throws ConfigError once.
SignalModel model_from_json(const Json& j);
Json model_to_json(const SignalModel& model);

Network network_from_json(const Json& j);
Json network_to_json(const Network& net);
// "complete:5", "cycle:5", "star:5", "er:8:0.3:seed".
Network network_from_generator(const std::string& spec);

StrategyProfile strategy_from_json(const Json& j, const SignalModel& model);
Json strategy_to_json(const StrategyProfile& profile, const SignalModel& model);

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const Json& j, const std::filesystem::path& base_dir);
Json config_to_json(const RunConfig& config);

Json read_json_file(const std::filesystem::path& path);
SignalModel load_model(const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

std::string sweep_csv(const std::vector<SweepRow>& rows);
// Byte-stable: header q,raut,rmaj, '\n' endings, six decimals.
void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

// Columns agent,period,state,mistakes,trials (Monte Carlo curves only).
std::string curve_csv(const MistakeCurve& curve, const StateSpace& states);
// Rebuilds a Monte Carlo curve; state weights follow `prior` when it is
// non-empty and are uniform otherwise. Returns the state labels in order of
// first appearance through `labels`.
MistakeCurve read_curve_csv(const std::filesystem::path& path, const std::vector<double>& prior,
                            std::vector<std::string>* labels = nullptr);

Json rate_report_json(const RateReport& report, const SignalModel& model);
Json schedule_json(const Network& net, const PropagationSchedule& schedule);
Json fit_report_json(const MistakeCurve& curve, std::size_t first, std::size_t last);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ratebound

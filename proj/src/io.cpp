#include <cdiv/io.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <ostream>

namespace cdiv {

using nlohmann::json;

namespace {

json config_json(const ScenarioConfig& config) {
    json impls = json::array();
    for (const auto& impl : config.impls) impls.push_back({{"id", impl.id}, {"code_hex", to_hex(impl.code)}});
    json assignment = json::object();
    for (const auto& [impl, count] : config.initial_assignment) assignment[impl] = count;
    const WindowConfig window = config.resolved_window();
    json window_json = {{"mode", window.mode == WindowMode::Sliding ? "sliding" : "cumulative"}};
    if (window.mode == WindowMode::Sliding) window_json["size"] = window.size;

    return {
        {"n_validators", config.n_validators},
        {"impls", impls},
        {"step_id", config.step_id},
        {"initial_assignment", assignment},
        {"params",
         {{"epsilon", config.params.epsilon}, {"r_min", config.params.r_min}, {"r_max", config.params.r_max}}},
        {"mechanism", to_string(config.mechanism)},
        {"treasury", config.resolved_treasury()},
        {"max_blocks", config.max_blocks},
        {"seed", config.seed},
        {"deciders_per_block", config.deciders_per_block},
        {"window", window_json},
        {"strategy", config.strategy == Strategy::Rational ? "rational" : "fixed"},
        {"switch_cost", config.switch_cost},
    };
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw SimError(fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

}  // namespace

std::string config_to_json(const ScenarioConfig& config) { return config_json(config).dump(); }

ScenarioConfig config_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SimError(std::string("scenario config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SimError("scenario config must be a JSON object");
    reject_unknown_keys(doc,
                        {"n_validators", "impls", "step_id", "initial_assignment", "params", "mechanism", "treasury",
                         "max_blocks", "seed", "deciders_per_block", "window", "strategy", "switch_cost"},
                        "scenario config");
    try {
        ScenarioConfig config;
        config.n_validators = doc.at("n_validators").get<std::size_t>();
        for (const auto& impl : doc.at("impls")) {
            reject_unknown_keys(impl, {"id", "code", "code_hex"}, "impl entry");
            ImplSpec spec{impl.at("id").get<std::string>(), {}};
            if (impl.contains("code_hex")) {
                spec.code = from_hex(impl.at("code_hex").get<std::string>());
            } else {
                spec.code = to_bytes(impl.at("code").get<std::string>());
            }
            config.impls.push_back(std::move(spec));
        }
        for (const auto& [impl, count] : doc.at("initial_assignment").items()) {
            config.initial_assignment[impl] = count.get<std::size_t>();
        }
        config.max_blocks = doc.at("max_blocks").get<std::uint64_t>();
        if (doc.contains("step_id")) config.step_id = doc["step_id"].get<std::string>();
        if (doc.contains("params")) {
            const auto& p = doc["params"];
            reject_unknown_keys(p, {"epsilon", "r_min", "r_max"}, "params");
            config.params = {p.at("epsilon").get<RewardUnits>(), p.at("r_min").get<RewardUnits>(),
                             p.at("r_max").get<RewardUnits>()};
        }
        if (doc.contains("mechanism")) config.mechanism = parse_mechanism(doc["mechanism"].get<std::string>());
        if (doc.contains("treasury")) config.treasury = doc["treasury"].get<RewardUnits>();
        if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("deciders_per_block")) config.deciders_per_block = doc["deciders_per_block"].get<std::size_t>();
        if (doc.contains("window")) {
            const auto& w = doc["window"];
            reject_unknown_keys(w, {"mode", "size"}, "window");
            const auto mode = w.at("mode").get<std::string>();
            if (mode == "sliding") {
                config.window = WindowConfig{WindowMode::Sliding, w.contains("size") ? w["size"].get<std::size_t>()
                                                                                      : config.n_validators};
            } else if (mode == "cumulative") {
                config.window = WindowConfig{WindowMode::Cumulative, 0};
            } else {
                throw SimError("window mode must be 'sliding' or 'cumulative'");
            }
        }
        if (doc.contains("strategy")) {
            const auto strategy = doc["strategy"].get<std::string>();
            if (strategy == "rational") {
                config.strategy = Strategy::Rational;
            } else if (strategy == "fixed") {
                config.strategy = Strategy::Fixed;
            } else {
                throw SimError("strategy must be 'rational' or 'fixed'");
            }
        }
        if (doc.contains("switch_cost")) config.switch_cost = doc["switch_cost"].get<RewardUnits>();
        validate(config);
        return config;
    } catch (const json::exception& e) {
        throw SimError(std::string("malformed scenario config: ") + e.what());
    } catch (const SimError&) {
        throw;
    } catch (const Error& e) {
        throw SimError(std::string("malformed scenario config: ") + e.what());
    }
}

void write_series_csv(const TimeSeries& series, std::ostream& out) {
    out << "block";
    for (const auto& impl : series.impls) out << ",impl_" << impl << "_count";
    out << ",rewards_paid,treasury\n";
    for (const auto& row : series.rows) {
        out << row.block;
        for (const auto count : row.counts) out << ',' << count;
        out << ',' << row.rewards_paid << ',' << row.treasury << '\n';
    }
}

void emit_plot_data(const TimeSeries& series, std::ostream& out) {
    if (series.rows.empty()) throw Error("cannot emit plot data for an empty series");
    out << "block,impl_id,count,share\n";
    for (const auto& row : series.rows) {
        std::uint64_t total = 0;
        for (const auto count : row.counts) total += count;
        for (std::size_t i = 0; i < series.impls.size(); ++i) {
            const double share = total == 0 ? 0.0 : static_cast<double>(row.counts[i]) / static_cast<double>(total);
            fmt::print(out, "{},{},{},{}\n", row.block, series.impls[i], row.counts[i], share);
        }
    }
    if (!out) throw Error("failed to write plot data");
}

std::string series_to_json(const ScenarioConfig& config, const TimeSeries& series) {
    json rows = json::array();
    for (const auto& row : series.rows) {
        rows.push_back({
            {"block", row.block},
            {"counts", row.counts},
            {"rewards_paid", row.rewards_paid},
            {"cumulative_rewards", row.cumulative_rewards},
            {"treasury", row.treasury},
            {"switches", row.switches},
            {"rejected", row.rejected},
        });
    }
    return json{{"config", config_json(config)}, {"impls", series.impls}, {"rows", rows}}.dump();
}

std::string manifest_to_json(const RunManifest& manifest) {
    return json{
        {"config_sha256", to_hex(manifest.config_hash)},
        {"seed", manifest.seed},
        {"artifacts", manifest.artifacts},
        {"tool_version", manifest.tool_version},
    }
        .dump(2) + "\n";
}

std::string_view tool_version() { return "0.1.0"; }

}  // namespace cdiv

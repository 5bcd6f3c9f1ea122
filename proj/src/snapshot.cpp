#include <cdiv/contract.hpp>

#include <json.hpp>

namespace cdiv {

using nlohmann::json;

namespace {

template <std::size_t N>
json hex_set(const std::set<std::array<std::uint8_t, N>>& items) {
    json out = json::array();
    for (const auto& item : items) out.push_back(to_hex(item));
    return out;
}

template <std::size_t N>
std::set<std::array<std::uint8_t, N>> hex_set_from(const json& j) {
    std::set<std::array<std::uint8_t, N>> out;
    for (const auto& item : j) out.insert(array_from_hex<N>(item.get<std::string>()));
    return out;
}

}  // namespace

std::string contract_to_json(const ContractState& state) {
    json registry = json::array();
    for (const auto& e : state.registry().entries()) {
        registry.push_back({{"impl_id", e.impl_id}, {"step_id", e.step_id}, {"digest", to_hex(e.digest)}});
    }

    const auto& window = state.window();
    json counts = json::object();
    for (const auto& [digest, count] : window.counts()) counts[to_hex(digest)] = count;
    json recent = json::array();
    for (const auto& entry : window.recent()) recent.push_back({{"block", entry.block}, {"digest", to_hex(entry.digest)}});
    json window_json = {
        {"mode", window.config().mode == WindowMode::Sliding ? "sliding" : "cumulative"},
        {"size", window.config().size},
        {"counts", counts},
        {"recent", recent},
        {"total", window.total()},
    };

    const json doc = {
        {"owner", to_hex(state.owner())},
        {"registry", registry},
        {"params",
         {{"epsilon", state.params().epsilon}, {"r_min", state.params().r_min}, {"r_max", state.params().r_max}}},
        {"window", window_json},
        {"treasury", state.treasury()},
        {"validators", hex_set(state.validators())},
        {"trusted_keys", hex_set(state.trusted_keys())},
        {"current_block", state.current_block()},
        {"submitted_this_block", hex_set(state.submitted_this_block())},
    };
    return doc.dump();
}

ContractState contract_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("contract snapshot is not valid JSON: ") + e.what());
    }
    try {
        CommitmentRegistry registry;
        for (const auto& e : doc.at("registry")) {
            registry.add(CodeIdentity{e.at("impl_id").get<std::string>(), e.at("step_id").get<std::string>(),
                                      array_from_hex<32>(e.at("digest").get<std::string>())});
        }
        const auto& p = doc.at("params");
        const RewardParams params{p.at("epsilon").get<RewardUnits>(), p.at("r_min").get<RewardUnits>(),
                                  p.at("r_max").get<RewardUnits>()};
        const auto& w = doc.at("window");
        WindowConfig window_config;
        const auto mode = w.at("mode").get<std::string>();
        if (mode == "sliding") {
            window_config = {WindowMode::Sliding, w.at("size").get<std::size_t>()};
        } else if (mode == "cumulative") {
            window_config = {WindowMode::Cumulative, 0};
        } else {
            throw Error("unknown window mode '" + mode + "'");
        }

        ContractState state(array_from_hex<20>(doc.at("owner").get<std::string>()), std::move(registry), params,
                            window_config, doc.at("treasury").get<RewardUnits>());

        DistributionWindow& window = state.window_;
        for (const auto& [digest_hex, count] : w.at("counts").items()) {
            window.counts_[array_from_hex<32>(digest_hex)] = count.get<std::uint64_t>();
        }
        for (const auto& entry : w.at("recent")) {
            window.recent_.push_back({entry.at("block").get<std::uint64_t>(),
                                      array_from_hex<32>(entry.at("digest").get<std::string>())});
        }
        window.total_ = w.at("total").get<std::uint64_t>();

        std::uint64_t sum = 0;
        for (const auto& [digest, count] : window.counts_) {
            if (!state.registry_.contains(digest)) throw Error("window counts an unregistered commitment");
            sum += count;
        }
        if (sum != window.total_) throw Error("window counts do not sum to its total");
        if (window_config.mode == WindowMode::Sliding && window.recent_.size() != window.total_) {
            throw Error("sliding window entries do not match its total");
        }

        state.validators_ = hex_set_from<20>(doc.at("validators"));
        state.trusted_keys_ = hex_set_from<32>(doc.at("trusted_keys"));
        state.current_block_ = doc.at("current_block").get<std::uint64_t>();
        state.submitted_this_block_ = hex_set_from<20>(doc.at("submitted_this_block"));
        return state;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed contract snapshot: ") + e.what());
    }
}

}  // namespace cdiv

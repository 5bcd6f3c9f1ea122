#include <cdiv/analysis.hpp>

#include <limits>
#include <numeric>

namespace cdiv {

std::string_view to_string(ClientClass cls) {
    switch (cls) {
        case ClientClass::Minority: return "minority";
        case ClientClass::Majority: return "majority";
        case ClientClass::Supermajority: return "supermajority";
    }
    return "unknown";
}

ClientClass classify(Share share) {
    if (share.total != 0 && share.count > share.total) throw AnalysisError("share exceeds 1");
    if (share.compare(1, 3) < 0) return ClientClass::Minority;
    if (share.compare(2, 3) > 0) return ClientClass::Supermajority;
    return ClientClass::Majority;
}

ResilienceReport slash_impact(const std::map<ImplId, std::uint64_t>& counts, const ImplId& buggy) {
    const auto it = counts.find(buggy);
    if (it == counts.end()) throw AnalysisError("unknown implementation '" + buggy + "'");
    const std::uint64_t total =
        std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}, [](auto acc, const auto& kv) { return acc + kv.second; });

    ResilienceReport report;
    report.buggy_impl = buggy;
    report.slashed_count = it->second;
    report.affected_fraction = Share{it->second, total};
    report.cls = classify(report.affected_fraction);
    report.corrupted_state_accepted = report.affected_fraction.compare(2, 3) > 0;
    return report;
}

Feasibility proving_feasible(ProofMechanism mechanism, double block_time_s) {
    if (!(block_time_s > 0)) throw AnalysisError("block time must be positive");
    const double proving = default_cost_model(mechanism).proving_time_s;
    return {proving <= block_time_s, proving / block_time_s};
}

RewardUnits break_even_reward(ProofMechanism mechanism, RewardUnits gas_price, GasStatistic statistic) {
    if (gas_price < 0) throw AnalysisError("gas price must be non-negative");
    const CostModel cost = default_cost_model(mechanism);
    std::uint64_t gas = cost.verify_gas_avg;
    if (statistic == GasStatistic::Min) gas = cost.verify_gas_min;
    if (statistic == GasStatistic::Max) gas = cost.verify_gas_max;
    const auto total = static_cast<unsigned __int128>(gas) * static_cast<unsigned __int128>(gas_price);
    if (total > static_cast<unsigned __int128>(std::numeric_limits<RewardUnits>::max())) {
        throw AnalysisError("break-even reward overflows");
    }
    return static_cast<RewardUnits>(total);
}

}  // namespace cdiv

#pragma once

#include <cdiv/proofs.hpp>

#include <map>

namespace cdiv {

enum class ClientClass { Minority, Majority, Supermajority };

std::string_view to_string(ClientClass cls);

/// Below 1/3 is minority, above 2/3 supermajority; both boundaries are majority.
ClientClass classify(Share share);

struct ResilienceReport {
    ImplId buggy_impl;
    Share affected_fraction{};
    ClientClass cls = ClientClass::Minority;
    std::uint64_t slashed_count = 0;
    // A faulty implementation above 2/3 finalizes its own state.
    bool corrupted_state_accepted = false;
};

class AnalysisError : public Error {
  public:
    using Error::Error;
};

ResilienceReport slash_impact(const std::map<ImplId, std::uint64_t>& counts, const ImplId& buggy);

struct Feasibility {
    bool feasible = false;
    double margin = 0;  // proving time / block time
};

Feasibility proving_feasible(ProofMechanism mechanism, double block_time_s);

enum class GasStatistic { Min, Avg, Max };

/// Smallest reward that covers the on-chain verification cost of one proof.
RewardUnits break_even_reward(ProofMechanism mechanism, RewardUnits gas_price,
                              GasStatistic statistic = GasStatistic::Avg);

}  // namespace cdiv

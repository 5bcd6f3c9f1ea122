#pragma once

#include <cdiv/contract.hpp>

#include <functional>
#include <optional>

namespace cdiv {

enum class Strategy { Rational, Fixed };

struct ImplSpec {
    ImplId id;
    Bytes code;

    bool operator==(const ImplSpec&) const = default;
};

struct ScenarioConfig {
    std::size_t n_validators = 0;
    std::vector<ImplSpec> impls;
    std::string step_id = "attest";
    std::map<ImplId, std::size_t> initial_assignment;
    RewardParams params{1, 2, 10};
    ProofMechanism mechanism = ProofMechanism::Attested;
    // Defaults to n_validators * r_max * max_blocks, which cannot run dry.
    std::optional<RewardUnits> treasury;
    std::uint64_t max_blocks = 1;
    std::uint64_t seed = 0;
    std::size_t deciders_per_block = 1;
    // Defaults to a sliding window of n_validators submissions.
    std::optional<WindowConfig> window;
    Strategy strategy = Strategy::Rational;
    RewardUnits switch_cost = 0;

    [[nodiscard]] RewardUnits resolved_treasury() const;
    [[nodiscard]] WindowConfig resolved_window() const;

    bool operator==(const ScenarioConfig&) const = default;
};

class SimError : public Error {
  public:
    using Error::Error;
};

// Throws SimError describing the first violated constraint.
void validate(const ScenarioConfig& config);

/// 20 validators starting at A:14 B:4 C:2.
ScenarioConfig scenario_70_20_10();
/// 12 validators starting at A:10 B:1 C:1.
ScenarioConfig scenario_83_8_8();

struct ValidatorAgent {
    NodeKey key;
    ImplId current_impl;
    Strategy strategy = Strategy::Rational;
    RewardUnits switch_cost = 0;
};

/// The impl maximizing the reward the agent's next proof would earn, net of switch cost.
/// Ties keep the current impl, then go to the smallest id.
ImplId agent_decide(const ValidatorAgent& agent, const ContractState& state);

struct BlockRow {
    std::uint64_t block = 0;
    std::vector<std::uint64_t> counts;  // per impl, after this block's decisions
    RewardUnits rewards_paid = 0;
    std::vector<RewardUnits> cumulative_rewards;
    RewardUnits treasury = 0;
    // Lowest and highest reward paid this block to a validator on each impl.
    // Meaningful only where counts[i] > 0.
    std::vector<RewardUnits> reward_low;
    std::vector<RewardUnits> reward_high;
    std::uint64_t switches = 0;
    std::uint64_t rejected = 0;

    bool operator==(const BlockRow&) const = default;
};

struct TimeSeries {
    std::vector<ImplId> impls;
    std::vector<BlockRow> rows;

    bool operator==(const TimeSeries&) const = default;
};

/// Per-validator key derivation shared by the simulator and the CLI.
NodeKey validator_key(std::uint64_t seed, std::size_t index);

/// Contract genesis for a scenario: registry, validators, trusted keys and treasury.
ContractState genesis_contract(const ScenarioConfig& config);

class Simulation {
  public:
    explicit Simulation(ScenarioConfig config);

    // Runs one block. `before_advance` sees the contract after every validator has
    // submitted and before the block advances.
    void step(const std::function<void(ContractState&)>& before_advance = {});
    [[nodiscard]] bool done() const noexcept { return series_.rows.size() >= config_.max_blocks; }

    [[nodiscard]] const ScenarioConfig& config() const noexcept { return config_; }
    [[nodiscard]] const ContractState& contract() const noexcept { return contract_; }
    [[nodiscard]] const std::vector<ValidatorAgent>& agents() const noexcept { return agents_; }
    [[nodiscard]] const TimeSeries& series() const noexcept { return series_; }
    [[nodiscard]] const std::map<ImplId, CodeIdentity>& identities() const noexcept { return identities_; }

  private:
    ScenarioConfig config_;
    ContractState contract_;
    std::vector<ValidatorAgent> agents_;
    std::vector<std::size_t> decision_order_;
    std::size_t next_decider_ = 0;
    std::map<ImplId, CodeIdentity> identities_;
    TimeSeries series_;
};

TimeSeries run(const ScenarioConfig& config);

/// First block b such that every row in [b, b + hold_blocks] has max - min count <= spread.
std::optional<std::size_t> detect_convergence(const TimeSeries& series, std::uint64_t spread,
                                              std::size_t hold_blocks);

}  // namespace cdiv

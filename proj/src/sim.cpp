#include <cdiv/sim.hpp>

#include <algorithm>
#include <limits>
#include <random>

namespace cdiv {

namespace {

// Uniform draw in [0, bound) with rejection, stable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
    return order;
}

Digest derive_seed(std::string_view label, std::uint64_t seed, std::size_t index) {
    const std::string material = std::string(label) + "/" + std::to_string(seed) + "/" + std::to_string(index);
    return sha256(to_bytes(material));
}

std::map<ImplId, CodeIdentity> commit_impls(const ScenarioConfig& config) {
    std::vector<CodeSegment> segments;
    for (const auto& impl : config.impls) segments.push_back({impl.id, config.step_id, impl.code});
    std::map<ImplId, CodeIdentity> out;
    const CommitmentRegistry registry = build_registry(segments);
    for (const auto& identity : registry.entries()) out.emplace(identity.impl_id, identity);
    return out;
}

}  // namespace

RewardUnits ScenarioConfig::resolved_treasury() const {
    if (treasury) return *treasury;
    const auto per_block = static_cast<unsigned __int128>(n_validators) * static_cast<unsigned __int128>(params.r_max);
    const auto total = per_block * max_blocks;
    if (total > static_cast<unsigned __int128>(std::numeric_limits<RewardUnits>::max())) {
        throw SimError("default treasury overflows; set it explicitly");
    }
    return static_cast<RewardUnits>(total);
}

WindowConfig ScenarioConfig::resolved_window() const {
    return window.value_or(WindowConfig{WindowMode::Sliding, n_validators});
}

void validate(const ScenarioConfig& config) {
    if (config.n_validators == 0) throw SimError("n_validators must be positive");
    if (config.impls.empty()) throw SimError("at least one implementation is required");
    if (config.step_id.empty()) throw SimError("step_id must be non-empty");
    if (config.max_blocks == 0) throw SimError("max_blocks must be at least 1");
    if (config.deciders_per_block == 0 || config.deciders_per_block > config.n_validators) {
        throw SimError("deciders_per_block must be in [1, n_validators]");
    }
    if (!config.params.valid()) throw SimError("reward parameters must satisfy r_max >= r_min > epsilon >= 0");
    if (config.switch_cost < 0) throw SimError("switch_cost must be non-negative");
    if (config.treasury && *config.treasury < 0) throw SimError("treasury must be non-negative");
    if (config.window && config.window->mode == WindowMode::Sliding && config.window->size == 0) {
        throw SimError("sliding window size must be positive");
    }

    std::set<ImplId> ids;
    for (const auto& impl : config.impls) {
        if (!ids.insert(impl.id).second) throw SimError("duplicate implementation id '" + impl.id + "'");
    }
    std::size_t assigned = 0;
    for (const auto& [impl, count] : config.initial_assignment) {
        if (!ids.contains(impl)) throw SimError("initial assignment names unknown implementation '" + impl + "'");
        assigned += count;
    }
    if (assigned != config.n_validators) {
        throw SimError("initial assignment covers " + std::to_string(assigned) + " validators, expected " +
                       std::to_string(config.n_validators));
    }
    try {
        commit_impls(config);
    } catch (const IdentityError& e) {
        throw SimError(std::string("implementation payloads rejected: ") + e.what());
    }
    static_cast<void>(config.resolved_treasury());
}

namespace {

ScenarioConfig three_client_scenario(std::size_t a, std::size_t b, std::size_t c) {
    ScenarioConfig config;
    config.n_validators = a + b + c;
    config.impls = {{"A", to_bytes("clientA-v1")}, {"B", to_bytes("clientB-v1")}, {"C", to_bytes("clientC-v1")}};
    config.initial_assignment = {{"A", a}, {"B", b}, {"C", c}};
    config.params = {1, 2, 10};
    config.max_blocks = 1500;
    config.seed = 42;
    return config;
}

}  // namespace

ScenarioConfig scenario_70_20_10() { return three_client_scenario(14, 4, 2); }

ScenarioConfig scenario_83_8_8() { return three_client_scenario(10, 1, 1); }

ImplId agent_decide(const ValidatorAgent& agent, const ContractState& state) {
    const auto impls = state.registry().impls();
    const std::size_t n_impls = impls.size();
    const bool on_registered = std::binary_search(impls.begin(), impls.end(), agent.current_impl);

    ImplId best = agent.current_impl;
    RewardUnits best_value = on_registered ? reward(state.share_of(agent.current_impl), n_impls, state.params())
                                           : std::numeric_limits<RewardUnits>::min();
    for (const auto& impl : impls) {
        if (impl == agent.current_impl) continue;
        // The agent's own stale entry stays on its current impl until its next proof lands.
        const RewardUnits value = reward(state.share_of(impl), n_impls, state.params()) - agent.switch_cost;
        if (value > best_value) {
            best_value = value;
            best = impl;
        }
    }
    return best;
}

NodeKey validator_key(std::uint64_t seed, std::size_t index) {
    return NodeKey::from_seed(derive_seed("cdiv/validator", seed, index));
}

namespace {

Address owner_address(std::uint64_t seed) { return NodeKey::from_seed(derive_seed("cdiv/owner", seed, 0)).address(); }

}  // namespace

ContractState genesis_contract(const ScenarioConfig& config) {
    validate(config);
    CommitmentRegistry registry;
    for (const auto& [impl, identity] : commit_impls(config)) registry.add(identity);
    const Address owner = owner_address(config.seed);
    ContractState contract(owner, std::move(registry), config.params, config.resolved_window(),
                           config.resolved_treasury());
    for (std::size_t i = 0; i < config.n_validators; ++i) {
        const NodeKey key = validator_key(config.seed, i);
        contract.owner_add_validator(owner, key.address());
        contract.owner_trust_key(owner, key.public_key());
    }
    return contract;
}

Simulation::Simulation(ScenarioConfig config)
    : config_(std::move(config)),
      contract_(genesis_contract(config_)),
      decision_order_(seeded_permutation(config_.n_validators, config_.seed)),
      identities_(commit_impls(config_)) {
    std::size_t index = 0;
    for (const auto& impl : config_.impls) {
        const auto it = config_.initial_assignment.find(impl.id);
        const std::size_t count = it == config_.initial_assignment.end() ? 0 : it->second;
        for (std::size_t k = 0; k < count; ++k, ++index) {
            agents_.push_back({validator_key(config_.seed, index), impl.id, config_.strategy, config_.switch_cost});
        }
    }
    for (const auto& [impl, identity] : identities_) series_.impls.push_back(impl);
}

void Simulation::step(const std::function<void(ContractState&)>& before_advance) {
    const std::uint64_t block = contract_.current_block();
    const std::size_t n_impls = series_.impls.size();
    const auto impl_index = [&](const ImplId& id) {
        return static_cast<std::size_t>(std::lower_bound(series_.impls.begin(), series_.impls.end(), id) -
                                        series_.impls.begin());
    };

    BlockRow row;
    row.block = block;
    row.counts.assign(n_impls, 0);
    row.reward_low.assign(n_impls, std::numeric_limits<RewardUnits>::max());
    row.reward_high.assign(n_impls, 0);
    row.cumulative_rewards =
        series_.rows.empty() ? std::vector<RewardUnits>(n_impls, 0) : series_.rows.back().cumulative_rewards;

    for (std::size_t d = 0; d < config_.deciders_per_block; ++d) {
        ValidatorAgent& agent = agents_[decision_order_[next_decider_]];
        next_decider_ = (next_decider_ + 1) % decision_order_.size();
        if (agent.strategy != Strategy::Rational) continue;
        ImplId choice = agent_decide(agent, contract_);
        if (choice != agent.current_impl) {
            agent.current_impl = std::move(choice);
            ++row.switches;
        }
    }

    for (const auto& agent : agents_) {
        const std::size_t i = impl_index(agent.current_impl);
        ++row.counts[i];
        const ExecutionProof proof = generate_proof(config_.mechanism, identities_.at(agent.current_impl), block, agent.key);
        const RewardOutcome outcome = contract_.submit_proof(proof);
        if (!outcome.accepted) ++row.rejected;
        row.rewards_paid += outcome.reward;
        row.cumulative_rewards[i] += outcome.reward;
        row.reward_low[i] = std::min(row.reward_low[i], outcome.reward);
        row.reward_high[i] = std::max(row.reward_high[i], outcome.reward);
    }
    for (std::size_t i = 0; i < n_impls; ++i) {
        if (row.counts[i] == 0) row.reward_low[i] = 0;
    }

    if (before_advance) before_advance(contract_);
    row.treasury = contract_.treasury();
    series_.rows.push_back(std::move(row));
    contract_.advance_block();
}

TimeSeries run(const ScenarioConfig& config) {
    Simulation sim(config);
    while (!sim.done()) sim.step();
    return sim.series();
}

std::optional<std::size_t> detect_convergence(const TimeSeries& series, std::uint64_t spread,
                                              std::size_t hold_blocks) {
    const auto& rows = series.rows;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t b = 0; b < rows.size(); ++b) {
        const auto [lo, hi] = std::minmax_element(rows[b].counts.begin(), rows[b].counts.end());
        const bool within = rows[b].counts.empty() || *hi - *lo <= spread;
        if (!within) {
            in_run = false;
            continue;
        }
        if (!in_run) {
            in_run = true;
            run_start = b;
        }
        if (b - run_start >= hold_blocks) return run_start;
    }
    return std::nullopt;
}

}  // namespace cdiv

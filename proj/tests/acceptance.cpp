// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <cdiv/analysis.hpp>
#include <cdiv/io.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace cdiv;

namespace {

struct Check {
    std::string failure;

    void expect(bool ok, const std::string& what) {
        if (!ok && failure.empty()) failure = what;
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0 = unbounded
    std::function<void(Check&)> body;
};

std::uint64_t spread(const BlockRow& row) {
    const auto [lo, hi] = std::minmax_element(row.counts.begin(), row.counts.end());
    return *hi - *lo;
}

void cost_model_golden(Check& c) {
    const auto zk = default_cost_model(ProofMechanism::Succinct);
    c.expect(zk.proving_time_s == 59.0, "F1 proving time");
    c.expect(zk.regular_time_s == 15.14e-6, "F1 regular time");
    c.expect(zk.cpu_avg_pct == 90.05 && zk.cpu_max_pct == 100.0, "F1 cpu");
    c.expect(zk.mem_avg_mb == 1331 && zk.mem_max_mb == 2150, "F1 memory");
    c.expect(zk.verify_gas_min == 288458 && zk.verify_gas_avg == 289728 && zk.verify_gas_max == 291013, "F1 gas");
    const auto tee = default_cost_model(ProofMechanism::Attested);
    c.expect(tee.proving_time_s == 0.080, "F2 proving time");
    c.expect(tee.regular_time_s == 1.42e-3, "F2 regular time");
    c.expect(tee.cpu_avg_pct == 22.24 && tee.cpu_max_pct == 23.35, "F2 cpu");
    c.expect(tee.mem_avg_mb == 21 && tee.mem_max_mb == 21, "F2 memory");
    c.expect(tee.verify_gas_min == 5397746 && tee.verify_gas_avg == 5397746 && tee.verify_gas_max == 5397746,
             "F2 gas");
}

void reward_curve(Check& c) {
    std::mt19937_64 rng(20240101);
    constexpr std::size_t n = 3;
    std::size_t sampled = 0;
    while (sampled < 20000) {
        RewardParams p;
        p.epsilon = static_cast<RewardUnits>(rng() % 100);
        p.r_min = p.epsilon + 1 + static_cast<RewardUnits>(rng() % 1000);
        p.r_max = p.r_min + static_cast<RewardUnits>(rng() % 100000);
        const std::uint64_t total = 3 * (1 + rng() % 2000);
        c.expect(reward(Share{0, total}, n, p) == p.r_max, "r(0) != r_max");
        c.expect(reward(Share{total / 3, total}, n, p) == p.r_min, "r(1/3) != r_min");
        RewardUnits previous = p.r_max;
        for (std::uint64_t k = 0; k <= total; ++k, ++sampled) {
            const RewardUnits r = reward(Share{k, total}, n, p);
            if (3 * k > total) {
                c.expect(r == p.epsilon, "not epsilon above 1/3");
                continue;
            }
            // Independent evaluation of r_max - t (r_max - r_min), rounded half up.
            const long double t = static_cast<long double>(3 * k) / static_cast<long double>(total);
            const auto expected =
                static_cast<RewardUnits>(std::floor(p.r_max - t * (p.r_max - p.r_min) + 0.5L));
            c.expect(r == expected, "interpolated value mismatch");
            c.expect(r <= previous, "curve increases on the interpolated segment");
            previous = r;
        }
    }
}

void convergence(Check& c, const ScenarioConfig& config, std::optional<std::size_t> fixture) {
    const auto series = run(config);
    const auto converged = detect_convergence(series, 1, 200);
    c.expect(converged.has_value(), "no convergence");
    if (!converged) return;
    std::cout << "    converged at block " << *converged << "\n";
    c.expect(*converged <= 1000, "converged after block 1000");
    if (fixture) c.expect(*converged == *fixture, "convergence block differs from the regression fixture");

    const std::uint64_t n = config.n_validators;
    for (std::size_t b = *converged; b < series.rows.size(); ++b) {
        const auto& row = series.rows[b];
        for (const auto count : row.counts) c.expect(3 * count <= 2 * n, "supermajority after equilibrium");
        c.expect(spread(row) <= 2, "distribution drifted after equilibrium");
    }

    int compared = 0;
    for (std::size_t b = 1; b < *converged; ++b) {
        const auto& row = series.rows[b];
        if (spread(row) <= 1) continue;
        const auto hi = std::max_element(row.counts.begin(), row.counts.end()) - row.counts.begin();
        const auto lo = std::min_element(row.counts.begin(), row.counts.end()) - row.counts.begin();
        if (std::count(row.counts.begin(), row.counts.end(), row.counts[hi]) > 1 ||
            std::count(row.counts.begin(), row.counts.end(), row.counts[lo]) > 1) {
            continue;
        }
        c.expect(row.reward_low[lo] > row.reward_high[hi], "majority validator out-earned a minority validator");
        ++compared;
    }
    c.expect(compared > 0, "no pre-convergence block to compare rewards on");
}

void resilience_oracle(Check& c) {
    std::size_t cases = 0;
    for (std::size_t impls = 1; impls <= 4; ++impls) {
        std::vector<std::uint64_t> counts(impls, 0);
        // Odometer over all count vectors with total in [1, 12].
        for (;;) {
            std::size_t i = 0;
            while (i < impls && ++counts[i] > 12) counts[i++] = 0;
            if (i == impls) break;
            std::uint64_t total = 0;
            for (const auto x : counts) total += x;
            if (total == 0 || total > 12) continue;
            std::map<ImplId, std::uint64_t> dist;
            std::vector<ImplId> nodes;
            for (std::size_t k = 0; k < impls; ++k) {
                const ImplId impl(1, static_cast<char>('A' + k));
                dist[impl] = counts[k];
                nodes.insert(nodes.end(), counts[k], impl);
            }
            for (const auto& [impl, count] : dist) {
                // Re-derive from the node list: the buggy nodes are slashed, and a bug carried by more
                // than two thirds of the nodes finalizes its own state.
                const auto affected = static_cast<std::uint64_t>(std::count(nodes.begin(), nodes.end(), impl));
                const bool below_third = 3 * affected < total;
                const bool above_two_thirds = 3 * affected > 2 * total;
                const ClientClass expected = below_third        ? ClientClass::Minority
                                             : above_two_thirds ? ClientClass::Supermajority
                                                                : ClientClass::Majority;
                const auto report = slash_impact(dist, impl);
                c.expect(report.cls == expected, "class mismatch");
                c.expect(report.corrupted_state_accepted == above_two_thirds, "corruption verdict mismatch");
                c.expect(report.slashed_count == count, "slashed count mismatch");
                ++cases;
            }
        }
    }
    std::cout << "    " << cases << " (distribution, buggy impl) cases\n";
}

void mutation_suite(Check& c) {
    const auto registry = build_registry({{"A", "attest", to_bytes("clientA-v1")},
                                          {"B", "attest", to_bytes("clientB-v1")},
                                          {"C", "attest", to_bytes("clientC-v1")}});
    std::vector<NodeKey> keys;
    TrustedKeys trusted;
    for (int i = 0; i < 8; ++i) {
        keys.push_back(NodeKey::from_seed(sha256(to_bytes("acceptance-node-" + std::to_string(i)))));
        trusted.insert(keys.back().public_key());
    }
    std::mt19937_64 rng(6);
    int rejected = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto mechanism = trial % 2 == 0 ? ProofMechanism::Succinct : ProofMechanism::Attested;
        const auto& identity = registry.entries()[rng() % 3];
        const auto honest = generate_proof(mechanism, identity, rng() % 100000, keys[rng() % keys.size()]);
        try {
            c.expect(verify_proof(registry, trusted, honest) == identity.digest, "honest proof returned wrong digest");
        } catch (const ProofError&) {
            c.expect(false, "honest proof rejected");
        }

        auto mutated = honest;
        switch (rng() % 5) {
            case 0:
                mutated.mechanism =
                    mechanism == ProofMechanism::Succinct ? ProofMechanism::Attested : ProofMechanism::Succinct;
                break;
            case 1: {
                const auto index = static_cast<std::size_t>(&identity - registry.entries().data());
                mutated.commitment_digest = registry.entries()[(index + 1 + rng() % 2) % 3].digest;
                break;
            }
            case 2: mutated.block_number += 1 + rng() % 1000; break;
            case 3: mutated.submitter[rng() % 20] ^= static_cast<std::uint8_t>(1 + rng() % 255); break;
            case 4: mutated.binding[rng() % mutated.binding.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255); break;
        }
        c.expect(mutated != honest, "mutation was a no-op");
        try {
            verify_proof(registry, trusted, mutated);
            c.expect(false, "mutated proof accepted");
        } catch (const ProofError&) {
            ++rejected;
        }
    }
    c.expect(rejected == 1000, "not every mutation rejected");
}

void conservation_and_safety(Check& c) {
    std::mt19937_64 rng(777);
    std::size_t probes = 0;
    for (int run_index = 0; run_index < 100; ++run_index) {
        ScenarioConfig config = scenario_70_20_10();
        config.n_validators = 4 + rng() % 12;
        const std::size_t a = rng() % (config.n_validators + 1);
        const std::size_t b = rng() % (config.n_validators - a + 1);
        config.initial_assignment = {{"A", a}, {"B", b}, {"C", config.n_validators - a - b}};
        config.params.epsilon = static_cast<RewardUnits>(rng() % 3);
        config.params.r_min = config.params.epsilon + 1 + static_cast<RewardUnits>(rng() % 5);
        config.params.r_max = config.params.r_min + static_cast<RewardUnits>(rng() % 20);
        config.max_blocks = 20 + rng() % 40;
        config.seed = rng();
        config.mechanism = run_index % 2 == 0 ? ProofMechanism::Attested : ProofMechanism::Succinct;
        // A third of the runs have a treasury that runs dry.
        if (run_index % 3 == 0) config.treasury = static_cast<RewardUnits>(rng() % 500);

        Simulation sim(config);
        const RewardUnits initial = sim.contract().treasury();
        RewardUnits injected_paid = 0;
        const auto stranger = NodeKey::from_seed(sha256(to_bytes("stranger-" + std::to_string(run_index))));

        while (!sim.done()) {
            sim.step([&](ContractState& contract) {
                const ContractState before = contract;
                const std::string before_json = contract_to_json(contract);
                const auto& agent = sim.agents()[rng() % sim.agents().size()];
                const auto& identity = sim.identities().at(agent.current_impl);
                const std::uint64_t block = contract.current_block();

                std::vector<ExecutionProof> attempts;
                attempts.push_back(generate_proof(config.mechanism, identity, block, agent.key));  // duplicate
                attempts.push_back(generate_proof(config.mechanism, identity, block + 1, agent.key));  // stale
                attempts.push_back(generate_proof(config.mechanism, identity, block, stranger));  // not expected
                auto tampered = generate_proof(config.mechanism, identity, block, agent.key);
                tampered.binding[rng() % tampered.binding.size()] ^= 0x40;
                attempts.push_back(tampered);
                const auto rogue = compute_commitment({"R", "attest", to_bytes("rogue-build")});
                attempts.push_back(generate_proof(config.mechanism, rogue, block, agent.key));

                for (const auto& proof : attempts) {
                    const auto outcome = contract.submit_proof(proof);
                    injected_paid += outcome.reward;
                    c.expect(!outcome.accepted && outcome.reward == 0, "adversarial submission accepted");
                    c.expect(contract == before, "rejected submission changed the contract");
                    c.expect(contract_to_json(contract) == before_json, "rejected submission changed the snapshot");
                    ++probes;
                }
            });
        }

        RewardUnits paid = injected_paid;
        RewardUnits previous = initial;
        for (const auto& row : sim.series().rows) {
            paid += row.rewards_paid;
            c.expect(previous - row.treasury == row.rewards_paid, "per-block treasury delta differs from rewards");
            previous = row.treasury;
        }
        c.expect(initial - sim.contract().treasury() == paid, "treasury delta differs from total rewards");
        c.expect(sim.contract().treasury() >= 0, "negative treasury");
    }
    std::cout << "    " << probes << " rejected submissions probed\n";
}

void feasibility(Check& c) {
    const auto zk = proving_feasible(ProofMechanism::Succinct, 12.0);
    const auto tee = proving_feasible(ProofMechanism::Attested, 12.0);
    c.expect(!zk.feasible, "succinct proving should not fit a 12 s block");
    c.expect(tee.feasible, "attested proving should fit a 12 s block");
    c.expect(zk.margin == 59.0 / 12.0, "succinct margin");
    c.expect(tee.margin == 0.080 / 12.0, "attested margin");
    c.expect(break_even_reward(ProofMechanism::Succinct, 1) == 289728, "succinct break-even");
    c.expect(break_even_reward(ProofMechanism::Attested, 1) == 5397746, "attested break-even");
}

std::string csv_bytes(const ScenarioConfig& config) {
    const auto series = run(config);
    std::ostringstream out;
    write_series_csv(series, out);
    emit_plot_data(series, out);
    return out.str();
}

void determinism(Check& c) {
    auto random_config = scenario_70_20_10();
    random_config.n_validators = 17;
    random_config.initial_assignment = {{"A", 3}, {"B", 12}, {"C", 2}};
    random_config.seed = 987654321;
    random_config.max_blocks = 400;
    random_config.deciders_per_block = 3;
    for (const auto& config : {scenario_70_20_10(), scenario_83_8_8(), random_config}) {
        const std::string first = csv_bytes(config);
        c.expect(!first.empty(), "empty output");
        c.expect(first == csv_bytes(config), "CSV output differs between identical runs");
    }
    c.expect(csv_bytes(random_config) == csv_bytes(config_from_json(config_to_json(random_config))),
             "CSV differs after config round trip");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "cost-model golden values", 1.0, cost_model_golden},
        {2, "reward curve reproduction (>= 1e4 shares, exact)", 0, reward_curve},
        {3, "convergence 20 validators A:14 B:4 C:2", 10.0,
         [](Check& c) { convergence(c, scenario_70_20_10(), 11); }},
        {4, "convergence 12 validators A:10 B:1 C:1", 10.0, [](Check& c) { convergence(c, scenario_83_8_8(), 6); }},
        {5, "resilience oracle equivalence (<= 4 impls, <= 12 nodes)", 5.0, resilience_oracle},
        {6, "proof-binding mutation suite (1000 mutations)", 0, mutation_suite},
        {7, "conservation and safety over 100 runs", 0, conservation_and_safety},
        {8, "feasibility verdicts and break-even", 0, feasibility},
        {9, "determinism of CSV outputs", 0, determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_limit_s > 0 && elapsed >= criterion.time_limit_s) {
            check.expect(false, "exceeded time limit of " + std::to_string(criterion.time_limit_s) + " s");
        }
        const bool ok = check.failure.empty();
        failures += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << "  [" << criterion.id << "] " << criterion.name << "  ("
                  << elapsed << " s)";
        if (!ok) std::cout << "  -- " << check.failure;
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

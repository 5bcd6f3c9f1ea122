// Command-line front end: commitments, proofs, simulation runs and analyses.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cdiv/analysis.hpp>
#include <cdiv/io.hpp>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cdiv::Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
    if (!out) throw cdiv::Error("cannot write " + path.string());
}

// IMPL[:STEP]=PATH, or PATH with the impl taken from the file stem.
cdiv::CodeSegment parse_segment_arg(const std::string& arg, const std::string& default_step) {
    cdiv::CodeSegment segment;
    fs::path path;
    if (const auto eq = arg.find('='); eq != std::string::npos) {
        const std::string key = arg.substr(0, eq);
        path = arg.substr(eq + 1);
        const auto colon = key.find(':');
        segment.impl_id = key.substr(0, colon);
        segment.step_id = colon == std::string::npos ? default_step : key.substr(colon + 1);
    } else {
        path = arg;
        segment.impl_id = path.stem().string();
        segment.step_id = default_step;
    }
    const std::string code = read_file(path);
    segment.code.assign(code.begin(), code.end());
    return segment;
}

std::map<cdiv::ImplId, std::uint64_t> parse_counts(const std::string& spec) {
    std::map<cdiv::ImplId, std::uint64_t> counts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--counts", "expected IMPL=COUNT, got '" + item + "'");
        try {
            std::size_t used = 0;
            const auto value = std::stoull(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
            counts[item.substr(0, eq)] = value;
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--counts", "bad count in '" + item + "'");
        }
    }
    if (counts.empty()) throw CLI::ValidationError("--counts", "no counts given");
    return counts;
}

cdiv::ScenarioConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed) {
    cdiv::ScenarioConfig config = cdiv::config_from_json(read_file(path));
    if (seed) config.seed = *seed;
    return config;
}

void simulate_one(const cdiv::ScenarioConfig& config, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    cdiv::Simulation sim(config);
    while (!sim.done()) sim.step();
    const cdiv::TimeSeries& series = sim.series();

    std::ostringstream csv;
    cdiv::write_series_csv(series, csv);
    write_file(out_dir / "series.csv", csv.str());

    std::ostringstream plot;
    cdiv::emit_plot_data(series, plot);
    write_file(out_dir / "plot.csv", plot.str());

    const std::string canonical = cdiv::config_to_json(config);
    write_file(out_dir / "config.json", canonical);
    write_file(out_dir / "series.json", cdiv::series_to_json(config, series));

    write_file(out_dir / "contract.json", cdiv::contract_to_json(sim.contract()));

    const cdiv::RunManifest manifest{
        cdiv::sha256(cdiv::to_bytes(canonical)),
        config.seed,
        {"config.json", "series.csv", "plot.csv", "series.json", "contract.json"},
        std::string(cdiv::tool_version()),
    };
    write_file(out_dir / "manifest.json", cdiv::manifest_to_json(manifest));
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw CLI::ValidationError("--seeds", "expected A..B");
    try {
        const auto lo = std::stoull(text.substr(0, dots));
        const auto hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw CLI::ValidationError("--seeds", "empty range");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--seeds", "expected A..B with integer bounds");
    }
}

json report_json(const cdiv::ResilienceReport& r) {
    return {
        {"buggy_impl", r.buggy_impl},
        {"slashed_count", r.slashed_count},
        {"affected_fraction", r.affected_fraction.value()},
        {"affected_count", r.affected_fraction.count},
        {"total_count", r.affected_fraction.total},
        {"class", cdiv::to_string(r.cls)},
        {"corrupted_state_accepted", r.corrupted_state_accepted},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verifiable client diversity: commitments, proofs, reward contract and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cdiv::tool_version()));

    // commit
    auto* commit = app.add_subcommand("commit", "Print code-identity commitments for code files");
    std::vector<std::string> commit_files;
    std::string commit_step = "attest";
    commit->add_option("files", commit_files, "IMPL[:STEP]=PATH or PATH (impl = file stem)")->required();
    commit->add_option("--step", commit_step, "Protocol step for bare PATH arguments");

    // prove
    auto* prove = app.add_subcommand("prove", "Generate a proof for one scenario validator");
    std::string prove_config;
    std::optional<std::uint64_t> prove_seed;
    std::size_t prove_validator = 0;
    std::string prove_impl;
    std::uint64_t prove_block = 0;
    std::string prove_mechanism;
    std::string prove_out;
    prove->add_option("--config", prove_config)->required()->check(CLI::ExistingFile);
    prove->add_option("--seed", prove_seed);
    prove->add_option("--validator", prove_validator, "Validator index")->required();
    prove->add_option("--impl", prove_impl)->required();
    prove->add_option("--block", prove_block)->required();
    prove->add_option("--mechanism", prove_mechanism, "succinct|attested (defaults to the config's)");
    prove->add_option("--out", prove_out)->required();

    // verify
    auto* verify = app.add_subcommand("verify", "Verify an encoded proof against a contract snapshot");
    std::string verify_snapshot;
    std::string verify_proof_file;
    verify->add_option("--snapshot", verify_snapshot, "Contract snapshot (registry and trusted keys)")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("proof", verify_proof_file)->required()->check(CLI::ExistingFile);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write series, plot data and manifest");
    std::string sim_config;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_seeds;
    std::string sim_out;
    simulate->add_option("--config", sim_config)->required()->check(CLI::ExistingFile);
    auto* seed_opt = simulate->add_option("--seed", sim_seed);
    simulate->add_option("--seeds", sim_seeds, "Seed range A..B; one run per seed under <out>/seed-<n>")
        ->excludes(seed_opt);
    simulate->add_option("--out", sim_out)->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Resilience and cost analyses");
    analyze->require_subcommand(1);
    auto* slash = analyze->add_subcommand("slash", "Impact of a bug in one implementation");
    std::string slash_counts;
    std::string slash_buggy;
    slash->add_option("--counts", slash_counts, "IMPL=COUNT,...")->required();
    slash->add_option("--buggy", slash_buggy)->required();
    auto* econ = analyze->add_subcommand("econ", "Proving feasibility and verification break-even");
    std::string econ_mechanism;
    cdiv::RewardUnits econ_gas_price = 0;
    std::string econ_gas_stat = "avg";
    double econ_block_time = 12.0;
    econ->add_option("--mechanism", econ_mechanism)->required();
    econ->add_option("--gas-price", econ_gas_price, "Reward units per gas")->required()->check(CLI::NonNegativeNumber);
    econ->add_option("--gas", econ_gas_stat, "min|avg|max")->check(CLI::IsMember({"min", "avg", "max"}));
    econ->add_option("--block-time", econ_block_time, "Seconds per block")->check(CLI::PositiveNumber);

    // contract
    auto* contract = app.add_subcommand("contract", "Contract snapshots");
    contract->require_subcommand(1);
    auto* inspect = contract->add_subcommand("inspect", "Print distribution and minority of a snapshot");
    std::string inspect_snapshot;
    inspect->add_option("snapshot", inspect_snapshot)->required()->check(CLI::ExistingFile);
    auto* init = contract->add_subcommand("init", "Write the genesis snapshot of a scenario");
    std::string init_config;
    std::optional<std::uint64_t> init_seed;
    std::string init_out;
    init->add_option("--config", init_config)->required()->check(CLI::ExistingFile);
    init->add_option("--seed", init_seed);
    init->add_option("--out", init_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        std::cerr << app.help();
        return kUsageError;
    }

    try {
        if (*commit) {
            std::vector<cdiv::CodeSegment> segments;
            for (const auto& arg : commit_files) segments.push_back(parse_segment_arg(arg, commit_step));
            const auto registry = cdiv::build_registry(segments);
            for (const auto& e : registry.entries()) fmt::print("{} {} {}\n", e.impl_id, e.step_id, cdiv::to_hex(e.digest));
        } else if (*prove) {
            const auto config = load_config(prove_config, prove_seed);
            if (prove_validator >= config.n_validators) throw cdiv::Error("validator index out of range");
            cdiv::Simulation sim(config);
            const auto it = sim.identities().find(prove_impl);
            if (it == sim.identities().end()) throw cdiv::Error("unknown implementation '" + prove_impl + "'");
            const auto mechanism = prove_mechanism.empty() ? config.mechanism : cdiv::parse_mechanism(prove_mechanism);
            const auto proof = cdiv::generate_proof(mechanism, it->second, prove_block,
                                                    cdiv::validator_key(config.seed, prove_validator));
            const auto bytes = cdiv::encode(proof);
            write_file(prove_out, std::string(bytes.begin(), bytes.end()));
        } else if (*verify) {
            const auto state = cdiv::contract_from_json(read_file(verify_snapshot));
            const std::string raw = read_file(verify_proof_file);
            const auto proof = cdiv::decode_proof(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
            try {
                const auto digest = cdiv::verify_proof(state.registry(), state.trusted_keys(), proof);
                const auto* identity = state.registry().find(digest);
                fmt::print("valid {} {} {} block={}\n", identity->impl_id, identity->step_id, cdiv::to_hex(digest),
                           proof.block_number);
            } catch (const cdiv::ProofError& e) {
                fmt::print(stderr, "invalid ({}): {}\n", cdiv::to_string(e.kind()), e.what());
                return kDomainError;
            }
        } else if (*simulate) {
            if (!sim_seeds.empty()) {
                const auto [lo, hi] = parse_seed_range(sim_seeds);
                std::vector<std::future<void>> runs;
                for (auto seed = lo;; ++seed) {
                    const auto config = load_config(sim_config, seed);
                    runs.push_back(std::async(std::launch::async, simulate_one, config,
                                              fs::path(sim_out) / fmt::format("seed-{}", seed)));
                    if (seed == hi) break;
                }
                for (auto& run : runs) run.get();
            } else {
                simulate_one(load_config(sim_config, sim_seed), sim_out);
            }
        } else if (*slash) {
            const auto report = cdiv::slash_impact(parse_counts(slash_counts), slash_buggy);
            fmt::print("{}\n", report_json(report).dump(2));
        } else if (*econ) {
            const auto mechanism = cdiv::parse_mechanism(econ_mechanism);
            const auto stat = econ_gas_stat == "min"   ? cdiv::GasStatistic::Min
                              : econ_gas_stat == "max" ? cdiv::GasStatistic::Max
                                                       : cdiv::GasStatistic::Avg;
            const auto cost = cdiv::default_cost_model(mechanism);
            const auto feasibility = cdiv::proving_feasible(mechanism, econ_block_time);
            const json out = {
                {"mechanism", cdiv::to_string(mechanism)},
                {"gas_price", econ_gas_price},
                {"gas_statistic", econ_gas_stat},
                {"verify_gas", {{"min", cost.verify_gas_min}, {"avg", cost.verify_gas_avg}, {"max", cost.verify_gas_max}}},
                {"break_even_reward", cdiv::break_even_reward(mechanism, econ_gas_price, stat)},
                {"block_time_s", econ_block_time},
                {"proving_time_s", cost.proving_time_s},
                {"feasible", feasibility.feasible},
                {"margin", feasibility.margin},
            };
            fmt::print("{}\n", out.dump(2));
        } else if (*inspect) {
            const auto state = cdiv::contract_from_json(read_file(inspect_snapshot));
            const auto counts = state.impl_counts();
            fmt::print("block {}  treasury {}  window {}\n", state.current_block(), state.treasury(),
                       state.window().total());
            for (const auto& [impl, share] : state.get_distribution()) {
                fmt::print("{} {} {:.4f}\n", impl, counts.at(impl), share);
            }
            fmt::print("minority {}\n", state.get_minority());
        } else if (*init) {
            const auto config = load_config(init_config, init_seed);
            write_file(init_out, cdiv::contract_to_json(cdiv::genesis_contract(config)));
        }
    } catch (const CLI::ValidationError& e) {
        fmt::print(stderr, "{}\n", e.what());
        std::cerr << app.help();
        return kUsageError;
    } catch (const cdiv::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kDomainError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kDomainError;
    }
    return kOk;
}

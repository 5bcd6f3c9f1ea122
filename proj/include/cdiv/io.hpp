#pragma once

#include <cdiv/sim.hpp>

#include <iosfwd>

namespace cdiv {

/// Canonical JSON for a scenario (sorted keys, compact). Defaults are resolved.
std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(std::string_view text);

/// block,impl_<id>_count...,rewards_paid,treasury
void write_series_csv(const TimeSeries& series, std::ostream& out);

/// Long format: block,impl_id,count,share
void emit_plot_data(const TimeSeries& series, std::ostream& out);

/// Config plus the full series, for provenance.
std::string series_to_json(const ScenarioConfig& config, const TimeSeries& series);

struct RunManifest {
    Digest config_hash{};
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;
    std::string tool_version;
};

std::string manifest_to_json(const RunManifest& manifest);

std::string_view tool_version();

}  // namespace cdiv

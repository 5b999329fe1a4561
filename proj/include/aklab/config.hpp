#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace aklab {

/// Experiment kinds the runner understands.
extern const char* const kExperimentKinds[7];

/// Validate a raw config against the schema and fill defaults. Throws
/// std::invalid_argument naming every offending field. The returned object is
/// the fully resolved config echoed into the manifest.
nlohmann::json resolve_config(const nlohmann::json& raw);

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::optional<int> threads_override;
    bool check_only = false;
};

/// Run one experiment: writes manifest + outputs into the output directory and
/// returns the process exit status (nonzero iff any in-experiment check
/// failed). The output directory resolves as --out, else the config's "out",
/// else $AKLAB_OUT, else "./out".
int run_experiment(const nlohmann::json& raw_config, const RunOptions& opts);

}  // namespace aklab

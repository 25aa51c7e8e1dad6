#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwtucker/channel.hpp"
#include "gwtucker/decompose.hpp"

namespace gwt {

/// Optional univariate sweep over a rank axis.
struct SweepSpec {
    char axis = 'n';          // 'n' or 'p'
    std::vector<int> values;  // non-empty
};

struct ExperimentConfig {
    SystemTopology topology;
    CompressionRanks ranks;
    ModelKind model = ModelKind::groupwise;
    int iters = 20;
    std::uint64_t seed = 1;
    InterferenceScope scope = InterferenceScope::paper_experiment;
    GeneratorParams generator;
    std::string out_dir = "out";
    std::optional<SweepSpec> sweep;

    /// Field-level validation; compressed precoding needs at least L
    /// singular directions on modes 1 and 2.
    void validate() const;
};

/// Flat key = value text. '#' starts a comment; unknown or duplicate keys
/// are errors. Recognized keys: J, K, M, N, P, L, sigma, m, n, p, model,
/// iters, seed, scope, rays, tap_decay, rician, coeff_decay, out_dir,
/// sweep_axis, sweep_values.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace gwt

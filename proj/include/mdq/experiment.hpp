#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdq/model.hpp"

namespace mdq {

enum class ExperimentKind { game_table, saddle_check, simulate, convergence, policy_compare };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentSpec {
    std::string config_path;
    ExperimentKind kind = ExperimentKind::game_table;
    std::vector<std::uint64_t> n_grid;
    std::optional<double> T;      // default: default_horizon of the game
    std::size_t M = 1000;
    std::optional<double> eps0;   // default: min(0.1, min_i D_i / 8)
    std::uint64_t seed = 1;
    std::string out;
    std::vector<double> x_grid;   // game-table / saddle-check; default grid when empty
    bool include_timestamp = false;
    std::string policy = "ao";    // simulate only
    std::string event_log;        // simulate only; empty disables
    bool use_theta_n = false;
};

/// Exit codes of run_experiment.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the experiment and writes its CSV. Errors are reported on stderr and
/// mapped to kExitConfig (bad config, spec or output path) or kExitNumeric.
int run_experiment(const ExperimentSpec& spec);

/// Same, with the model already loaded (config_path is ignored).
int run_experiment(const ExperimentSpec& spec, const ModelParams& params);

double default_eps0(const ModelParams& params);

}  // namespace mdq

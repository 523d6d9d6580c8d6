// Command-line front end: runs one experiment on a model config and writes CSV.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdq/experiment.hpp"

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::stringstream is(item);
        T v{};
        // 1e4 style entries are accepted for integer grids.
        double d = 0.0;
        if (!(is >> d) || !is.eof()) throw CLI::ValidationError(flag, "bad list entry '" + item + "'");
        v = static_cast<T>(d);
        if (static_cast<double>(v) != d) throw CLI::ValidationError(flag, "non-integral entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moderate-deviation queueing control: game solver and simulation experiments"};
    mdq::ExperimentSpec spec;
    std::string kind = "game-table";
    std::string n_grid;
    std::string x_grid;
    double horizon = 0.0;
    double eps0 = 0.0;

    app.add_option("--config", spec.config_path, "Model config (JSON)")->required();
    app.add_option("--experiment", kind,
                   "game-table | saddle-check | simulate | convergence | policy-compare")
        ->capture_default_str();
    app.add_option("--seed", spec.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--replications", spec.M, "Replications per estimate (M)")->capture_default_str();
    app.add_option("--n-grid", n_grid, "Comma-separated scaling parameters n, e.g. 100,1000,1e4");
    app.add_option("--out", spec.out, "Output CSV path")->required();
    auto* h_opt = app.add_option("--horizon", horizon, "Horizon T (default: game-derived)");
    auto* e_opt = app.add_option("--eps0", eps0, "Curve offset eps0 (default: min(0.1, min D/8))");
    app.add_option("--include-timestamp", spec.include_timestamp,
                   "Write a timestamp comment line at the top of CSV output")
        ->capture_default_str();
    app.add_option("--x-grid", x_grid, "Comma-separated workload values for game-table / saddle-check");
    app.add_option("--policy", spec.policy, "simulate: ao | static-priority | full-buffer-reject-only")
        ->capture_default_str();
    app.add_option("--event-log", spec.event_log, "simulate: event-log CSV for the first run");
    app.add_flag("--theta-n", spec.use_theta_n, "Use theta^n instead of theta in the rejection threshold");

    try {
        app.parse(argc, argv);
        spec.kind = mdq::parse_experiment_kind(kind);
        spec.n_grid = parse_list<std::uint64_t>(n_grid, "--n-grid");
        if (!x_grid.empty()) {
            std::stringstream ss(x_grid);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) spec.x_grid.push_back(std::stod(item));
            }
        }
        if (h_opt->count()) spec.T = horizon;
        if (e_opt->count()) spec.eps0 = eps0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mdq::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return mdq::kExitConfig;
    }
    return mdq::run_experiment(spec);
}

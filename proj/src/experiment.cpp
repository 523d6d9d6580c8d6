#include "mdq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "mdq/config.hpp"
#include "mdq/csv.hpp"
#include "mdq/game.hpp"
#include "mdq/rscost.hpp"
#include "mdq/sim.hpp"

namespace mdq {

namespace {

/// Bad experiment spec or unusable output; maps to kExitConfig.
struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::optional<std::string> comment_for(const ExperimentSpec& spec) {
    if (spec.include_timestamp) return timestamp_comment();
    return std::nullopt;
}

std::unique_ptr<CsvWriter> open_writer(const ExperimentSpec& spec,
                                       const std::vector<std::string>& header) {
    try {
        return std::make_unique<CsvWriter>(spec.out, header, comment_for(spec));
    } catch (const std::runtime_error& e) {
        throw SpecError(e.what());
    }
}

double horizon_for(const ExperimentSpec& spec, const GameSolution& game) {
    const double T = spec.T ? *spec.T : default_horizon(game);
    if (!(T > 0.0) || !std::isfinite(T)) throw SpecError("horizon must be positive and finite");
    return T;
}

void require_n_grid(const ExperimentSpec& spec) {
    if (spec.n_grid.empty()) throw SpecError("--n-grid must be nonempty for this experiment");
    for (auto n : spec.n_grid) {
        if (n == 0) throw SpecError("--n-grid entries must be positive");
    }
}

void require_finite(const GameSolution& game) {
    if (!game.finite()) {
        throw std::domain_error("the game is infinite (-y < r/(4s)); no threshold policy exists");
    }
}

void game_table(const ExperimentSpec& spec, const ModelParams& params) {
    const GameSolution game = solve_game(params);
    std::vector<double> xs = spec.x_grid;
    if (xs.empty()) {
        for (int k = 0; k <= 20; ++k) xs.push_back(game.D() * k / 20.0);
    }
    for (double x : xs) {
        if (!(x >= 0.0 && x <= game.D())) throw SpecError("x-grid value outside [0, D]");
    }
    auto w = open_writer(spec, {"x", "V(x)", "beta0", "finite"});
    const double beta0 = game.finite() ? game.beta0() : std::nan("");
    for (double x : xs) {
        w->row({x, game.V(x), beta0, std::int64_t{game.finite() ? 1 : 0}});
    }
    w->close();
}

void saddle_check(const ExperimentSpec& spec, const ModelParams& params) {
    const GameSolution game = solve_game(params);
    require_finite(game);
    const double beta0 = game.beta0();
    std::vector<double> xs = spec.x_grid;
    if (xs.empty()) {
        for (int k = 0; k < 10; ++k) xs.push_back(beta0 * (k + 0.5) / 10.0);
    }
    for (double x : xs) {
        if (!(x > 0.0 && x < beta0)) throw SpecError("saddle-check x-grid values must lie in (0, beta0)");
    }
    const double T = horizon_for(spec, game);
    auto w = open_writer(spec, {"x", "V(x)", "psi_star_cost", "playout_sup", "best_candidate",
                                "best_T", "hitting_time_ode", "hitting_time_quadrature"});
    std::vector<double> T_grid;
    for (int k = 0; k <= 100; ++k) T_grid.push_back(T * k / 100.0);
    for (double x : xs) {
        const ReferencePath ref = psi_star(game, x);
        const GamePlay play = barrier_strategy(game, beta0, ref.psi, x);
        const double at_star = cost_at(game, play, ref.hitting_time);

        std::vector<MaximizerControl> family =
            random_maximizer_family(game, 200, T, 2.0 * (game.V(x) + 1.0), spec.seed);
        family.push_back({PLPath::constant(0.0, T), PLPath::constant(0.0, T)});
        family.push_back(psi_sharp(game, T));
        family.push_back(ref.psi);
        std::vector<double> grid = T_grid;
        grid.push_back(ref.hitting_time);
        const PlayoutResult best = playout_sup(game, x, beta0, family, grid);
        w->row({x, game.V(x), at_star, best.value, static_cast<std::int64_t>(best.best_candidate),
                best.best_T, ref.hitting_time, game.hitting_time(x)});
    }
    w->close();
}

struct NthSetup {
    NthSystem system;
    std::unique_ptr<Policy> policy;
};

NthSetup setup(const ModelParams& params, const GameSolution& game, std::uint64_t n,
               PolicyKind kind, bool use_theta_n) {
    NthSetup s{instantiate(params, n), nullptr};
    s.policy = make_policy(kind, params, s.system, game.geometry(), game.beta0(), use_theta_n);
    return s;
}

void simulate(const ExperimentSpec& spec, const ModelParams& params) {
    require_n_grid(spec);
    PolicyKind kind;
    try {
        kind = parse_policy_kind(spec.policy);
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
    const double eps0 = spec.eps0 ? *spec.eps0 : default_eps0(params);
    const GameSolution game = solve_game(params, eps0);
    require_finite(game);
    const double T = horizon_for(spec, game);
    const auto& geo = game.geometry();
    const double astar = geo.astar(game.beta0());
    const std::size_t I = params.num_classes();

    auto w = open_writer(spec, {"n", "b_n", "policy", "replication", "T", "events", "final_workload",
                                "off_curve_fraction", "admitted_above_threshold_fraction",
                                "rejections", "istar_rejection_share", "H_T"});
    std::unique_ptr<CsvWriter> log;
    if (!spec.event_log.empty()) {
        std::vector<std::string> header{"time", "kind", "class"};
        for (std::size_t i = 0; i < I; ++i) header.push_back("X" + std::to_string(i + 1));
        try {
            log = std::make_unique<CsvWriter>(spec.event_log, header, comment_for(spec));
        } catch (const std::runtime_error& e) {
            throw SpecError(e.what());
        }
    }
    for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
        const auto n = spec.n_grid[ni];
        const NthSetup s = setup(params, game, n, kind, spec.use_theta_n);
        for (std::size_t m = 0; m < spec.M; ++m) {
            const Trajectory traj = run(s.system, *s.policy, T, spec.seed, m);
            const TrackingSummary sum = summarize_tracking(traj, geo, astar, geo.istar(), spec.use_theta_n);
            const CostPath H = running_cost(traj, params);
            std::int64_t rej = 0;
            for (auto r : sum.rejections) rej += r;
            w->row({static_cast<std::int64_t>(n), s.system.b_n, to_string(kind),
                    static_cast<std::int64_t>(m), T, static_cast<std::int64_t>(traj.size()),
                    traj.workload(traj.size() - 1), sum.off_curve_fraction,
                    sum.admitted_above_threshold_fraction, rej, sum.istar_rejection_share,
                    H.value.back()});
            if (log && ni == 0 && m == 0) {
                for (std::size_t k = 0; k < traj.size(); ++k) {
                    std::vector<CsvCell> row{traj.time[k], to_string(traj.kind[k]),
                                             static_cast<std::int64_t>(traj.cls[k] < 0 ? 0 : traj.cls[k] + 1)};
                    for (auto x : traj.X_at(k)) row.emplace_back(x);
                    log->row(row);
                }
            }
        }
    }
    if (log) log->close();
    w->close();
}

void estimates(const ExperimentSpec& spec, const ModelParams& params,
               const std::vector<PolicyKind>& kinds) {
    require_n_grid(spec);
    if (spec.M < 2) throw SpecError("--replications must be at least 2");
    const double eps0 = spec.eps0 ? *spec.eps0 : default_eps0(params);
    const GameSolution game = solve_game(params, eps0);
    require_finite(game);
    const double T = horizon_for(spec, game);
    const double v_ref = game.V(game.initial_workload());
    auto w = open_writer(spec, {"n", "b_n", "policy", "T", "M", "value", "ess", "heavy_tail", "V_ref"});
    for (auto n : spec.n_grid) {
        for (PolicyKind kind : kinds) {
            const NthSetup s = setup(params, game, n, kind, spec.use_theta_n);
            const RsEstimate est = estimate_Jn(s.system, params, *s.policy, T, spec.M, spec.seed);
            if (!std::isfinite(est.value)) throw std::runtime_error("nonfinite J^n estimate");
            w->row({static_cast<std::int64_t>(n), s.system.b_n, to_string(kind), T,
                    static_cast<std::int64_t>(spec.M), est.value, est.ess,
                    std::int64_t{est.heavy_tail ? 1 : 0}, v_ref});
        }
    }
    w->close();
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "game-table" || name == "game") return ExperimentKind::game_table;
    if (name == "saddle-check") return ExperimentKind::saddle_check;
    if (name == "simulate") return ExperimentKind::simulate;
    if (name == "convergence") return ExperimentKind::convergence;
    if (name == "policy-compare") return ExperimentKind::policy_compare;
    throw std::invalid_argument("unknown experiment kind \"" + name + "\"");
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::game_table: return "game-table";
        case ExperimentKind::saddle_check: return "saddle-check";
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::convergence: return "convergence";
        case ExperimentKind::policy_compare: return "policy-compare";
    }
    return "unknown";
}

double default_eps0(const ModelParams& params) {
    double min_d = params.classes.at(0).D;
    for (const auto& c : params.classes) min_d = std::min(min_d, c.D);
    return std::min(0.1, min_d / 8.0);
}

int run_experiment(const ExperimentSpec& spec, const ModelParams& params) {
    try {
        if (spec.out.empty()) throw SpecError("--out is required");
        const ValidationReport report = validate(params);
        if (!report.ok()) throw ConfigError("model", report.summary());
        switch (spec.kind) {
            case ExperimentKind::game_table: game_table(spec, params); break;
            case ExperimentKind::saddle_check: saddle_check(spec, params); break;
            case ExperimentKind::simulate: simulate(spec, params); break;
            case ExperimentKind::convergence: estimates(spec, params, {PolicyKind::ao}); break;
            case ExperimentKind::policy_compare:
                estimates(spec, params,
                          {PolicyKind::ao, PolicyKind::static_priority,
                           PolicyKind::full_buffer_reject_only});
                break;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

int run_experiment(const ExperimentSpec& spec) {
    ModelParams params;
    try {
        params = load_model(spec.config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_experiment(spec, params);
}

}  // namespace mdq

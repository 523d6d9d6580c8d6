#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdq/model.hpp"
#include "mdq/paths.hpp"
#include "mdq/workload.hpp"

namespace mdq {

/// Path control of the maximizing player: perturbations of the workload
/// arrival (psi1) and service (psi2) processes. Both start at zero.
struct MaximizerControl {
    PLPath psi1;
    PLPath psi2;

    double horizon() const { return std::min(psi1.horizon(), psi2.horizon()); }
    MaximizerControl extend_constant(double t) const {
        return {psi1.extend_constant(t), psi2.extend_constant(t)};
    }
};

/// s1 * int (psi1')^2 + s2 * int (psi2')^2 over [0, T]. Throws
/// std::invalid_argument when a path does not start at 0 or is shorter than T.
double rate_I(const MaximizerControl& psi, double s1, double s2, double T);

/// sum_k weights[k] * int (psi_k')^2 over [0, T], same preconditions as rate_I.
double rate_J(std::span<const PLPath> psi, std::span<const double> weights, double T);

/// Per-class weights 1 / (2 lambda_i var_ia) of the arrival rate function.
std::vector<double> arrival_rate_weights(const ModelParams& params);
/// Per-class weights 1 / (2 mu_i var_st) of the service rate function.
std::vector<double> service_rate_weights(const ModelParams& params);

/// Cheapest split of a one-dimensional perturbation psi into per-class
/// perturbations psi_i with sum_i theta_i psi_i(l_i u) = psi(u), where the
/// cost is sum_i alpha_i int (psi_i')^2.
struct Decomposition {
    std::vector<PLPath> components;
    /// (sum_k theta_k^2 l_k / alpha_k)^{-1}; the minimal cost is constant * int psi'^2.
    double constant = 0.0;
};

Decomposition decompose(const PLPath& psi, std::span<const double> alpha,
                        std::span<const double> speeds, std::span<const double> theta);

/// Solved one-dimensional game: constants, free boundary and value function.
class GameSolution {
public:
    GameSolution(const ModelParams& params, std::optional<double> eps0);

    const WorkloadGeometry& geometry() const { return geometry_; }
    double y() const { return y_; }
    double s1() const { return s1_; }
    double s2() const { return s2_; }
    double s() const { return s_; }
    double r() const { return geometry_.r(); }
    std::size_t istar() const { return geometry_.istar(); }
    double D() const { return geometry_.D(); }
    bool finite() const { return finite_; }
    /// Free boundary; throws std::domain_error for an infinite game.
    double beta0() const;
    /// Initial workload theta . x0.
    double initial_workload() const { return x_init_; }

    /// Value function on [0, D]; +infinity when the game is infinite.
    double V(double x) const;
    /// dV/dx: 2s(-y - sqrt(y^2 - h(x)/s)) below beta0, r above.
    double V_slope(double x) const;
    /// Left derivative of V at beta0, in closed form.
    double left_slope_at_beta0() const;
    /// tau*_x = int_0^x (y^2 - h(u)/s)^{-1/2} du by quadrature.
    double hitting_time(double x) const;

private:
    double integrate_value(double lo, double hi) const;

    WorkloadGeometry geometry_;
    double y_ = 0.0;
    double s1_ = 0.0;
    double s2_ = 0.0;
    double s_ = 0.0;
    bool finite_ = false;
    double beta0_ = 0.0;
    double x_init_ = 0.0;
    std::vector<double> knots_;     // breakpoints of h in [0, beta0], plus beta0
    std::vector<double> V_knots_;   // V at knots_
};

GameSolution solve_game(const ModelParams& params, std::optional<double> eps0 = std::nullopt);

/// Default termination horizon 4 (tau*_{beta0} + D / |y + r/(2s)| + 1); the
/// middle term is dropped when y + r/(2s) = 0.
double default_horizon(const GameSolution& game);

/// Linear paths with slopes r/(2 s1) and -r/(2 s2) on [0, T].
MaximizerControl psi_sharp(const GameSolution& game, double T);

struct ReferencePath {
    MaximizerControl psi;
    /// Hitting time of zero by x + y t + psi1 - psi2 (ODE solution).
    double hitting_time = 0.0;
    /// The driven state x + y t + psi1 - psi2 on the ODE grid.
    PLPath state;
};

/// Maximizer path psi*_x for 0 <= x < beta0: RK4 integration of the driven
/// state z' = -sqrt(y^2 - h(z)/s) from x until it reaches 0, with step
/// 1e-4 times the quadrature estimate of the hitting time.
ReferencePath psi_star(const GameSolution& game, double x);

/// One play of the game against a barrier minimizer.
struct GamePlay {
    double x = 0.0;
    MaximizerControl psi;
    PLPath zeta;  // idleness (pushes up at 0)
    PLPath rho;   // rejection (pushes down at the barrier)
    PLPath phi;   // dynamics
    double T = 0.0;
};

/// beta-barrier strategy: (phi, zeta, rho) = Skorohod map on [0, beta] of
/// x + y t + psi1 - psi2, over the horizon of psi.
GamePlay barrier_strategy(const GameSolution& game, double beta, const MaximizerControl& psi,
                          double x);

/// int_0^T h(phi) dt + r rho(T) - I(T, psi) with T = play.T.
double cost(const GameSolution& game, const GamePlay& play);
/// Same cost up to an intermediate time T <= play.T.
double cost_at(const GameSolution& game, const GamePlay& play, double T);

struct PlayoutResult {
    double value = 0.0;
    std::size_t best_candidate = 0;
    double best_T = 0.0;
};

/// max over candidates and termination times of the cost under the
/// level-barrier strategy. Candidates shorter than a termination time are
/// held constant past their horizon.
PlayoutResult playout_sup(const GameSolution& game, double x, double level,
                          std::span<const MaximizerControl> family,
                          std::span<const double> T_grid);

/// Random piecewise-linear maximizer paths on [0, horizon] with rate
/// function at most max_rate. Deterministic given the seed.
std::vector<MaximizerControl> random_maximizer_family(const GameSolution& game,
                                                      std::size_t count, double horizon,
                                                      double max_rate, std::uint64_t seed);

struct AboveBarrierCheck {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Crossing time of beta0 + delta, or T_max when truncated.
    double tau = 0.0;
    bool truncated = false;
};

/// Plays psi_sharp against a given minimizer (zeta, rho) from x > beta0 + delta
/// and compares the cost accrued until the dynamics cross beta0 + delta with
/// the cost r (x - beta0 - delta) of an immediate rejection. Throws
/// std::invalid_argument when x <= beta0 + delta or rho(0) - zeta(0) >= x - beta0 - delta.
AboveBarrierCheck check_above_barrier(const GameSolution& game, double x, const PLPath& zeta,
                                      const PLPath& rho, double delta, double T_max);

}  // namespace mdq

#include "mdq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace mdq {

namespace {

constexpr double kQuadTolerance = 1e-10;

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, lo, hi, kQuadTolerance);
}

void require_anchored(const PLPath& p, double T, const char* what) {
    if (p.front() != 0.0) throw std::invalid_argument(std::string(what) + ": path must start at 0");
    if (p.horizon() < T) throw std::invalid_argument(std::string(what) + ": path shorter than T");
}

/// Cumulative int h(phi) dt at the knots of phi refined by the crossings of
/// the breakpoints of h, so that h(phi) is linear between consecutive knots.
struct HoldingProfile {
    std::vector<double> t;
    std::vector<double> h;
    std::vector<double> cumulative;
};

HoldingProfile holding_profile(const WorkloadGeometry& geom, const PLPath& phi) {
    const auto bps = geom.h_breakpoints();
    const double D = geom.D();
    auto h_of = [&](double v) {
        if (v < -1e-12 || v > D * (1.0 + 1e-12) + 1e-12) {
            throw std::out_of_range("holding cost: dynamics left [0, D]");
        }
        return geom.h(std::clamp(v, 0.0, D));
    };

    HoldingProfile prof;
    const auto& g = phi.grid();
    const auto& v = phi.values();
    auto push = [&](double t, double val) {
        const double hv = h_of(val);
        if (prof.t.empty()) {
            prof.cumulative.push_back(0.0);
        } else {
            const double dt = t - prof.t.back();
            prof.cumulative.push_back(prof.cumulative.back() + 0.5 * dt * (prof.h.back() + hv));
        }
        prof.t.push_back(t);
        prof.h.push_back(hv);
    };
    push(g[0], v[0]);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double v0 = v[k];
        const double v1 = v[k + 1];
        if (v0 != v1) {
            std::vector<double> cross;
            for (double b : bps) {
                if ((b - v0) * (b - v1) < 0.0) cross.push_back(g[k] + (g[k + 1] - g[k]) * (b - v0) / (v1 - v0));
            }
            std::sort(cross.begin(), cross.end());
            for (double tc : cross) {
                if (tc > prof.t.back() && tc < g[k + 1]) push(tc, phi(tc));
            }
        }
        push(g[k + 1], v1);
    }
    return prof;
}

double holding_upto(const WorkloadGeometry& geom, const HoldingProfile& prof, const PLPath& phi,
                    double T) {
    if (T <= 0.0) return 0.0;
    auto it = std::upper_bound(prof.t.begin(), prof.t.end(), T);
    const std::size_t k = static_cast<std::size_t>(it - prof.t.begin()) - 1;
    if (prof.t[k] == T) return prof.cumulative[k];
    const double hT = geom.h(std::clamp(phi(T), 0.0, geom.D()));
    return prof.cumulative[k] + 0.5 * (T - prof.t[k]) * (prof.h[k] + hT);
}

}  // namespace

double rate_I(const MaximizerControl& psi, double s1, double s2, double T) {
    require_anchored(psi.psi1, T, "rate_I");
    require_anchored(psi.psi2, T, "rate_I");
    return s1 * psi.psi1.energy(T) + s2 * psi.psi2.energy(T);
}

double rate_J(std::span<const PLPath> psi, std::span<const double> weights, double T) {
    if (psi.size() != weights.size()) throw std::invalid_argument("rate_J: size mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        require_anchored(psi[k], T, "rate_J");
        total += weights[k] * psi[k].energy(T);
    }
    return total;
}

std::vector<double> arrival_rate_weights(const ModelParams& params) {
    std::vector<double> w;
    for (const auto& c : params.classes) w.push_back(1.0 / (2.0 * c.lambda * c.var_ia));
    return w;
}

std::vector<double> service_rate_weights(const ModelParams& params) {
    std::vector<double> w;
    for (const auto& c : params.classes) w.push_back(1.0 / (2.0 * c.mu * c.var_st));
    return w;
}

Decomposition decompose(const PLPath& psi, std::span<const double> alpha,
                        std::span<const double> speeds, std::span<const double> theta) {
    const std::size_t I = theta.size();
    if (alpha.size() != I || speeds.size() != I || I == 0) {
        throw std::invalid_argument("decompose: alpha, speeds and theta must have equal nonzero size");
    }
    if (psi.front() != 0.0) throw std::invalid_argument("decompose: psi must start at 0");
    double denom = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
        if (!(speeds[i] > 0.0 && speeds[i] <= 1.0)) {
            throw std::invalid_argument("decompose: speeds must lie in (0, 1]");
        }
        if (!(alpha[i] > 0.0)) throw std::invalid_argument("decompose: weights must be positive");
        denom += theta[i] * theta[i] * speeds[i] / alpha[i];
    }
    Decomposition out;
    out.constant = 1.0 / denom;
    const double T = psi.horizon();
    for (std::size_t i = 0; i < I; ++i) {
        const double c = theta[i] * speeds[i] / alpha[i] * out.constant;
        std::vector<double> g;
        std::vector<double> v;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            g.push_back(psi.grid()[k] * speeds[i]);
            v.push_back(c * psi.values()[k]);
        }
        if (g.back() < T) {
            g.push_back(T);
            v.push_back(v.back());
        }
        out.components.emplace_back(std::move(g), std::move(v));
    }
    return out;
}

GameSolution::GameSolution(const ModelParams& params, std::optional<double> eps0)
    : geometry_(eps0 ? WorkloadGeometry(params, *eps0) : WorkloadGeometry(params)) {
    const auto& cls = params.classes;
    double inv_s1 = 0.0;
    double inv_s2 = 0.0;
    for (const auto& c : cls) {
        y_ += (c.tilde_lambda - c.rho() * c.tilde_mu) / c.mu;
        inv_s1 += 2.0 * c.rho() * c.var_ia / c.mu;
        inv_s2 += 2.0 * c.rho() * c.var_st / c.mu;
    }
    s1_ = 1.0 / inv_s1;
    s2_ = 1.0 / inv_s2;
    s_ = 1.0 / (inv_s1 + inv_s2);
    for (std::size_t i = 0; i < cls.size() && i < params.x0.size(); ++i) {
        x_init_ += params.x0[i] / cls[i].mu;
    }

    const double r = geometry_.r();
    finite_ = -y_ >= r / (4.0 * s_);
    if (!finite_) return;

    const double target = -r * r / (4.0 * s_) - r * y_;
    const double hD = geometry_.h(geometry_.D());
    beta0_ = target <= hD ? geometry_.h_inverse(std::max(target, 0.0)) : geometry_.D();

    knots_.push_back(0.0);
    for (double b : geometry_.h_breakpoints()) {
        if (b > 0.0 && b < beta0_) knots_.push_back(b);
    }
    if (beta0_ > 0.0) knots_.push_back(beta0_);
    V_knots_.push_back(0.0);
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        V_knots_.push_back(V_knots_.back() + integrate_value(knots_[k - 1], knots_[k]));
    }
}

GameSolution solve_game(const ModelParams& params, std::optional<double> eps0) {
    return GameSolution(params, eps0);
}

double GameSolution::beta0() const {
    if (!finite_) throw std::domain_error("beta0: the game value is infinite");
    return beta0_;
}

double GameSolution::integrate_value(double lo, double hi) const {
    const double s = s_;
    const double y = y_;
    const double D = geometry_.D();
    auto f = [&](double u) {
        const double rad = std::max(0.0, y * y - geometry_.h(std::min(u, D)) / s);
        return 2.0 * s * (-y - std::sqrt(rad));
    };
    return integrate(f, lo, hi);
}

double GameSolution::V(double x) const {
    if (!(x >= 0.0 && x <= geometry_.D())) throw std::out_of_range("V: state outside [0, D]");
    if (!finite_) return std::numeric_limits<double>::infinity();
    if (x > beta0_) return V_knots_.back() + r() * (x - beta0_);
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (knots_[k] == x) return V_knots_[k];
    return V_knots_[k] + integrate_value(knots_[k], x);
}

double GameSolution::V_slope(double x) const {
    if (!finite_) throw std::domain_error("V_slope: the game value is infinite");
    if (x > beta0_) return r();
    const double rad = std::max(0.0, y_ * y_ - geometry_.h(x) / s_);
    return 2.0 * s_ * (-y_ - std::sqrt(rad));
}

double GameSolution::left_slope_at_beta0() const {
    if (!finite_) throw std::domain_error("left_slope_at_beta0: the game value is infinite");
    const double rad = std::max(0.0, y_ * y_ - geometry_.h(beta0_) / s_);
    return 2.0 * s_ * (-y_ - std::sqrt(rad));
}

double GameSolution::hitting_time(double x) const {
    if (!finite_) throw std::domain_error("hitting_time: the game value is infinite");
    if (!(x >= 0.0 && x <= beta0_)) throw std::out_of_range("hitting_time: x outside [0, beta0]");
    const double s = s_;
    const double y = y_;
    auto f = [&](double u) {
        const double rad = y * y - geometry_.h(u) / s;
        return rad > 0.0 ? 1.0 / std::sqrt(rad) : std::numeric_limits<double>::max();
    };
    double total = 0.0;
    double lo = 0.0;
    for (double b : geometry_.h_breakpoints()) {
        if (b > lo && b < x) {
            total += integrate(f, lo, b);
            lo = b;
        }
    }
    return total + integrate(f, lo, x);
}

double default_horizon(const GameSolution& game) {
    const double tau = game.hitting_time(game.beta0());
    const double drift = std::abs(game.y() + game.r() / (2.0 * game.s()));
    const double travel = drift > 1e-12 ? game.D() / drift : 0.0;
    return 4.0 * (tau + travel + 1.0);
}

MaximizerControl psi_sharp(const GameSolution& game, double T) {
    const double r = game.r();
    return {PLPath::line(0.0, r / (2.0 * game.s1()), T), PLPath::line(0.0, -r / (2.0 * game.s2()), T)};
}

ReferencePath psi_star(const GameSolution& game, double x) {
    if (!game.finite()) throw std::domain_error("psi_star: the game value is infinite");
    if (!(x >= 0.0 && x < game.beta0())) throw std::out_of_range("psi_star: requires 0 <= x < beta0");
    ReferencePath out;
    if (x == 0.0) {
        out.psi = {PLPath(), PLPath()};
        out.state = PLPath({0.0}, {0.0});
        return out;
    }
    const auto& geom = game.geometry();
    const double y = game.y();
    const double s = game.s();
    auto drift = [&](double z) {
        const double rad = std::max(0.0, y * y - geom.h(std::clamp(z, 0.0, geom.D())) / s);
        return -std::sqrt(rad);
    };

    const double dt = 1e-4 * game.hitting_time(x);
    std::vector<double> t{0.0};
    std::vector<double> z{x};
    // z' = -sqrt(y^2 - h(z)/s) is strictly negative at z = 0, so the crossing
    // is transversal; cap the step count in case the start sits on beta0.
    const std::size_t max_steps = 1000000;
    while (z.back() > 0.0 && t.size() < max_steps) {
        const double z0 = z.back();
        const double k1 = drift(z0);
        const double k2 = drift(z0 + 0.5 * dt * k1);
        const double k3 = drift(z0 + 0.5 * dt * k2);
        const double k4 = drift(z0 + dt * k3);
        const double z1 = z0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t1 = t.back() + dt;
        if (z1 <= 0.0) {
            const double frac = z0 / (z0 - z1);
            const double th = t.back() + frac * dt;
            if (th > t.back()) {
                t.push_back(th);
                z.push_back(0.0);
            } else {
                z.back() = 0.0;
            }
            break;
        }
        t.push_back(t1);
        z.push_back(z1);
    }
    out.hitting_time = t.back();

    std::vector<double> p1(t.size());
    std::vector<double> p2(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double omega = z[k] - x - y * t[k];
        p1[k] = s / game.s1() * omega;
        p2[k] = -s / game.s2() * omega;
    }
    out.psi = {PLPath(t, std::move(p1)), PLPath(t, std::move(p2))};
    out.state = PLPath(std::move(t), std::move(z));
    return out;
}

GamePlay barrier_strategy(const GameSolution& game, double beta, const MaximizerControl& psi,
                          double x) {
    const double D = game.D();
    if (!(beta >= 0.0 && beta <= D)) throw std::out_of_range("barrier_strategy: beta outside [0, D]");
    if (!(x >= 0.0 && x <= D)) throw std::out_of_range("barrier_strategy: x outside [0, D]");

    const double T = psi.horizon();
    const PLPath drive = (psi.psi1 - psi.psi2) + PLPath::line(x, game.y(), T);
    GamePlay play;
    play.x = x;
    play.psi = psi;
    play.T = T;
    if (beta > 0.0) {
        ReflectionTriple refl = skorohod_map(drive, 0.0, beta);
        play.phi = std::move(refl.phi);
        play.zeta = std::move(refl.eta1);
        play.rho = std::move(refl.eta2);
        return play;
    }
    // Degenerate barrier: phi = 0, every increment of the drive is pushed back.
    const auto& g = drive.grid();
    const auto& w = drive.values();
    std::vector<double> up{std::max(-w[0], 0.0)};
    std::vector<double> down{std::max(w[0], 0.0)};
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double d = w[k + 1] - w[k];
        up.push_back(up.back() + std::max(-d, 0.0));
        down.push_back(down.back() + std::max(d, 0.0));
    }
    play.phi = PLPath(g, std::vector<double>(g.size(), 0.0));
    play.zeta = PLPath(g, std::move(up));
    play.rho = PLPath(g, std::move(down));
    return play;
}

double cost_at(const GameSolution& game, const GamePlay& play, double T) {
    if (!(T >= 0.0 && T <= play.T)) throw std::out_of_range("cost_at: T outside [0, play.T]");
    if (T == 0.0) return game.r() * play.rho.front();
    const auto prof = holding_profile(game.geometry(), play.phi);
    return holding_upto(game.geometry(), prof, play.phi, T) + game.r() * play.rho(T) -
           rate_I(play.psi, game.s1(), game.s2(), T);
}

double cost(const GameSolution& game, const GamePlay& play) { return cost_at(game, play, play.T); }

PlayoutResult playout_sup(const GameSolution& game, double x, double level,
                          std::span<const MaximizerControl> family,
                          std::span<const double> T_grid) {
    if (family.empty()) throw std::invalid_argument("playout_sup: empty candidate family");
    if (T_grid.empty()) throw std::invalid_argument("playout_sup: empty termination grid");
    const double T_max = *std::max_element(T_grid.begin(), T_grid.end());
    PlayoutResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < family.size(); ++c) {
        const GamePlay play = barrier_strategy(game, level, family[c].extend_constant(T_max), x);
        const auto prof = holding_profile(game.geometry(), play.phi);
        for (double T : T_grid) {
            const double tt = std::min(T, play.T);
            const double v = holding_upto(game.geometry(), prof, play.phi, tt) +
                             game.r() * play.rho(tt) -
                             rate_I(play.psi, game.s1(), game.s2(), tt);
            if (v > best.value) best = {v, c, tt};
        }
    }
    return best;
}

std::vector<MaximizerControl> random_maximizer_family(const GameSolution& game,
                                                      std::size_t count, double horizon,
                                                      double max_rate, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> knots(2, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<MaximizerControl> out;
    out.reserve(count);
    while (out.size() < count) {
        const int k = knots(rng);
        std::vector<double> g{0.0};
        std::vector<double> cuts;
        for (int j = 0; j + 1 < k; ++j) cuts.push_back(horizon * unit(rng));
        std::sort(cuts.begin(), cuts.end());
        for (double c : cuts) {
            if (c > g.back()) g.push_back(c);
        }
        if (horizon > g.back()) g.push_back(horizon);
        std::vector<double> v1{0.0};
        std::vector<double> v2{0.0};
        for (std::size_t j = 1; j < g.size(); ++j) {
            const double dt = g[j] - g[j - 1];
            v1.push_back(v1.back() + normal(rng) * dt);
            v2.push_back(v2.back() + normal(rng) * dt);
        }
        MaximizerControl psi{PLPath(g, v1), PLPath(g, v2)};
        const double rate = rate_I(psi, game.s1(), game.s2(), horizon);
        if (rate <= 0.0) continue;
        const double scale = std::sqrt(max_rate * unit(rng) / rate);
        out.push_back({psi.psi1 * scale, psi.psi2 * scale});
    }
    return out;
}

AboveBarrierCheck check_above_barrier(const GameSolution& game, double x, const PLPath& zeta,
                                      const PLPath& rho, double delta, double T_max) {
    const double level = game.beta0() + delta;
    if (!(x > level)) throw std::invalid_argument("check_above_barrier: requires x > beta0 + delta");
    if (!(rho.front() - zeta.front() < x - level)) {
        throw std::invalid_argument("check_above_barrier: requires rho(0) - zeta(0) < x - (beta0 + delta)");
    }
    if (!(T_max > 0.0)) throw std::invalid_argument("check_above_barrier: T_max must be positive");

    const MaximizerControl sharp = psi_sharp(game, T_max);
    const PLPath z = zeta.extend_constant(T_max).truncate(T_max);
    const PLPath q = rho.extend_constant(T_max).truncate(T_max);
    const PLPath phi = PLPath::line(x, game.y(), T_max) + sharp.psi1 - sharp.psi2 + z - q;

    AboveBarrierCheck out;
    out.rhs = game.r() * (x - level);
    out.tau = T_max;
    out.truncated = true;
    const auto& g = phi.grid();
    const auto& v = phi.values();
    if (v[0] <= level) {
        out.tau = 0.0;
        out.truncated = false;
    } else {
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            if (v[k + 1] <= level) {
                out.tau = g[k] + (g[k + 1] - g[k]) * (v[k] - level) / (v[k] - v[k + 1]);
                out.truncated = false;
                break;
            }
        }
    }
    const PLPath phi_tau = phi.truncate(out.tau);
    double holding = 0.0;
    if (out.tau > 0.0) {
        const auto prof = holding_profile(game.geometry(), phi_tau);
        holding = prof.cumulative.back();
    }
    out.lhs = holding + game.r() * q(out.tau) - rate_I(sharp, game.s1(), game.s2(), out.tau);
    out.holds = out.lhs > out.rhs;
    return out;
}

}  // namespace mdq

#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mdq/game.hpp"
#include "random_paths.hpp"

using namespace mdq;

TEST_CASE("rate functions") {
    const MaximizerControl zero{PLPath::constant(0.0, 2.0), PLPath::constant(0.0, 2.0)};
    CHECK(rate_I(zero, 0.5, 0.5, 2.0) == 0.0);
    const MaximizerControl lin{PLPath::line(0.0, 1.0, 2.0), PLPath::constant(0.0, 2.0)};
    CHECK(rate_I(lin, 0.5, 0.5, 2.0) == doctest::Approx(1.0));

    const GameSolution g = solve_game(fx::f1());
    for (double T : {0.5, 1.0, 3.0}) {
        CHECK(rate_I(psi_sharp(g, T), g.s1(), g.s2(), T) == doctest::Approx(0.25 * T));
    }

    const auto w1 = arrival_rate_weights(fx::f1());
    CHECK(w1[0] == 0.5);
    std::vector<PLPath> tuple{PLPath::line(0.0, 1.0, 3.0), PLPath::constant(0.0, 3.0)};
    const std::vector<double> weights{w1[0], service_rate_weights(fx::f1())[0]};
    CHECK(rate_J(tuple, weights, 3.0) == doctest::Approx(1.5));
    std::vector<PLPath> zeros{PLPath::constant(0.0, 1.0), PLPath::constant(0.0, 1.0)};
    CHECK(rate_J(zeros, weights, 1.0) == 0.0);

    const MaximizerControl shifted{PLPath::line(0.1, 1.0, 1.0), PLPath::constant(0.0, 1.0)};
    CHECK_THROWS_AS(rate_I(shifted, 0.5, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_I(lin, 0.5, 0.5, 3.0), std::invalid_argument);
}

TEST_CASE("rate_I is unchanged by grid refinement") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 100; ++k) {
        const PLPath a = fx::random_anchored(rng, 2.0, 0.7);
        const PLPath b = fx::random_anchored(rng, 2.0, 0.7);
        std::vector<double> fine;
        for (int j = 0; j <= 53; ++j) fine.push_back(2.0 * j / 53.0);
        const MaximizerControl coarse{a, b};
        const MaximizerControl refined{a.resample(union_grid(a.grid(), fine, 2.0)),
                                       b.resample(union_grid(b.grid(), fine, 2.0))};
        const double r1 = rate_I(coarse, 0.3, 0.7, 2.0);
        const double r2 = rate_I(refined, 0.3, 0.7, 2.0);
        CHECK(std::abs(r1 - r2) <= 1e-12 * std::max(1.0, r1));
    }
}

TEST_CASE("decomposition examples") {
    const std::vector<double> theta{1.0, 0.5}, alpha{1.0, 1.0}, speeds{1.0, 1.0};
    const auto d = decompose(PLPath::line(0.0, 1.0, 1.0), alpha, speeds, theta);
    CHECK(d.constant == doctest::Approx(0.8));
    CHECK(d.components[0](1.0) == doctest::Approx(0.8));
    CHECK(d.components[1](1.0) == doctest::Approx(0.4));
    CHECK(rate_J(d.components, alpha, 1.0) == doctest::Approx(0.8));

    const std::vector<double> one{1.0};
    const PLPath psi({0.0, 0.3, 1.0}, {0.0, 0.5, -0.2});
    const auto id = decompose(psi, one, one, one);
    CHECK(sup_distance(id.components[0], psi) == 0.0);

    CHECK_THROWS_AS(decompose(psi, alpha, std::vector<double>{1.0, 1.5}, theta), std::invalid_argument);
    CHECK_THROWS_AS(decompose(psi.shifted(1.0), one, one, one), std::invalid_argument);
}

TEST_CASE("decomposition is feasible and cheaper than random feasible splits") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::normal_distribution<double> nrm(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> theta{u(rng), u(rng), u(rng)};
        const std::vector<double> alpha{u(rng), u(rng), u(rng)};
        const std::vector<double> l{u(rng), u(rng), 1.0};
        const double T = 1.0;
        const PLPath psi = fx::random_anchored(rng, T, 0.8);
        const auto d = decompose(psi, alpha, l, theta);
        // theta . psi_bar(l u) = psi(u)
        for (double t : {0.0, 0.17, 0.5, 0.93, 1.0}) {
            double sum = 0.0;
            for (std::size_t i = 0; i < 3; ++i) sum += theta[i] * d.components[i](l[i] * t);
            CHECK(sum == doctest::Approx(psi(t)).epsilon(1e-12).scale(1.0));
        }
        const double best = rate_J(d.components, alpha, T);
        CHECK(best == doctest::Approx(d.constant * psi.energy(T)).epsilon(1e-9));
        for (int k = 0; k < 20; ++k) {
            // c . theta = 1 and e . theta = 0 keep the split feasible.
            std::vector<double> c{nrm(rng), nrm(rng), 0.0}, e{nrm(rng), nrm(rng), 0.0};
            c[2] = (1.0 - theta[0] * c[0] - theta[1] * c[1]) / theta[2];
            e[2] = -(theta[0] * e[0] + theta[1] * e[1]) / theta[2];
            const PLPath g = fx::random_anchored(rng, T, 0.8);
            std::vector<PLPath> split;
            for (std::size_t i = 0; i < 3; ++i) {
                std::vector<double> grid, vals;
                for (double t : union_grid(psi.grid(), g.grid(), T)) {
                    grid.push_back(l[i] * t);
                    vals.push_back(c[i] * psi(t) + e[i] * g(t));
                }
                split.push_back(PLPath(grid, vals).extend_constant(T));
            }
            CHECK(rate_J(split, alpha, T) >= best - 1e-12);
        }
    }
}

TEST_CASE("solve_game on F1") {
    const GameSolution g = solve_game(fx::f1());
    CHECK(g.y() == -1.0);
    CHECK(g.s1() == 0.5);
    CHECK(g.s2() == 0.5);
    CHECK(g.s() == 0.25);
    CHECK(g.r() == 0.5);
    REQUIRE(g.finite());
    CHECK(g.beta0() == 0.25);
    CHECK(g.V(0.0) == 0.0);
    for (double x : {0.05, 0.1, 0.2, 0.25, 0.5, 1.0, 2.0}) {
        CAPTURE(x);
        CHECK(std::abs(g.V(x) - fx::f1_value(x)) <= 1e-9);
    }
    CHECK(std::abs(g.V(0.25) - 1.0 / 24.0) <= 1e-9);
    CHECK(std::abs(g.V(0.5) - 1.0 / 6.0) <= 1e-9);
    for (double x : {0.01, 0.1, 0.2, 0.2499}) {
        CHECK(std::abs(g.hitting_time(x) - fx::f1_hitting_time(x)) <= 1e-9);
    }
    // Inverse square-root singularity at beta0 costs a few digits.
    CHECK(std::abs(g.hitting_time(0.25) - 0.5) <= 1e-7);
}

TEST_CASE("free-boundary branches") {
    const GameSolution capped = solve_game(fx::f1_with(1.0, 0.2));
    REQUIRE(capped.finite());
    CHECK(capped.beta0() == 0.2);

    const GameSolution inf = solve_game(fx::f1_with(0.1, 2.0));
    CHECK_FALSE(inf.finite());
    CHECK(std::isinf(inf.V(0.1)));
    CHECK_THROWS_AS(inf.beta0(), std::domain_error);
    CHECK_THROWS_AS(psi_star(inf, 0.1), std::domain_error);
}

TEST_CASE("V shape: monotone, convex below beta0, linear above, slope bound") {
    for (const auto& p : {fx::f1(), fx::f2()}) {
        const GameSolution g = solve_game(p);
        REQUIRE(g.finite());
        const double b = g.beta0();
        const double left = g.left_slope_at_beta0();
        CHECK(left == doctest::Approx(2.0 * g.s() * (-g.y() - std::abs(g.y() + g.r() / (2.0 * g.s())))));
        CHECK(left <= g.r() + 1e-12);
        const int N = 200;
        double prev_slope = -1.0;
        int bad = 0;
        for (int k = 0; k < N; ++k) {
            const double x0 = b * k / N, x1 = b * (k + 1) / N;
            const double slope = (g.V(x1) - g.V(x0)) / (x1 - x0);
            if (slope <= 0.0 || slope < prev_slope - 1e-9) ++bad;
            prev_slope = slope;
        }
        CHECK(bad == 0);
        for (double x : {b + 0.01, 0.5 * (b + g.D()), g.D()}) {
            CHECK(g.V(x) == doctest::Approx(g.V(b) + g.r() * (x - b)).epsilon(1e-12));
        }
        // Radicand s y^2 - h(u) stays nonnegative on [0, beta0].
        for (int k = 0; k <= 100; ++k) {
            CHECK(g.s() * g.y() * g.y() - g.geometry().h(b * k / 100.0) >= -1e-12);
        }
    }
}

TEST_CASE("F2 constants") {
    const GameSolution g = solve_game(fx::f2());
    CHECK(g.y() == doctest::Approx(-1.5));
    CHECK(g.s1() == doctest::Approx(2.0 / 3.0));
    CHECK(g.s() == doctest::Approx(1.0 / 3.0));
    CHECK(g.r() == 1.0);
    CHECK(g.istar() == 1);
    CHECK(g.beta0() == doctest::Approx(0.375));
}

TEST_CASE("psi_sharp and psi_star") {
    const GameSolution g = solve_game(fx::f1());
    const auto sharp = psi_sharp(g, 2.0);
    CHECK(sharp.psi1.slope(0) == 0.5);
    CHECK(sharp.psi2.slope(0) == -0.5);
    CHECK(g.y() + sharp.psi1.slope(0) - sharp.psi2.slope(0) == 0.0);
    CHECK(psi_sharp(g, 0.0).horizon() == 0.0);

    const auto near = psi_star(g, 0.25 - 1e-9);
    CHECK(near.hitting_time == doctest::Approx(0.5).epsilon(1e-3));
    const auto zero = psi_star(g, 0.0);
    CHECK(zero.hitting_time == 0.0);
    CHECK(zero.psi.horizon() == 0.0);

    const auto ref = psi_star(g, 0.1);
    int increasing = 0;
    for (std::size_t k = 0; k + 1 < ref.state.size(); ++k) {
        if (ref.state.values()[k + 1] > ref.state.values()[k] + 1e-15) ++increasing;
    }
    CHECK(increasing == 0);
    CHECK(std::abs(ref.hitting_time - g.hitting_time(0.1)) <= 1e-3);
    // psi* = ((s/s1) w, -(s/s2) w): the two components mirror each other in F1.
    CHECK(ref.psi.psi1(ref.hitting_time) == doctest::Approx(-ref.psi.psi2(ref.hitting_time)));
    CHECK_THROWS_AS(psi_star(g, 0.3), std::out_of_range);
}

TEST_CASE("barrier strategy examples") {
    const GameSolution g = solve_game(fx::f1());
    const double b0 = g.beta0();
    const MaximizerControl zero{PLPath::constant(0.0, 1.0), PLPath::constant(0.0, 1.0)};

    const GamePlay p = barrier_strategy(g, b0, zero, 0.1);
    for (double t : {0.0, 0.05, 0.1, 0.4, 1.0}) {
        CHECK(p.phi(t) == doctest::Approx(std::max(0.1 - t, 0.0)));
        CHECK(p.zeta(t) == doctest::Approx(std::max(t - 0.1, 0.0)));
        CHECK(p.rho(t) == 0.0);
    }
    const GamePlay above = barrier_strategy(g, b0, zero, 0.5);
    CHECK(above.rho(0.0) == doctest::Approx(0.25));

    const GamePlay flat = barrier_strategy(g, b0, psi_sharp(g, 1.0), b0);
    for (double t : {0.0, 0.5, 1.0}) {
        CHECK(flat.phi(t) == doctest::Approx(b0));
        CHECK(flat.rho(t) == doctest::Approx(0.0));
        CHECK(flat.zeta(t) == doctest::Approx(0.0));
    }
    // Dynamics identity and range on a random play.
    std::mt19937_64 rng(33);
    const MaximizerControl rnd{fx::random_anchored(rng, 1.0, 0.5), fx::random_anchored(rng, 1.0, 0.5)};
    const GamePlay q = barrier_strategy(g, b0, rnd, 0.2);
    for (double t : q.phi.grid()) {
        const double rhs = 0.2 + g.y() * t + q.psi.psi1(t) - q.psi.psi2(t) + q.zeta(t) - q.rho(t);
        CHECK(q.phi(t) == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
        CHECK(q.phi(t) >= -1e-12);
        CHECK(q.phi(t) <= b0 + 1e-12);
    }
}

TEST_CASE("cost examples") {
    const GameSolution g = solve_game(fx::f1());
    const MaximizerControl zero01{PLPath::constant(0.0, 0.1), PLPath::constant(0.0, 0.1)};
    CHECK(cost(g, barrier_strategy(g, g.beta0(), zero01, 0.1)) == doctest::Approx(0.005).epsilon(1e-12));
    const MaximizerControl zero2{PLPath::constant(0.0, 2.0), PLPath::constant(0.0, 2.0)};
    const GamePlay long_play = barrier_strategy(g, g.beta0(), zero2, 0.1);
    CHECK(cost(g, long_play) == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(cost_at(g, long_play, 0.7) == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(cost_at(g, long_play, 0.0) == 0.0);
}

TEST_CASE("playout examples") {
    const GameSolution g = solve_game(fx::f1());
    const double T = default_horizon(g);
    CHECK(T == doctest::Approx(4.0 * (0.5 + 1.0)));
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(T * k / 60.0);

    const auto ref = psi_star(g, 0.1);
    std::vector<MaximizerControl> star{ref.psi};
    std::vector<double> grid_star = grid;
    grid_star.push_back(ref.hitting_time);
    CHECK(std::abs(playout_sup(g, 0.1, g.beta0(), star, grid_star).value - g.V(0.1)) <= 1e-3);

    std::vector<MaximizerControl> zero{{PLPath::constant(0.0, T), PLPath::constant(0.0, T)}};
    const double v0 = playout_sup(g, 0.1, g.beta0(), zero, grid).value;
    CHECK(v0 == doctest::Approx(0.005));
    CHECK(v0 <= g.V(0.1));

    std::vector<MaximizerControl> sharp{psi_sharp(g, T)};
    const std::vector<double> tiny{1e-9};
    CHECK(playout_sup(g, 0.5, g.beta0(), sharp, tiny).value >= 0.125 - 1e-6);

    CHECK_THROWS_AS(playout_sup(g, 0.1, g.beta0(), std::vector<MaximizerControl>{}, grid),
                    std::invalid_argument);

    const auto fam = random_maximizer_family(g, 10, T, 0.3, 5);
    CHECK(fam.size() == 10);
    for (const auto& psi : fam) CHECK(rate_I(psi, g.s1(), g.s2(), T) <= 0.3 + 1e-12);
}

TEST_CASE("above-barrier check") {
    const GameSolution g = solve_game(fx::f1());
    const PLPath none = PLPath::constant(0.0, 1.0);
    const auto res = check_above_barrier(g, 0.5, none, none, 0.05, 2.0);
    CHECK(res.holds);
    CHECK(res.truncated);
    CHECK(res.rhs == doctest::Approx(0.1));
    CHECK(res.lhs == doctest::Approx(2.0 * 0.25 + 0.0).epsilon(1e-9));

    // Rejecting slightly less than x - beta0 - delta at once: LHS just above RHS.
    const double jump = 0.2 - 1e-6;
    const auto edge = check_above_barrier(g, 0.5, none, PLPath::constant(jump, 1.0), 0.05, 2.0);
    CHECK(edge.lhs >= edge.rhs - 1e-9);

    CHECK_THROWS_AS(check_above_barrier(g, 0.5, none, none, 0.3, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(check_above_barrier(g, 0.5, none, PLPath::constant(0.2, 1.0), 0.05, 2.0),
                    std::invalid_argument);
}

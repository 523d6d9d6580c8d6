#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mdq/model.hpp"

namespace fx {

// Single class: lambda = mu = 1, unit variances, D = 2, hbar = 1, rbar = 0.5,
// tilde_lambda = 0, tilde_mu = 1. Gives y = -1, s = 1/4, r = 0.5, h(w) = w.
inline mdq::ClassParams f1_class() {
    mdq::ClassParams c;
    c.lambda = 1.0;
    c.mu = 1.0;
    c.var_ia = 1.0;
    c.var_st = 1.0;
    c.tilde_lambda = 0.0;
    c.tilde_mu = 1.0;
    c.D = 2.0;
    c.hbar = 1.0;
    c.rbar = 0.5;
    return c;
}

inline mdq::ModelParams f1(double x0 = 0.1) { return mdq::ModelParams::make({f1_class()}, {x0}); }

inline mdq::ModelParams f1_with(double tilde_mu, double D, double x0 = 0.1) {
    auto c = f1_class();
    c.tilde_mu = tilde_mu;
    c.D = D;
    return mdq::ModelParams::make({c}, {x0});
}

// Two classes: lambda = (0.5, 1), mu = (1, 2), hbar = (3, 1), D = (1, 1),
// rbar = (2, 0.5). theta = (1, 0.5), i* = 1 (0-based), r = 1, s = 1/3,
// tilde rates chosen so theta^n = theta and y = -1.5; beta0 = 0.375.
inline mdq::ModelParams f2(std::vector<double> x0 = {0.5, 0.7}) {
    mdq::ClassParams a;
    a.lambda = 0.5;
    a.mu = 1.0;
    a.tilde_lambda = -0.5;
    a.D = 1.0;
    a.hbar = 3.0;
    a.rbar = 2.0;
    mdq::ClassParams b;
    b.lambda = 1.0;
    b.mu = 2.0;
    b.tilde_lambda = -2.0;
    b.D = 1.0;
    b.hbar = 1.0;
    b.rbar = 0.5;
    return mdq::ModelParams::make({a, b}, std::move(x0));
}

// F1 value function by hand antiderivative (valid on [0, 0.25]), linear above.
inline double f1_value(double x) {
    if (x <= 0.25) return 0.5 * (x + (std::pow(1.0 - 4.0 * x, 1.5) - 1.0) / 6.0);
    return 1.0 / 24.0 + 0.5 * (x - 0.25);
}

// F1 hitting time int_0^x (1 - 4u)^{-1/2} du.
inline double f1_hitting_time(double x) { return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * x)); }

// Brute-force minimal holding cost: min hbar . xi over theta . xi = w, 0 <= xi <= D,
// searched over a grid on the first I-1 coordinates with the last solved for.
// Only for I <= 3.
inline double brute_force_h(const std::vector<double>& theta, const std::vector<double>& hbar,
                            const std::vector<double>& D, double w, double step) {
    const std::size_t I = theta.size();
    double best = std::numeric_limits<double>::infinity();
    auto finish = [&](const std::vector<double>& xi, double used) {
        const double rest = (w - used) / theta[I - 1];
        if (rest < -1e-12 || rest > D[I - 1] + 1e-12) return;
        double c = hbar[I - 1] * std::clamp(rest, 0.0, D[I - 1]);
        for (std::size_t i = 0; i + 1 < I; ++i) c += hbar[i] * xi[i];
        best = std::min(best, c);
    };
    std::vector<double> xi(I, 0.0);
    if (I == 1) {
        finish(xi, 0.0);
    } else if (I == 2) {
        for (double a = 0.0; a <= D[0] + 1e-12; a += step) {
            xi[0] = std::min(a, D[0]);
            finish(xi, theta[0] * xi[0]);
        }
    } else {
        for (double a = 0.0; a <= D[0] + 1e-12; a += step) {
            for (double b = 0.0; b <= D[1] + 1e-12; b += step) {
                xi[0] = std::min(a, D[0]);
                xi[1] = std::min(b, D[1]);
                finish(xi, theta[0] * xi[0] + theta[1] * xi[1]);
            }
        }
    }
    return best;
}

// F2 with tilde_lambda = 0 and tilde_mu = 2: same y = -1.5 and beta0, but the
// rates stay positive for every n (F2 itself needs n > 32).
inline mdq::ModelParams f2_first_order(std::vector<double> x0 = {0.5, 0.7}) {
    auto p = f2(std::move(x0));
    for (auto& c : p.classes) {
        c.tilde_lambda = 0.0;
        c.tilde_mu = 2.0;
    }
    return p;
}

}  // namespace fx

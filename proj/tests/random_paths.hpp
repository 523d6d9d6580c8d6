#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mdq/paths.hpp"

namespace fx {

// Random PL path on [0, horizon] with 2..max_knots knots, start uniform in
// [lo, hi] and Gaussian increments of scale `step`.
inline mdq::PLPath random_path(std::mt19937_64& rng, double horizon, double lo, double hi,
                               double step, int max_knots = 20) {
    std::uniform_int_distribution<int> knots(2, max_knots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, step);
    const int k = knots(rng);
    std::vector<double> g{0.0};
    std::vector<double> cuts;
    for (int j = 0; j + 2 < k; ++j) cuts.push_back(horizon * unit(rng));
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
        if (c > g.back() && c < horizon) g.push_back(c);
    }
    g.push_back(horizon);
    std::vector<double> v{lo + (hi - lo) * unit(rng)};
    for (std::size_t j = 1; j < g.size(); ++j) v.push_back(v.back() + normal(rng));
    return mdq::PLPath(std::move(g), std::move(v));
}

// Random path on [0, horizon] anchored at 0.
inline mdq::PLPath random_anchored(std::mt19937_64& rng, double horizon, double step, int max_knots = 12) {
    mdq::PLPath p = random_path(rng, horizon, 0.0, 0.0, step, max_knots);
    return p;
}

// Nondecreasing PL path on [0, horizon] starting at `start`.
inline mdq::PLPath random_nondecreasing(std::mt19937_64& rng, double horizon, double start,
                                        double max_increment, int max_knots = 8) {
    std::uniform_int_distribution<int> knots(2, max_knots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int k = knots(rng);
    std::vector<double> g{0.0};
    for (int j = 1; j < k; ++j) g.push_back(horizon * j / (k - 1));
    std::vector<double> v{start};
    for (std::size_t j = 1; j < g.size(); ++j) v.push_back(v.back() + max_increment * unit(rng));
    return mdq::PLPath(std::move(g), std::move(v));
}

// Checks the reflection invariants on the output grid: phi in [a, b],
// phi = omega + eta1 - eta2, eta nondecreasing and nonnegative, and eta1
// (eta2) increasing only on segments where phi stays at a (b). Returns the
// number of violations.
inline int reflection_violations(const mdq::ReflectionTriple& r, const mdq::PLPath& omega, double a,
                                 double b, double tol) {
    int bad = 0;
    const auto& g = r.phi.grid();
    const auto& p = r.phi.values();
    const auto& e1 = r.eta1.values();
    const auto& e2 = r.eta2.values();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (p[k] < a - tol || p[k] > b + tol) ++bad;
        if (std::abs(p[k] - (omega(g[k]) + e1[k] - e2[k])) > tol) ++bad;
        if (e1[k] < -tol || e2[k] < -tol) ++bad;
    }
    if (e1[0] > tol && std::abs(p[0] - a) > tol) ++bad;
    if (e2[0] > tol && std::abs(p[0] - b) > tol) ++bad;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        if (e1[k + 1] < e1[k] - tol || e2[k + 1] < e2[k] - tol) ++bad;
        if (e1[k + 1] - e1[k] > tol && (std::abs(p[k] - a) > tol || std::abs(p[k + 1] - a) > tol)) ++bad;
        if (e2[k + 1] - e2[k] > tol && (std::abs(p[k] - b) > tol || std::abs(p[k + 1] - b) > tol)) ++bad;
    }
    return bad;
}

}  // namespace fx

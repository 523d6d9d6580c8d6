#include "mdq/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdq {

PLPath::PLPath(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.empty() || grid_.size() != values_.size()) {
        throw std::invalid_argument("PLPath: grid and values must be nonempty and of equal size");
    }
    if (grid_.front() != 0.0) throw std::invalid_argument("PLPath: grid must start at t = 0");
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!std::isfinite(grid_[k]) || !std::isfinite(values_[k])) {
            throw std::invalid_argument("PLPath: nonfinite grid point or value");
        }
        if (k > 0 && !(grid_[k] > grid_[k - 1])) {
            throw std::invalid_argument("PLPath: grid must be strictly increasing");
        }
    }
}

PLPath PLPath::constant(double value, double horizon) {
    if (horizon <= 0.0) return PLPath({0.0}, {value});
    return PLPath({0.0, horizon}, {value, value});
}

PLPath PLPath::line(double value0, double slope, double horizon) {
    if (horizon <= 0.0) return PLPath({0.0}, {value0});
    return PLPath({0.0, horizon}, {value0, value0 + slope * horizon});
}

PLPath PLPath::sample(const std::function<double(double)>& f, std::vector<double> grid) {
    std::vector<double> v;
    v.reserve(grid.size());
    for (double t : grid) v.push_back(f(t));
    return PLPath(std::move(grid), std::move(v));
}

double PLPath::operator()(double t) const {
    if (!(t >= 0.0 && t <= grid_.back())) {
        throw std::out_of_range("PLPath: evaluation outside [0, horizon]");
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.end()) return values_.back();
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double w = (t - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return values_[k] + w * (values_[k + 1] - values_[k]);
}

double PLPath::slope(std::size_t k) const {
    return (values_[k + 1] - values_[k]) / (grid_[k + 1] - grid_[k]);
}

PLPath PLPath::resample(std::span<const double> grid) const {
    std::vector<double> g(grid.begin(), grid.end());
    std::vector<double> v;
    v.reserve(g.size());
    for (double t : g) v.push_back((*this)(t));
    return PLPath(std::move(g), std::move(v));
}

PLPath PLPath::truncate(double t) const {
    if (t >= horizon()) return *this;
    if (t <= 0.0) return PLPath({0.0}, {values_.front()});
    std::vector<double> g;
    std::vector<double> v;
    for (std::size_t k = 0; k < grid_.size() && grid_[k] < t; ++k) {
        g.push_back(grid_[k]);
        v.push_back(values_[k]);
    }
    const double end = (*this)(t);
    g.push_back(t);
    v.push_back(end);
    return PLPath(std::move(g), std::move(v));
}

PLPath PLPath::extend_constant(double t) const {
    if (t <= horizon()) return *this;
    PLPath out = *this;
    out.grid_.push_back(t);
    out.values_.push_back(values_.back());
    return out;
}

std::vector<double> union_grid(std::span<const double> a, std::span<const double> b,
                               double horizon) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    while (!out.empty() && out.back() > horizon) out.pop_back();
    if (out.empty() || out.back() < horizon) out.push_back(horizon);
    return out;
}

std::vector<double> union_grid(std::span<const double> a, std::span<const double> b) {
    return union_grid(a, b, std::min(a.back(), b.back()));
}

namespace {

template <typename Op>
PLPath combine(const PLPath& f, const PLPath& g, Op op) {
    const double horizon = std::min(f.horizon(), g.horizon());
    if (horizon <= 0.0) return PLPath({0.0}, {op(f.front(), g.front())});
    auto grid = union_grid(f.grid(), g.grid(), horizon);
    std::vector<double> v;
    v.reserve(grid.size());
    for (double t : grid) v.push_back(op(f(t), g(t)));
    return PLPath(std::move(grid), std::move(v));
}

}  // namespace

PLPath PLPath::operator+(const PLPath& other) const {
    return combine(*this, other, [](double a, double b) { return a + b; });
}

PLPath PLPath::operator-(const PLPath& other) const {
    return combine(*this, other, [](double a, double b) { return a - b; });
}

PLPath PLPath::operator*(double c) const {
    PLPath out = *this;
    for (double& v : out.values_) v *= c;
    return out;
}

PLPath PLPath::shifted(double c) const {
    PLPath out = *this;
    for (double& v : out.values_) v += c;
    return out;
}

double PLPath::energy(double t) const {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < grid_.size() && grid_[k] < t; ++k) {
        const double m = slope(k);
        const double len = std::min(grid_[k + 1], t) - grid_[k];
        total += m * m * len;
    }
    return total;
}

ReflectionTriple skorohod_map(const PLPath& omega, double lower, double upper) {
    if (!(lower < upper)) throw std::invalid_argument("skorohod_map: requires lower < upper");

    const auto& g = omega.grid();
    const auto& w = omega.values();
    std::vector<double> grid, phi, e1, e2;
    grid.reserve(g.size() + 8);
    phi.reserve(g.size() + 8);
    e1.reserve(g.size() + 8);
    e2.reserve(g.size() + 8);

    double p = std::clamp(w[0], lower, upper);
    double push_lo = std::max(lower - w[0], 0.0);
    double push_hi = std::max(w[0] - upper, 0.0);
    auto emit = [&](double t) {
        grid.push_back(t);
        phi.push_back(p);
        e1.push_back(push_lo);
        e2.push_back(push_hi);
    };
    emit(0.0);

    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double t0 = g[k];
        const double t1 = g[k + 1];
        const double d = w[k + 1] - w[k];
        if (d > 0.0) {
            const double room = upper - p;
            if (d <= room) {
                p += d;
            } else {
                if (room > 0.0) {
                    const double hit = t0 + (t1 - t0) * (room / d);
                    p = upper;
                    if (hit > t0 && hit < t1) emit(hit);
                }
                p = upper;
                push_hi += d - room;
            }
        } else if (d < 0.0) {
            const double room = p - lower;
            if (-d <= room) {
                p += d;
            } else {
                if (room > 0.0) {
                    const double hit = t0 + (t1 - t0) * (room / -d);
                    p = lower;
                    if (hit > t0 && hit < t1) emit(hit);
                }
                p = lower;
                push_lo += -d - room;
            }
        }
        emit(t1);
    }
    return {PLPath(grid, std::move(phi)), PLPath(grid, std::move(e1)), PLPath(grid, std::move(e2))};
}

double sup_distance(const PLPath& f, const PLPath& g) {
    const double horizon = std::min(f.horizon(), g.horizon());
    double best = std::abs(f(0.0) - g(0.0));
    if (horizon <= 0.0) return best;
    for (double t : union_grid(f.grid(), g.grid(), horizon)) {
        best = std::max(best, std::abs(f(t) - g(t)));
    }
    return best;
}

double lipschitz_probe(const PLPath& omega, const PLPath& tilde, double lower, double upper) {
    const double input = sup_distance(omega, tilde);
    if (input == 0.0) return 0.0;
    const ReflectionTriple a = skorohod_map(omega, lower, upper);
    const ReflectionTriple b = skorohod_map(tilde, lower, upper);
    const double output = std::max({sup_distance(a.phi, b.phi), sup_distance(a.eta1, b.eta1),
                                    sup_distance(a.eta2, b.eta2)});
    return output / input;
}

double osc(const PLPath& path, double delta, double T) {
    if (!(delta > 0.0)) throw std::invalid_argument("osc: delta must be positive");
    if (!(T >= 0.0 && T <= path.horizon())) throw std::out_of_range("osc: T outside the grid");
    const auto& g = path.grid();
    const auto& v = path.values();

    // Window spread is convex in the window start between events where a
    // window end crosses a knot, so it suffices to test those starts.
    std::vector<double> starts{0.0, std::max(0.0, T - delta)};
    for (double t : g) {
        if (t <= T - delta) starts.push_back(t);
        if (t - delta >= 0.0 && t <= T) starts.push_back(t - delta);
    }

    double best = 0.0;
    for (double u : starts) {
        const double end = std::min(u + delta, T);
        double hi = std::max(path(u), path(end));
        double lo = std::min(path(u), path(end));
        auto first = std::upper_bound(g.begin(), g.end(), u);
        for (auto it = first; it != g.end() && *it < end; ++it) {
            const double val = v[static_cast<std::size_t>(it - g.begin())];
            hi = std::max(hi, val);
            lo = std::min(lo, val);
        }
        best = std::max(best, hi - lo);
    }
    return best;
}

}  // namespace mdq

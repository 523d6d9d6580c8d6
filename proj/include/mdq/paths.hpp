#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mdq {

/// Continuous piecewise-linear path on a strictly increasing time grid that
/// starts at t = 0. A single-knot path represents the degenerate interval [0, 0].
class PLPath {
public:
    PLPath() : grid_{0.0}, values_{0.0} {}
    PLPath(std::vector<double> grid, std::vector<double> values);

    static PLPath constant(double value, double horizon);
    /// value0 + slope * t on [0, horizon].
    static PLPath line(double value0, double slope, double horizon);
    /// Samples f on the given grid.
    static PLPath sample(const std::function<double(double)>& f, std::vector<double> grid);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }
    double horizon() const { return grid_.back(); }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    /// Exact linear interpolation; throws std::out_of_range outside [0, horizon].
    double operator()(double t) const;
    /// Slope on segment k, i.e. between grid()[k] and grid()[k+1].
    double slope(std::size_t k) const;

    /// Same path on a finer grid (must contain this path's grid points within range).
    PLPath resample(std::span<const double> grid) const;
    /// Restriction to [0, t] with the endpoint inserted.
    PLPath truncate(double t) const;
    /// Extends to [0, t] by holding the final value; no-op when t <= horizon.
    PLPath extend_constant(double t) const;

    PLPath operator+(const PLPath& other) const;
    PLPath operator-(const PLPath& other) const;
    PLPath operator*(double c) const;
    PLPath shifted(double c) const;

    /// Integral of the squared derivative over [0, t] (exact).
    double energy(double t) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Sorted union of grid points (duplicates removed), clipped to [0, horizon].
std::vector<double> union_grid(std::span<const double> a, std::span<const double> b,
                               double horizon);
std::vector<double> union_grid(std::span<const double> a, std::span<const double> b);

/// Output of the two-sided Skorohod map: phi = omega + eta1 - eta2, with eta1
/// pushing at the lower end and eta2 at the upper end. A nonzero value of
/// eta at t = 0 is an initial jump (eta(0-) = 0).
struct ReflectionTriple {
    PLPath phi;
    PLPath eta1;
    PLPath eta2;
};

/// Exact Skorohod map on [lower, upper] for a piecewise-linear input. The
/// output grid is the input grid plus the times at which phi reaches an end
/// of the interval. Throws std::invalid_argument unless lower < upper.
ReflectionTriple skorohod_map(const PLPath& omega, double lower, double upper);

/// sup_t |f(t) - g(t)| over the common range of two PL paths (exact).
double sup_distance(const PLPath& f, const PLPath& g);

/// ||Gamma(omega) - Gamma(tilde)||_T / ||omega - tilde||_T, taking the sup over
/// all three output components. Returns 0 for identical inputs.
double lipschitz_probe(const PLPath& omega, const PLPath& tilde, double lower, double upper);

/// Modulus of continuity sup{|f(u) - f(t)| : 0 <= u <= t <= (u + delta) ^ T},
/// exact for piecewise-linear paths.
double osc(const PLPath& path, double delta, double T);

}  // namespace mdq

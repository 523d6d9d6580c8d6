#pragma once

#include <optional>
#include <vector>

#include "mdq/model.hpp"

namespace mdq {

/// Workload geometry of the buffer box X = prod [0, D_i] under theta = 1/mu.
///
/// Class indices are 0-based here. hatD()[j] is the workload held by
/// classes j, ..., I-1 at full buffers, so hatD()[0] = D and hatD()[I] = 0.
/// Cheapest configurations fill the highest index first, since classes are
/// labeled with hbar_i * mu_i nonincreasing.
///
/// The curve approximation (gamma_a, h_a, omega1) is available only when the
/// geometry was built with an eps0.
class WorkloadGeometry {
public:
    explicit WorkloadGeometry(const ModelParams& params);
    WorkloadGeometry(const ModelParams& params, double eps0);

    std::size_t num_classes() const { return theta_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& buffer() const { return Dbar_; }
    const std::vector<double>& hbar() const { return hbar_; }
    double D() const { return hatD_.front(); }
    const std::vector<double>& hatD() const { return hatD_; }
    std::size_t istar() const { return istar_; }
    double r() const { return r_; }

    /// Minimal holding cost rate at workload w in [0, D].
    double h(double w) const;
    /// Inverse of h on [0, h(D)].
    double h_inverse(double v) const;
    /// Cheapest queue configuration at workload w.
    std::vector<double> gamma(double w) const;
    /// Breakpoints of h: hatD in increasing order.
    std::vector<double> h_breakpoints() const;

    bool has_curve_approximation() const { return eps0_.has_value(); }
    double eps0() const;
    const std::vector<double>& a() const;
    const std::vector<double>& hat_a() const;
    /// theta . a, the end of the region where gamma_a follows the greedy fill.
    double theta_dot_a() const;
    /// a* = min(beta0, theta . a).
    double astar(double beta0) const;
    std::vector<double> gamma_a(double w) const;
    /// hbar . gamma_a(w) on [0, theta . a].
    double h_a(double w) const;
    /// sup over [0, theta . a] of |h_a - h| on a grid of `points` plus all breakpoints.
    double omega1(std::size_t points = 10000) const;

private:
    std::vector<double> fill(double w, const std::vector<double>& caps,
                             const std::vector<double>& partial) const;
    void require_curve() const;

    std::vector<double> theta_;
    std::vector<double> Dbar_;
    std::vector<double> hbar_;
    std::vector<double> hatD_;
    std::vector<double> h_at_hatD_;
    std::size_t istar_ = 0;
    double r_ = 0.0;

    std::optional<double> eps0_;
    std::vector<double> a_;
    std::vector<double> hat_a_;
};

}  // namespace mdq

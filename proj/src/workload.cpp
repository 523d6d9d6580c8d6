#include "mdq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdq {

namespace {

std::vector<double> partial_sums(const std::vector<double>& theta, const std::vector<double>& caps) {
    const std::size_t I = theta.size();
    std::vector<double> out(I + 1, 0.0);
    for (std::size_t j = I; j-- > 0;) out[j] = out[j + 1] + theta[j] * caps[j];
    return out;
}

}  // namespace

WorkloadGeometry::WorkloadGeometry(const ModelParams& params) {
    const auto& cls = params.classes;
    if (cls.empty()) throw std::invalid_argument("WorkloadGeometry: no classes");
    for (const auto& c : cls) {
        theta_.push_back(1.0 / c.mu);
        Dbar_.push_back(c.D);
        hbar_.push_back(c.hbar);
    }
    hatD_ = partial_sums(theta_, Dbar_);
    h_at_hatD_.resize(hatD_.size());
    for (std::size_t j = 0; j < hatD_.size(); ++j) {
        double v = 0.0;
        for (std::size_t i = j; i < cls.size(); ++i) v += hbar_[i] * Dbar_[i];
        h_at_hatD_[j] = v;
    }
    r_ = cls[0].rbar * cls[0].mu;
    for (std::size_t i = 1; i < cls.size(); ++i) {
        const double ri = cls[i].rbar * cls[i].mu;
        if (ri < r_) {
            r_ = ri;
            istar_ = i;
        }
    }
}

WorkloadGeometry::WorkloadGeometry(const ModelParams& params, double eps0)
    : WorkloadGeometry(params) {
    const double min_d = *std::min_element(Dbar_.begin(), Dbar_.end());
    if (!(eps0 > 0.0 && eps0 < min_d / 4.0)) {
        throw std::invalid_argument("WorkloadGeometry: eps0 must lie in (0, min_i D_i / 4)");
    }
    eps0_ = eps0;
    for (double d : Dbar_) a_.push_back(d - 3.0 * eps0);
    hat_a_ = partial_sums(theta_, a_);
}

std::vector<double> WorkloadGeometry::fill(double w, const std::vector<double>& caps,
                                           const std::vector<double>& partial) const {
    const std::size_t I = theta_.size();
    std::vector<double> x(I, 0.0);
    if (w >= partial[0]) {
        x = caps;
        return x;
    }
    // w lies in [partial[j+1], partial[j]) for exactly one j.
    std::size_t j = I - 1;
    while (j > 0 && w >= partial[j]) --j;
    for (std::size_t i = j + 1; i < I; ++i) x[i] = caps[i];
    x[j] = (w - partial[j + 1]) / theta_[j];
    return x;
}

double WorkloadGeometry::h(double w) const {
    if (!(w >= 0.0 && w <= D())) {
        throw std::out_of_range("h: workload " + std::to_string(w) + " outside [0, D]");
    }
    const std::size_t I = theta_.size();
    if (w >= hatD_[0]) return h_at_hatD_[0];
    std::size_t j = I - 1;
    while (j > 0 && w >= hatD_[j]) --j;
    return h_at_hatD_[j + 1] + hbar_[j] * (w - hatD_[j + 1]) / theta_[j];
}

double WorkloadGeometry::h_inverse(double v) const {
    if (!(v >= 0.0 && v <= h_at_hatD_[0])) {
        throw std::out_of_range("h_inverse: value " + std::to_string(v) + " outside [0, h(D)]");
    }
    const std::size_t I = theta_.size();
    if (v >= h_at_hatD_[0]) return D();
    std::size_t j = I - 1;
    while (j > 0 && v >= h_at_hatD_[j]) --j;
    return hatD_[j + 1] + (v - h_at_hatD_[j + 1]) * theta_[j] / hbar_[j];
}

std::vector<double> WorkloadGeometry::gamma(double w) const {
    if (!(w >= 0.0 && w <= D())) throw std::out_of_range("gamma: workload outside [0, D]");
    return fill(w, Dbar_, hatD_);
}

std::vector<double> WorkloadGeometry::h_breakpoints() const {
    return {hatD_.rbegin(), hatD_.rend()};
}

void WorkloadGeometry::require_curve() const {
    if (!eps0_) throw std::logic_error("WorkloadGeometry: built without eps0");
}

double WorkloadGeometry::eps0() const {
    require_curve();
    return *eps0_;
}

const std::vector<double>& WorkloadGeometry::a() const {
    require_curve();
    return a_;
}

const std::vector<double>& WorkloadGeometry::hat_a() const {
    require_curve();
    return hat_a_;
}

double WorkloadGeometry::theta_dot_a() const {
    require_curve();
    return hat_a_.front();
}

double WorkloadGeometry::astar(double beta0) const { return std::min(beta0, theta_dot_a()); }

std::vector<double> WorkloadGeometry::gamma_a(double w) const {
    require_curve();
    if (!(w >= 0.0 && w <= D())) throw std::out_of_range("gamma_a: workload outside [0, D]");
    const double wa = theta_dot_a();
    if (w < wa) return fill(w, a_, hat_a_);
    const double s = (w - wa) / (D() - wa);
    std::vector<double> x(a_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a_[i] + s * (Dbar_[i] - a_[i]);
    return x;
}

double WorkloadGeometry::h_a(double w) const {
    require_curve();
    if (!(w >= 0.0 && w <= theta_dot_a())) {
        throw std::out_of_range("h_a: workload outside [0, theta . a]");
    }
    const auto x = gamma_a(w);
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += hbar_[i] * x[i];
    return v;
}

double WorkloadGeometry::omega1(std::size_t points) const {
    const double wa = theta_dot_a();
    std::vector<double> ws;
    ws.reserve(points + 2 * hatD_.size() + 2);
    for (std::size_t k = 0; k <= points; ++k) {
        ws.push_back(wa * static_cast<double>(k) / static_cast<double>(points));
    }
    for (double b : hatD_) {
        if (b <= wa) ws.push_back(b);
    }
    for (double b : hat_a_) ws.push_back(b);
    double best = 0.0;
    for (double w : ws) best = std::max(best, std::abs(h_a(w) - h(w)));
    return best;
}

}  // namespace mdq

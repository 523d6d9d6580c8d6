#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdq/model.hpp"
#include "mdq/sim.hpp"

namespace mdq {

/// Right-continuous path that is linear between knots. A repeated time marks
/// a jump: the later entry is the value from that time on.
struct CostPath {
    std::vector<double> t;
    std::vector<double> value;

    double horizon() const { return t.empty() ? 0.0 : t.back(); }
    double at(double time) const;
    CostPath shifted(double c) const;
};

/// H_t = int_0^t hbar . X~ du + rbar . R~(t) along a recorded trajectory.
CostPath running_cost(const Trajectory& traj, const ModelParams& params);

/// Log-domain accumulator of int exp(k H_t) dt over linear pieces of H.
class LogIntegral {
public:
    explicit LogIntegral(double k) : k_(k) {}
    /// Adds int_0^dt exp(k (h0 + slope s)) ds.
    void add_segment(double h0, double slope, double dt);
    double log_value() const { return log_value_; }

private:
    double k_;
    double log_value_ = -std::numeric_limits<double>::infinity();
};

/// log int_0^T exp(b^2 H_t) dt, exact per linear segment.
double replication_log_weight(const CostPath& H, double b, double T);

struct RsEstimate {
    double value = 0.0;
    std::size_t replications = 0;
    std::vector<double> log_weights;
    double ess = 0.0;
    /// ess < 0.05 M: the mean is dominated by a few replications.
    bool heavy_tail = false;
    double b = 1.0;
};

/// Streaming logsumexp state; merge is associative and commutative up to rounding.
class RsAccumulator {
public:
    explicit RsAccumulator(double b) : b_(b) {}
    void add(double log_weight);
    void merge(const RsAccumulator& other);
    std::size_t count() const { return count_; }
    /// (1/b^2)(logsumexp - log count).
    double value() const;
    double ess() const;

private:
    double b_;
    std::size_t count_ = 0;
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;     // sum exp(lw - max_)
    double sum_sq_ = 0.0;  // sum exp(2 (lw - max_))
};

/// Aggregates per-replication log weights in index order.
RsEstimate aggregate(std::span<const double> log_weights, double b);

/// Observer computing the replication log weight on the fly.
class CostObserver : public SimObserver {
public:
    CostObserver(const ModelParams& params, double scale, double b);
    void on_event(const Event& event, const SimState& state, const PolicyDecision& decision) override;
    double log_weight() const { return integral_.log_value(); }
    double H() const { return H_; }

private:
    std::vector<double> hbar_;
    std::vector<double> rbar_;
    double scale_;
    LogIntegral integral_;
    double t_prev_ = 0.0;
    double H_ = 0.0;
    double slope_ = 0.0;
};

/// Monte-Carlo estimate of J^n over M >= 2 replications. Worker count is
/// capped by the MDQ_THREADS environment variable; the result does not depend on it.
RsEstimate estimate_Jn(const NthSystem& system, const ModelParams& params, const Policy& policy,
                       double T, std::size_t M, std::uint64_t seed);

/// Worker count from MDQ_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

/// (1/b^2)(logsumexp_k(b^2 H_k(T - delta) + log delta) - log M).
double lower_envelope_value(std::span<const CostPath> Hs, double b, double T, double delta);

}  // namespace mdq

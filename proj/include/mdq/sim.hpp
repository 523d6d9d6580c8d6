#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mdq/model.hpp"
#include "mdq/workload.hpp"

namespace mdq {

struct SimState {
    double t = 0.0;
    std::vector<std::int64_t> X;
    /// Cumulative service effort T_i(t) = int_0^t B_i.
    std::vector<double> T_alloc;
    std::vector<double> next_arrival;
    /// Value of T_i at which the next class-i potential service completes.
    std::vector<double> next_service_epoch;
    std::vector<std::int64_t> A;
    std::vector<std::int64_t> Scomp;
    std::vector<std::int64_t> Rforced;
    std::vector<std::int64_t> Roverload;

    std::int64_t total_jobs() const;
};

struct PolicyDecision {
    std::vector<double> B;
    /// When false, arrivals of the policy's overload class are rejected.
    bool admit_istar = true;
};

class Policy {
public:
    virtual ~Policy() = default;
    /// Writes the decision for the current state into out (B resized to I).
    virtual void decide_into(const SimState& state, PolicyDecision& out) const = 0;
    PolicyDecision decide(const SimState& state) const {
        PolicyDecision d;
        decide_into(state, d);
        return d;
    }
    virtual std::string name() const = 0;
    /// Class whose arrivals are turned away when admit_istar is false.
    virtual std::size_t overload_class() const { return 0; }
};

/// Asymptotically optimal policy built from the game solution: overload
/// rejection of class i* while the workload is at or above a*, and the
/// rho' service allocation that steers queues along gamma_a.
class AoPolicy : public Policy {
public:
    /// use_theta_n selects theta^n instead of theta in the threshold test.
    AoPolicy(const ModelParams& params, const NthSystem& system, const WorkloadGeometry& geometry,
             double astar, bool use_theta_n = false);

    void decide_into(const SimState& state, PolicyDecision& out) const override;
    std::string name() const override { return "ao"; }
    std::size_t overload_class() const override { return istar_; }

    /// rho'(x): service fractions at scaled queue lengths x.
    std::vector<double> service_fractions(std::span<const double> scaled) const;
    void service_fractions_into(std::span<const double> scaled, std::vector<double>& B) const;
    double astar() const { return astar_; }

private:
    double scale_;
    std::vector<double> rho_;
    std::vector<double> a_;
    std::vector<double> threshold_theta_;
    std::size_t istar_;
    double astar_;
};

/// Serves the lowest-index nonempty class at full rate; forced rejections only.
class StaticPriorityPolicy : public Policy {
public:
    void decide_into(const SimState& state, PolicyDecision& out) const override;
    std::string name() const override { return "static-priority"; }
};

/// AO service allocation without overload rejections.
class FullBufferRejectOnlyPolicy : public Policy {
public:
    FullBufferRejectOnlyPolicy(const ModelParams& params, const NthSystem& system,
                               const WorkloadGeometry& geometry);
    void decide_into(const SimState& state, PolicyDecision& out) const override;
    std::string name() const override { return "full-buffer-reject-only"; }

private:
    AoPolicy service_;
};

/// Constant fractions f_i applied to nonempty classes; forced rejections only.
class FixedFractionPolicy : public Policy {
public:
    explicit FixedFractionPolicy(std::vector<double> fractions) : fractions_(std::move(fractions)) {}
    void decide_into(const SimState& state, PolicyDecision& out) const override;
    std::string name() const override { return "fixed"; }

private:
    std::vector<double> fractions_;
};

enum class PolicyKind { ao, static_priority, full_buffer_reject_only };

PolicyKind parse_policy_kind(const std::string& name);
std::string to_string(PolicyKind kind);

/// Builds a policy; eps0 and beta0 are used by the AO-based kinds.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const ModelParams& params,
                                    const NthSystem& system, const WorkloadGeometry& geometry,
                                    double beta0, bool use_theta_n = false);

enum class EventKind : std::uint8_t { start, arrival, completion, forced_rejection, overload_rejection, end };

std::string to_string(EventKind kind);

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::start;
    int cls = -1;
};

/// Receives every event with the state and decision in force after it.
class SimObserver {
public:
    virtual ~SimObserver() = default;
    virtual void on_event(const Event& event, const SimState& state,
                          const PolicyDecision& decision) = 0;
};

/// Event-driven engine for one replication of the n-th system. Random streams
/// are derived from (seed, replication, class, process) so replications and
/// classes are independent and reproducible.
class Simulator {
public:
    Simulator(const NthSystem& system, const Policy& policy, std::uint64_t seed,
              std::uint64_t replication = 0);

    const SimState& state() const { return state_; }
    const PolicyDecision& decision() const { return decision_; }

    /// Time of the next event under the current decision.
    double next_event_time() const;
    /// Advances to and applies the next event, then re-queries the policy.
    /// Completions precede arrivals at equal times; ties within a kind go to
    /// the lower class index.
    Event next_event();
    /// Advances the clock to t (no event in between) and returns the end marker.
    Event advance_to(double t);

private:
    void advance_clock(double t);

    const NthSystem& system_;
    const Policy& policy_;
    std::size_t istar_;
    SimState state_;
    PolicyDecision decision_;
    std::vector<std::mt19937_64> ia_rng_;
    std::vector<std::mt19937_64> st_rng_;
};

/// Event log of one run with state snapshots after each event. Per-class
/// fields are stored flat, row k holding entries [k*I, (k+1)*I).
struct Trajectory {
    std::size_t classes = 0;
    double scale = 1.0;
    std::vector<double> theta_n;
    std::vector<std::int64_t> X0;
    std::size_t overload_class = 0;

    std::vector<double> time;
    std::vector<EventKind> kind;
    std::vector<int> cls;
    std::vector<std::uint8_t> admit;
    std::vector<std::int64_t> X;
    std::vector<std::int64_t> A;
    std::vector<std::int64_t> S;
    std::vector<std::int64_t> Rforced;
    std::vector<std::int64_t> Roverload;
    std::vector<double> B;

    std::size_t size() const { return time.size(); }
    std::span<const std::int64_t> X_at(std::size_t k) const { return {X.data() + k * classes, classes}; }
    std::span<const double> B_at(std::size_t k) const { return {B.data() + k * classes, classes}; }
    /// MD-scaled queue length X_i / (b_n sqrt n) after event k.
    double scaled(std::size_t k, std::size_t i) const {
        return static_cast<double>(X[k * classes + i]) / scale;
    }
    /// theta^n . scaled queue lengths after event k.
    double workload(std::size_t k) const;
};

class TrajectoryRecorder : public SimObserver {
public:
    explicit TrajectoryRecorder(Trajectory& out) : out_(out) {}
    void on_event(const Event& event, const SimState& state, const PolicyDecision& decision) override;

private:
    Trajectory& out_;
};

/// Runs until time T, notifying the observer of the start, every event with
/// time <= T, and a final end marker at T.
void run(const NthSystem& system, const Policy& policy, double T, std::uint64_t seed,
         std::uint64_t replication, SimObserver& observer);

/// Convenience wrapper recording the full trajectory.
Trajectory run(const NthSystem& system, const Policy& policy, double T, std::uint64_t seed,
               std::uint64_t replication = 0);

struct TrackingSummary {
    /// Fraction of [0, T] with max_i |X~_i - gamma_a_i(X^)| > eps0.
    double off_curve_fraction = 0.0;
    /// Fraction of [0, T] with theta . X~ >= a* while class i* was admitted.
    double admitted_above_threshold_fraction = 0.0;
    std::vector<std::int64_t> rejections;  // forced + overload, per class
    double istar_rejection_share = 1.0;    // 1 when there were no rejections
};

/// Time-weighted scan of a trajectory against the curve gamma_a and threshold a*.
TrackingSummary summarize_tracking(const Trajectory& traj, const WorkloadGeometry& geometry,
                                   double astar, std::size_t istar, bool use_theta_n = false);

}  // namespace mdq

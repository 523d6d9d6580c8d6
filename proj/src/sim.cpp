#include "mdq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mdq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication, std::uint64_t cls,
                          std::uint64_t process) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ replication);
    h = splitmix64(h ^ (cls << 1 | process));
    return h;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::int64_t SimState::total_jobs() const { return std::accumulate(X.begin(), X.end(), std::int64_t{0}); }

AoPolicy::AoPolicy(const ModelParams& params, const NthSystem& system,
                   const WorkloadGeometry& geometry, double astar, bool use_theta_n)
    : scale_(system.scale),
      a_(geometry.a()),
      threshold_theta_(use_theta_n ? system.theta_n : geometry.theta()),
      istar_(geometry.istar()),
      astar_(astar) {
    for (const auto& c : params.classes) rho_.push_back(c.rho());
}

std::vector<double> AoPolicy::service_fractions(std::span<const double> x) const {
    std::vector<double> B;
    service_fractions_into(x, B);
    return B;
}

void AoPolicy::service_fractions_into(std::span<const double> x, std::vector<double>& B) const {
    const std::size_t I = x.size();
    B.assign(I, 0.0);
    std::size_t low = I - 1;
    for (std::size_t i = I; i-- > 0;) {
        if (x[i] < a_[i]) {
            low = i;
            break;
        }
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
        if (i != low && x[i] > 0.0) mass += rho_[i];
    }
    if (mass > 0.0) {
        for (std::size_t i = 0; i < I; ++i) {
            if (i != low && x[i] > 0.0) B[i] = rho_[i] / mass;
        }
    } else if (x[low] > 0.0) {
        B[low] = 1.0;
    }
}

void AoPolicy::decide_into(const SimState& state, PolicyDecision& out) const {
    const std::size_t I = state.X.size();
    thread_local std::vector<double> scratch;
    scratch.resize(I);
    double workload = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
        scratch[i] = static_cast<double>(state.X[i]) / scale_;
        workload += threshold_theta_[i] * scratch[i];
    }
    service_fractions_into(scratch, out.B);
    out.admit_istar = workload < astar_;
}

void StaticPriorityPolicy::decide_into(const SimState& state, PolicyDecision& out) const {
    out.B.assign(state.X.size(), 0.0);
    for (std::size_t i = 0; i < state.X.size(); ++i) {
        if (state.X[i] > 0) {
            out.B[i] = 1.0;
            break;
        }
    }
    out.admit_istar = true;
}

FullBufferRejectOnlyPolicy::FullBufferRejectOnlyPolicy(const ModelParams& params,
                                                       const NthSystem& system,
                                                       const WorkloadGeometry& geometry)
    : service_(params, system, geometry, kInf) {}

void FullBufferRejectOnlyPolicy::decide_into(const SimState& state, PolicyDecision& out) const {
    service_.decide_into(state, out);
    out.admit_istar = true;
}

void FixedFractionPolicy::decide_into(const SimState& state, PolicyDecision& out) const {
    out.B.assign(state.X.size(), 0.0);
    for (std::size_t i = 0; i < out.B.size() && i < fractions_.size(); ++i) {
        if (state.X[i] > 0) out.B[i] = fractions_[i];
    }
    out.admit_istar = true;
}

PolicyKind parse_policy_kind(const std::string& name) {
    if (name == "ao") return PolicyKind::ao;
    if (name == "static-priority") return PolicyKind::static_priority;
    if (name == "full-buffer-reject-only") return PolicyKind::full_buffer_reject_only;
    throw std::invalid_argument("unknown policy kind \"" + name + "\"");
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::ao: return "ao";
        case PolicyKind::static_priority: return "static-priority";
        case PolicyKind::full_buffer_reject_only: return "full-buffer-reject-only";
    }
    return "unknown";
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ModelParams& params,
                                    const NthSystem& system, const WorkloadGeometry& geometry,
                                    double beta0, bool use_theta_n) {
    switch (kind) {
        case PolicyKind::ao:
            return std::make_unique<AoPolicy>(params, system, geometry, geometry.astar(beta0),
                                              use_theta_n);
        case PolicyKind::static_priority: return std::make_unique<StaticPriorityPolicy>();
        case PolicyKind::full_buffer_reject_only:
            return std::make_unique<FullBufferRejectOnlyPolicy>(params, system, geometry);
    }
    throw std::invalid_argument("make_policy: unknown kind");
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::start: return "start";
        case EventKind::arrival: return "arrival";
        case EventKind::completion: return "completion";
        case EventKind::forced_rejection: return "forced_rejection";
        case EventKind::overload_rejection: return "overload_rejection";
        case EventKind::end: return "end";
    }
    return "unknown";
}

Simulator::Simulator(const NthSystem& system, const Policy& policy, std::uint64_t seed,
                     std::uint64_t replication)
    : system_(system), policy_(policy), istar_(policy.overload_class()) {
    const std::size_t I = system.num_classes();
    state_.X = system.X0;
    state_.T_alloc.assign(I, 0.0);
    state_.A.assign(I, 0);
    state_.Scomp.assign(I, 0);
    state_.Rforced.assign(I, 0);
    state_.Roverload.assign(I, 0);
    for (std::size_t i = 0; i < I; ++i) {
        ia_rng_.emplace_back(stream_seed(seed, replication, i, 0));
        st_rng_.emplace_back(stream_seed(seed, replication, i, 1));
        state_.next_arrival.push_back(system.ia_dist[i].sample(ia_rng_[i]) / system.lambda_n[i]);
        state_.next_service_epoch.push_back(system.st_dist[i].sample(st_rng_[i]) / system.mu_n[i]);
    }
    policy_.decide_into(state_, decision_);
}

double Simulator::next_event_time() const {
    double t = kInf;
    for (std::size_t i = 0; i < state_.X.size(); ++i) {
        t = std::min(t, state_.next_arrival[i]);
        const double b = decision_.B[i];
        if (b > 0.0) t = std::min(t, state_.t + (state_.next_service_epoch[i] - state_.T_alloc[i]) / b);
    }
    return t;
}

void Simulator::advance_clock(double t) {
    const double dt = t - state_.t;
    for (std::size_t i = 0; i < state_.X.size(); ++i) {
        const double b = decision_.B[i];
        if (b > 0.0) {
            state_.T_alloc[i] = std::min(state_.T_alloc[i] + b * dt, state_.next_service_epoch[i]);
        }
    }
    state_.t = t;
}

Event Simulator::next_event() {
    const std::size_t I = state_.X.size();
    double t_comp = kInf;
    std::size_t i_comp = I;
    double t_arr = kInf;
    std::size_t i_arr = I;
    for (std::size_t i = 0; i < I; ++i) {
        const double b = decision_.B[i];
        if (b > 0.0) {
            const double tc = state_.t + (state_.next_service_epoch[i] - state_.T_alloc[i]) / b;
            if (tc < t_comp) {
                t_comp = tc;
                i_comp = i;
            }
        }
        if (state_.next_arrival[i] < t_arr) {
            t_arr = state_.next_arrival[i];
            i_arr = i;
        }
    }
    const double te = std::min(t_comp, t_arr);
    if (!std::isfinite(te)) throw std::runtime_error("Simulator: nonfinite next event time");

    Event ev;
    ev.time = te;
    advance_clock(te);
    if (t_comp <= t_arr) {
        const std::size_t i = i_comp;
        if (state_.X[i] <= 0) throw std::logic_error("Simulator: completion from an empty class");
        state_.T_alloc[i] = state_.next_service_epoch[i];
        state_.X[i] -= 1;
        state_.Scomp[i] += 1;
        state_.next_service_epoch[i] += system_.st_dist[i].sample(st_rng_[i]) / system_.mu_n[i];
        ev.kind = EventKind::completion;
        ev.cls = static_cast<int>(i);
    } else {
        const std::size_t i = i_arr;
        state_.A[i] += 1;
        state_.next_arrival[i] += system_.ia_dist[i].sample(ia_rng_[i]) / system_.lambda_n[i];
        ev.cls = static_cast<int>(i);
        if (state_.X[i] + 1 > system_.buffer_cap[i]) {
            state_.Rforced[i] += 1;
            ev.kind = EventKind::forced_rejection;
        } else if (i == istar_ && !decision_.admit_istar) {
            state_.Roverload[i] += 1;
            ev.kind = EventKind::overload_rejection;
        } else {
            state_.X[i] += 1;
            ev.kind = EventKind::arrival;
        }
    }
    policy_.decide_into(state_, decision_);
    return ev;
}

Event Simulator::advance_to(double t) {
    advance_clock(t);
    return {t, EventKind::end, -1};
}

double Trajectory::workload(std::size_t k) const {
    double w = 0.0;
    for (std::size_t i = 0; i < classes; ++i) w += theta_n[i] * scaled(k, i);
    return w;
}

void TrajectoryRecorder::on_event(const Event& event, const SimState& state,
                                  const PolicyDecision& decision) {
    out_.time.push_back(event.time);
    out_.kind.push_back(event.kind);
    out_.cls.push_back(event.cls);
    out_.admit.push_back(decision.admit_istar ? 1 : 0);
    out_.X.insert(out_.X.end(), state.X.begin(), state.X.end());
    out_.A.insert(out_.A.end(), state.A.begin(), state.A.end());
    out_.S.insert(out_.S.end(), state.Scomp.begin(), state.Scomp.end());
    out_.Rforced.insert(out_.Rforced.end(), state.Rforced.begin(), state.Rforced.end());
    out_.Roverload.insert(out_.Roverload.end(), state.Roverload.begin(), state.Roverload.end());
    out_.B.insert(out_.B.end(), decision.B.begin(), decision.B.end());
}

void run(const NthSystem& system, const Policy& policy, double T, std::uint64_t seed,
         std::uint64_t replication, SimObserver& observer) {
    Simulator sim(system, policy, seed, replication);
    observer.on_event({0.0, EventKind::start, -1}, sim.state(), sim.decision());
    if (T <= 0.0) return;
    while (sim.next_event_time() <= T) {
        const Event ev = sim.next_event();
        observer.on_event(ev, sim.state(), sim.decision());
    }
    const Event end = sim.advance_to(T);
    observer.on_event(end, sim.state(), sim.decision());
}

Trajectory run(const NthSystem& system, const Policy& policy, double T, std::uint64_t seed,
               std::uint64_t replication) {
    Trajectory traj;
    traj.classes = system.num_classes();
    traj.scale = system.scale;
    traj.theta_n = system.theta_n;
    traj.X0 = system.X0;
    traj.overload_class = policy.overload_class();
    TrajectoryRecorder rec(traj);
    run(system, policy, T, seed, replication, rec);
    return traj;
}

TrackingSummary summarize_tracking(const Trajectory& traj, const WorkloadGeometry& geometry,
                                   double astar, std::size_t istar, bool use_theta_n) {
    TrackingSummary out;
    const std::size_t I = traj.classes;
    out.rejections.assign(I, 0);
    if (traj.size() == 0) return out;
    const double T = traj.time.back();
    const double eps0 = geometry.eps0();
    const auto& theta = geometry.theta();
    double off = 0.0;
    double admitted_above = 0.0;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dt = traj.time[k + 1] - traj.time[k];
        if (dt <= 0.0) continue;
        const double w_check = std::clamp(traj.workload(k), 0.0, geometry.D());
        const auto curve = geometry.gamma_a(w_check);
        double dev = 0.0;
        double w_threshold = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            dev = std::max(dev, std::abs(traj.scaled(k, i) - curve[i]));
            w_threshold += (use_theta_n ? traj.theta_n[i] : theta[i]) * traj.scaled(k, i);
        }
        if (dev > eps0) off += dt;
        if (w_threshold >= astar && traj.admit[k]) admitted_above += dt;
    }
    if (T > 0.0) {
        out.off_curve_fraction = off / T;
        out.admitted_above_threshold_fraction = admitted_above / T;
    }
    const std::size_t last = traj.size() - 1;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < I; ++i) {
        out.rejections[i] = traj.Rforced[last * I + i] + traj.Roverload[last * I + i];
        total += out.rejections[i];
    }
    if (total > 0) {
        out.istar_rejection_share =
            static_cast<double>(out.rejections[istar]) / static_cast<double>(total);
    }
    return out;
}

}  // namespace mdq

#include "mdq/rscost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mdq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

bool is_rejection(EventKind k) {
    return k == EventKind::forced_rejection || k == EventKind::overload_rejection;
}

}  // namespace

double CostPath::at(double time) const {
    if (t.empty() || time < t.front() || time > t.back()) {
        throw std::out_of_range("CostPath::at: time outside the path");
    }
    // Last knot with t <= time gives right-continuity at jumps.
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    if (k + 1 >= t.size()) return value[k];
    const double dt = t[k + 1] - t[k];
    if (dt <= 0.0) return value[k];
    return value[k] + (value[k + 1] - value[k]) * (time - t[k]) / dt;
}

CostPath CostPath::shifted(double c) const {
    CostPath out = *this;
    for (double& v : out.value) v += c;
    return out;
}

CostPath running_cost(const Trajectory& traj, const ModelParams& params) {
    CostPath H;
    if (traj.size() == 0) return H;
    const std::size_t I = traj.classes;
    double h = 0.0;
    double slope = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.time[k];
        if (k > 0) {
            h += slope * (t - traj.time[k - 1]);
            H.t.push_back(t);
            H.value.push_back(h);
        } else {
            H.t.push_back(t);
            H.value.push_back(h);
        }
        if (is_rejection(traj.kind[k])) {
            h += params.classes[static_cast<std::size_t>(traj.cls[k])].rbar / traj.scale;
            H.t.push_back(t);
            H.value.push_back(h);
        }
        slope = 0.0;
        for (std::size_t i = 0; i < I; ++i) slope += params.classes[i].hbar * traj.scaled(k, i);
    }
    return H;
}

void LogIntegral::add_segment(double h0, double slope, double dt) {
    if (!(dt > 0.0)) return;
    const double m = k_ * slope;
    const double x = m * dt;
    double term;
    if (m == 0.0) {
        term = std::log(dt);
    } else if (x > 0.0) {
        // (e^x - 1)/m = e^x (1 - e^-x)/m
        term = x + std::log(-std::expm1(-x)) - std::log(m);
    } else {
        term = std::log(-std::expm1(x)) - std::log(-m);
    }
    log_value_ = log_add(log_value_, k_ * h0 + term);
}

double replication_log_weight(const CostPath& H, double b, double T) {
    if (H.t.empty()) throw std::invalid_argument("replication_log_weight: empty path");
    if (H.t.front() > 0.0 || H.t.back() < T) {
        throw std::invalid_argument("replication_log_weight: path does not cover [0, T]");
    }
    LogIntegral acc(b * b);
    for (std::size_t k = 0; k + 1 < H.t.size(); ++k) {
        const double t0 = H.t[k];
        if (t0 >= T) break;
        const double dt_full = H.t[k + 1] - t0;
        if (dt_full <= 0.0) continue;
        const double slope = (H.value[k + 1] - H.value[k]) / dt_full;
        acc.add_segment(H.value[k], slope, std::min(H.t[k + 1], T) - t0);
    }
    return acc.log_value();
}

void RsAccumulator::add(double lw) {
    if (lw > max_) {
        const double r = std::exp(max_ - lw);
        sum_ *= r;
        sum_sq_ *= r * r;
        max_ = lw;
    }
    const double w = std::exp(lw - max_);
    sum_ += w;
    sum_sq_ += w * w;
    ++count_;
}

void RsAccumulator::merge(const RsAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double m = std::max(max_, other.max_);
    const double ra = std::exp(max_ - m);
    const double rb = std::exp(other.max_ - m);
    sum_ = sum_ * ra + other.sum_ * rb;
    sum_sq_ = sum_sq_ * ra * ra + other.sum_sq_ * rb * rb;
    max_ = m;
    count_ += other.count_;
}

double RsAccumulator::value() const {
    if (count_ == 0) throw std::logic_error("RsAccumulator: no replications");
    return (max_ + (std::log(sum_) - std::log(static_cast<double>(count_)))) / (b_ * b_);
}

double RsAccumulator::ess() const {
    if (count_ == 0) return 0.0;
    return sum_ * sum_ / sum_sq_;
}

RsEstimate aggregate(std::span<const double> log_weights, double b) {
    if (log_weights.empty()) throw std::invalid_argument("aggregate: no replications");
    RsAccumulator acc(b);
    for (double lw : log_weights) acc.add(lw);
    RsEstimate out;
    out.value = acc.value();
    out.replications = log_weights.size();
    out.log_weights.assign(log_weights.begin(), log_weights.end());
    out.ess = acc.ess();
    out.heavy_tail = out.ess < 0.05 * static_cast<double>(out.replications);
    out.b = b;
    return out;
}

CostObserver::CostObserver(const ModelParams& params, double scale, double b)
    : scale_(scale), integral_(b * b) {
    for (const auto& c : params.classes) {
        hbar_.push_back(c.hbar);
        rbar_.push_back(c.rbar);
    }
}

void CostObserver::on_event(const Event& event, const SimState& state, const PolicyDecision&) {
    if (event.kind != EventKind::start) {
        const double dt = event.time - t_prev_;
        integral_.add_segment(H_, slope_, dt);
        H_ += slope_ * dt;
    }
    t_prev_ = event.time;
    if (is_rejection(event.kind)) H_ += rbar_[static_cast<std::size_t>(event.cls)] / scale_;
    slope_ = 0.0;
    for (std::size_t i = 0; i < hbar_.size(); ++i) {
        slope_ += hbar_[i] * static_cast<double>(state.X[i]) / scale_;
    }
}

unsigned worker_count() {
    if (const char* env = std::getenv("MDQ_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

RsEstimate estimate_Jn(const NthSystem& system, const ModelParams& params, const Policy& policy,
                       double T, std::size_t M, std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("estimate_Jn: need at least 2 replications");
    if (!(T > 0.0)) throw std::invalid_argument("estimate_Jn: horizon must be positive");
    std::vector<double> lw(M);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), M));
    auto work = [&](unsigned w) {
        for (std::size_t m = w; m < M; m += workers) {
            CostObserver obs(params, system.scale, system.b_n);
            run(system, policy, T, seed, m, obs);
            lw[m] = obs.log_weight();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    return aggregate(lw, system.b_n);
}

double lower_envelope_value(std::span<const CostPath> Hs, double b, double T, double delta) {
    if (Hs.empty()) throw std::invalid_argument("lower_envelope_value: no paths");
    if (!(delta > 0.0 && delta < T)) throw std::invalid_argument("lower_envelope_value: delta outside (0, T)");
    const double k = b * b;
    double acc = kNegInf;
    for (const auto& H : Hs) acc = log_add(acc, k * H.at(T - delta) + std::log(delta));
    return (acc - std::log(static_cast<double>(Hs.size()))) / k;
}

}  // namespace mdq

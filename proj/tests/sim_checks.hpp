#pragma once

#include <cmath>
#include <vector>

#include "mdq/sim.hpp"

namespace fx {

// Counts violations of the pathwise simulator invariants at every event:
// balance equation, buffer bounds, admissibility of B, monotone allocation
// clocks with total rate at most one, and (optionally) work conservation.
class InvariantObserver : public mdq::SimObserver {
public:
    InvariantObserver(const mdq::NthSystem& system, bool work_conserving)
        : system_(system), work_conserving_(work_conserving) {}

    void on_event(const mdq::Event& ev, const mdq::SimState& s, const mdq::PolicyDecision& d) override {
        ++events;
        const std::size_t I = s.X.size();
        double total_b = 0.0;
        double total_dT = 0.0;
        std::int64_t jobs = 0;
        for (std::size_t i = 0; i < I; ++i) {
            const std::int64_t bal = system_.X0[i] + s.A[i] - s.Scomp[i] - s.Rforced[i] - s.Roverload[i];
            if (bal != s.X[i]) ++balance;
            if (s.X[i] < 0 || s.X[i] > system_.buffer_cap[i]) ++buffer;
            if (d.B[i] < 0.0 || (s.X[i] == 0 && d.B[i] != 0.0)) ++admissibility;
            total_b += d.B[i];
            jobs += s.X[i];
            if (!prev_T_.empty()) {
                const double dT = s.T_alloc[i] - prev_T_[i];
                if (dT < 0.0) ++allocation;
                total_dT += dT;
            }
        }
        if (total_b > 1.0 + 1e-12) ++admissibility;
        if (!prev_T_.empty() && total_dT > (ev.time - prev_t_) * (1.0 + 1e-9) + 1e-12) ++allocation;
        if (work_conserving_ && jobs > 0 && std::abs(total_b - 1.0) > 1e-12) ++work_conservation;
        prev_T_ = s.T_alloc;
        prev_t_ = ev.time;
    }

    int total() const { return balance + buffer + admissibility + allocation + work_conservation; }

    int events = 0;
    int balance = 0;
    int buffer = 0;
    int admissibility = 0;
    int allocation = 0;
    int work_conservation = 0;

private:
    const mdq::NthSystem& system_;
    bool work_conserving_;
    std::vector<double> prev_T_;
    double prev_t_ = 0.0;
};

}  // namespace fx

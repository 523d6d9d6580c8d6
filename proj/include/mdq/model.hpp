#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mdq {

/// Mean-one positive distributions used for normalized interarrival and
/// service times. Every member has a finite exponential moment near zero.
struct Distribution {
    enum class Kind { exponential, uniform, deterministic, gamma };

    Kind kind = Kind::exponential;
    /// uniform: half-width c of [1-c, 1+c] (0 < c < 1); gamma: shape k.
    double param = 0.0;

    static Distribution exponential() { return {Kind::exponential, 0.0}; }
    static Distribution uniform(double half_width) { return {Kind::uniform, half_width}; }
    static Distribution deterministic() { return {Kind::deterministic, 0.0}; }
    static Distribution gamma(double shape) { return {Kind::gamma, shape}; }

    double variance() const;
    bool parameter_valid() const;
    double sample(std::mt19937_64& rng) const;
    std::string name() const;
};

struct ClassParams {
    double lambda = 1.0;  // first-order arrival rate
    double mu = 1.0;      // first-order service rate
    double var_ia = 1.0;
    double var_st = 1.0;
    double tilde_lambda = 0.0;
    double tilde_mu = 0.0;
    double D = 1.0;       // buffer size, MD-scaled units
    double hbar = 1.0;    // holding cost rate
    double rbar = 1.0;    // per-job rejection cost
    Distribution ia_dist = Distribution::exponential();
    Distribution st_dist = Distribution::exponential();
    /// Position of this class in the caller's original ordering.
    std::size_t original_index = 0;

    double rho() const { return lambda / mu; }
};

/// Model parameters. Classes are kept sorted so that hbar_i * mu_i is
/// nonincreasing in i; use make() to get the relabeling.
struct ModelParams {
    std::vector<ClassParams> classes;
    std::vector<double> x0;
    double scaling_exponent = 0.3;

    static ModelParams make(std::vector<ClassParams> classes, std::vector<double> x0,
                            double scaling_exponent = 0.3);

    std::size_t num_classes() const { return classes.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationReport validate(const ModelParams& params);

/// The n-th queueing system obtained from the MD scaling.
struct NthSystem {
    std::uint64_t n = 1;
    double b_n = 1.0;
    double scale = 1.0;  // b_n * sqrt(n)
    std::vector<double> lambda_n;
    std::vector<double> mu_n;
    std::vector<double> theta_n;
    double D_n = 0.0;
    std::vector<std::int64_t> X0;
    /// floor(b_n sqrt(n) D_i): the largest admissible queue length.
    std::vector<std::int64_t> buffer_cap;
    std::vector<Distribution> ia_dist;
    std::vector<Distribution> st_dist;

    std::size_t num_classes() const { return lambda_n.size(); }
};

/// Builds the n-th system. Throws std::invalid_argument for n == 0 or when the
/// second-order correction drives a rate nonpositive. Does not re-run validate().
NthSystem instantiate(const ModelParams& params, std::uint64_t n);

}  // namespace mdq

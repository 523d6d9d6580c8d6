#include "mdq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mdq {

double Distribution::variance() const {
    switch (kind) {
        case Kind::exponential: return 1.0;
        case Kind::uniform: return param * param / 3.0;
        case Kind::deterministic: return 0.0;
        case Kind::gamma: return 1.0 / param;
    }
    return 0.0;
}

bool Distribution::parameter_valid() const {
    switch (kind) {
        case Kind::uniform: return param > 0.0 && param < 1.0;
        case Kind::gamma: return param > 0.0 && std::isfinite(param);
        default: return true;
    }
}

double Distribution::sample(std::mt19937_64& rng) const {
    switch (kind) {
        case Kind::exponential: return std::exponential_distribution<double>(1.0)(rng);
        case Kind::uniform:
            return std::uniform_real_distribution<double>(1.0 - param, 1.0 + param)(rng);
        case Kind::deterministic: return 1.0;
        case Kind::gamma: return std::gamma_distribution<double>(param, 1.0 / param)(rng);
    }
    return 1.0;
}

std::string Distribution::name() const {
    switch (kind) {
        case Kind::exponential: return "exponential";
        case Kind::uniform: return "uniform";
        case Kind::deterministic: return "deterministic";
        case Kind::gamma: return "gamma";
    }
    return "unknown";
}

ModelParams ModelParams::make(std::vector<ClassParams> classes, std::vector<double> x0,
                              double scaling_exponent) {
    if (x0.size() != classes.size()) {
        throw std::invalid_argument("x0 has " + std::to_string(x0.size()) + " entries for " +
                                    std::to_string(classes.size()) + " classes");
    }
    std::vector<std::size_t> order(classes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return classes[a].hbar * classes[a].mu > classes[b].hbar * classes[b].mu;
    });
    ModelParams out;
    out.scaling_exponent = scaling_exponent;
    for (std::size_t k : order) {
        ClassParams c = classes[k];
        c.original_index = k;
        out.classes.push_back(c);
        out.x0.push_back(x0[k]);
    }
    return out;
}

std::string ValidationReport::summary() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t k = 0; k < violations.size(); ++k) {
        if (k) os << "; ";
        os << violations[k];
    }
    return os.str();
}

namespace {

void require_positive(ValidationReport& rep, std::size_t i, const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        rep.violations.push_back("classes[" + std::to_string(i) + "]." + field +
                                 " must be positive and finite");
    }
}

void check_dist(ValidationReport& rep, std::size_t i, const char* field, const Distribution& d,
                double var) {
    const std::string where = "classes[" + std::to_string(i) + "]." + field;
    if (!d.parameter_valid()) {
        rep.violations.push_back(where + " has an invalid parameter for " + d.name());
        return;
    }
    if (std::abs(d.variance() - var) > 1e-12 * std::max(1.0, var)) {
        std::ostringstream os;
        os << where << " variance " << d.variance() << " does not match " << var;
        rep.violations.push_back(os.str());
    }
}

}  // namespace

ValidationReport validate(const ModelParams& p) {
    ValidationReport rep;
    if (p.classes.empty()) {
        rep.violations.emplace_back("at least one class is required");
        return rep;
    }
    for (std::size_t i = 0; i < p.classes.size(); ++i) {
        const ClassParams& c = p.classes[i];
        require_positive(rep, i, "lambda", c.lambda);
        require_positive(rep, i, "mu", c.mu);
        require_positive(rep, i, "var_ia", c.var_ia);
        require_positive(rep, i, "var_st", c.var_st);
        require_positive(rep, i, "D", c.D);
        require_positive(rep, i, "hbar", c.hbar);
        require_positive(rep, i, "rbar", c.rbar);
        if (!std::isfinite(c.tilde_lambda) || !std::isfinite(c.tilde_mu)) {
            rep.violations.push_back("classes[" + std::to_string(i) +
                                     "] second-order rates must be finite");
        }
        check_dist(rep, i, "ia_dist", c.ia_dist, c.var_ia);
        check_dist(rep, i, "st_dist", c.st_dist, c.var_st);
    }
    if (!rep.ok()) return rep;

    double load = 0.0;
    for (const auto& c : p.classes) load += c.rho();
    if (std::abs(load - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "critical load: sum of rho_i is " << load << ", expected 1";
        rep.violations.push_back(os.str());
    }
    for (std::size_t i = 1; i < p.classes.size(); ++i) {
        const auto& a = p.classes[i - 1];
        const auto& b = p.classes[i];
        if (a.hbar * a.mu < b.hbar * b.mu) {
            rep.violations.push_back("labeling: hbar*mu must be nonincreasing (classes " +
                                     std::to_string(i - 1) + ", " + std::to_string(i) + ")");
        }
    }
    if (!(p.scaling_exponent > 0.0 && p.scaling_exponent < 0.5)) {
        rep.violations.emplace_back("scaling_exponent must lie in (0, 1/2)");
    }
    if (p.x0.size() != p.classes.size()) {
        rep.violations.emplace_back("x0 must have one entry per class");
    } else {
        for (std::size_t i = 0; i < p.x0.size(); ++i) {
            if (!(p.x0[i] >= 0.0 && p.x0[i] <= p.classes[i].D)) {
                rep.violations.push_back("x0[" + std::to_string(i) + "] must lie in [0, D_i]");
            }
        }
    }
    return rep;
}

NthSystem instantiate(const ModelParams& p, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("instantiate: n must be positive");
    if (p.x0.size() != p.classes.size()) {
        throw std::invalid_argument("instantiate: x0 must have one entry per class");
    }
    NthSystem sys;
    sys.n = n;
    const double nd = static_cast<double>(n);
    sys.b_n = std::pow(nd, p.scaling_exponent);
    sys.scale = sys.b_n * std::sqrt(nd);
    for (std::size_t i = 0; i < p.classes.size(); ++i) {
        const ClassParams& c = p.classes[i];
        const double lam = nd * c.lambda + sys.scale * c.tilde_lambda;
        const double mu = nd * c.mu + sys.scale * c.tilde_mu;
        if (!(lam > 0.0) || !(mu > 0.0)) {
            throw std::invalid_argument("instantiate: class " + std::to_string(i) +
                                        " has a nonpositive rate at n=" + std::to_string(n));
        }
        sys.lambda_n.push_back(lam);
        sys.mu_n.push_back(mu);
        sys.theta_n.push_back(nd / mu);
        sys.D_n += sys.theta_n.back() * c.D;
        sys.X0.push_back(static_cast<std::int64_t>(std::llround(sys.scale * p.x0[i])));
        sys.buffer_cap.push_back(static_cast<std::int64_t>(std::floor(sys.scale * c.D)));
        sys.X0.back() = std::min(sys.X0.back(), sys.buffer_cap.back());
        sys.ia_dist.push_back(c.ia_dist);
        sys.st_dist.push_back(c.st_dist);
    }
    return sys;
}

}  // namespace mdq

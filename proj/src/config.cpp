#include "mdq/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace mdq {

using nlohmann::json;

namespace {

double get_number(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ConfigError(path + key, "missing required key");
    }
    if (!it->is_number()) throw ConfigError(path + key, "expected a number");
    return it->get<double>();
}

Distribution parse_dist(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object with a \"kind\" key");
    auto kind = obj.find("kind");
    if (kind == obj.end() || !kind->is_string()) {
        throw ConfigError(path + ".kind", "expected one of exponential, uniform, deterministic, gamma");
    }
    const std::string k = kind->get<std::string>();
    if (k == "exponential") return Distribution::exponential();
    if (k == "deterministic") return Distribution::deterministic();
    if (k == "uniform") return Distribution::uniform(get_number(obj, "half_width", path + "."));
    if (k == "gamma") return Distribution::gamma(get_number(obj, "shape", path + "."));
    throw ConfigError(path + ".kind", "unknown distribution \"" + k + "\"");
}

void parse_noise(const json& obj, const std::string& path, const char* var_key,
                 const char* dist_key, double& var, Distribution& dist) {
    const bool has_var = obj.contains(var_key);
    const bool has_dist = obj.contains(dist_key);
    if (has_dist) dist = parse_dist(obj.at(dist_key), path + dist_key);
    if (has_var) var = get_number(obj, var_key, path);
    if (has_dist && !has_var) {
        var = dist.variance();
    } else if (has_var && !has_dist) {
        dist = var == 1.0 ? Distribution::exponential() : Distribution::gamma(1.0 / var);
    } else if (!has_var && !has_dist) {
        var = 1.0;
        dist = Distribution::exponential();
    }
}

json dist_json(const Distribution& d) {
    json j{{"kind", d.name()}};
    if (d.kind == Distribution::Kind::uniform) j["half_width"] = d.param;
    if (d.kind == Distribution::Kind::gamma) j["shape"] = d.param;
    return j;
}

}  // namespace

ModelParams parse_model(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    auto cls = doc.find("classes");
    if (cls == doc.end()) throw ConfigError("classes", "missing required key");
    if (!cls->is_array() || cls->empty()) throw ConfigError("classes", "expected a nonempty array");

    std::vector<ClassParams> classes;
    for (std::size_t i = 0; i < cls->size(); ++i) {
        const json& c = (*cls)[i];
        const std::string path = "classes[" + std::to_string(i) + "].";
        if (!c.is_object()) throw ConfigError(path.substr(0, path.size() - 1), "expected an object");
        ClassParams p;
        p.lambda = get_number(c, "lambda", path);
        p.mu = get_number(c, "mu", path);
        p.tilde_lambda = get_number(c, "tilde_lambda", path, 0.0);
        p.tilde_mu = get_number(c, "tilde_mu", path, 0.0);
        p.D = get_number(c, "D", path);
        p.hbar = get_number(c, "hbar", path);
        p.rbar = get_number(c, "rbar", path);
        parse_noise(c, path, "var_ia", "ia_dist", p.var_ia, p.ia_dist);
        parse_noise(c, path, "var_st", "st_dist", p.var_st, p.st_dist);
        classes.push_back(p);
    }

    std::vector<double> x0(classes.size(), 0.0);
    if (auto it = doc.find("x0"); it != doc.end()) {
        if (!it->is_array() || it->size() != classes.size()) {
            throw ConfigError("x0", "expected an array with one number per class");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            if (!(*it)[i].is_number()) throw ConfigError("x0[" + std::to_string(i) + "]", "expected a number");
            x0[i] = (*it)[i].get<double>();
        }
    }
    const double a = get_number(doc, "scaling_exponent", "", 0.3);
    return ModelParams::make(std::move(classes), std::move(x0), a);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("malformed JSON: ") + e.what());
    }
    return parse_model(doc);
}

json to_json(const ModelParams& p) {
    json classes = json::array();
    for (const auto& c : p.classes) {
        classes.push_back({{"lambda", c.lambda},
                           {"mu", c.mu},
                           {"var_ia", c.var_ia},
                           {"var_st", c.var_st},
                           {"tilde_lambda", c.tilde_lambda},
                           {"tilde_mu", c.tilde_mu},
                           {"D", c.D},
                           {"hbar", c.hbar},
                           {"rbar", c.rbar},
                           {"ia_dist", dist_json(c.ia_dist)},
                           {"st_dist", dist_json(c.st_dist)}});
    }
    return {{"classes", classes}, {"x0", p.x0}, {"scaling_exponent", p.scaling_exponent}};
}

}  // namespace mdq

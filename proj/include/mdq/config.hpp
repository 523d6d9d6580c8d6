#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mdq/model.hpp"

namespace mdq {

/// Raised for malformed model configs; what() names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Parses a model config. Keys mirror the ClassParams / ModelParams field
/// names. A missing distribution defaults to gamma with shape 1/var
/// (exponential when var == 1); a missing variance is taken from the
/// distribution. Classes are relabeled by ModelParams::make.
ModelParams parse_model(const nlohmann::json& doc);
ModelParams load_model(const std::string& path);

nlohmann::json to_json(const ModelParams& params);

}  // namespace mdq

#ifndef FCLT_CONFIG_HPP
#define FCLT_CONFIG_HPP

#include "fclt/experiments.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fclt {

/// Problem with one configuration entry. `where` is "line N" for file entries
/// and "override N" for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string where, const std::string& message);

    const std::string& key() const noexcept { return key_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::string key_;
    std::string where_;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Splits "key=value"; throws ConfigError when there is no '='.
std::pair<std::string, std::string> split_override(std::string_view text, std::size_t index);

/// Flat "key = value" lines; '#' starts a comment. Keys: n, t, c_pi, c_fv, reps,
/// boot_reps, seed, levels, freeze_units, lambda. Lists are comma-separated.
/// Overrides are applied after the text. Levels come back sorted ascending.
ExperimentConfig parse_config_text(std::string_view text, const Overrides& overrides = {},
                                   const ExperimentConfig& defaults = ExperimentConfig::desk_scale());

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides = {},
                              const ExperimentConfig& defaults = ExperimentConfig::desk_scale());

/// Inverse of parse_config_text: every key, numbers with 17 significant digits.
std::string serialize_config(const ExperimentConfig& config);

} // namespace fclt

#endif

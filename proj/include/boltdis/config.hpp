#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "boltdis/experiment.hpp"

namespace boltdis {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads the key-value experiment format:
///
///     # comment
///     [section]
///     key = value
///
/// Sections are experiment, scene, planner, executor, grounder and world.
/// Keys not listed in docs/config.md are rejected. Missing keys keep their
/// defaults. The result is validated.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config(format_config(c))
/// reproduces c.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace boltdis

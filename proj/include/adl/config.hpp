#pragma once

#include <filesystem>
#include <string_view>

#include "adl/harness.hpp"
#include "adl/recognizer.hpp"

namespace adl::config {

inline constexpr int kConfigVersion = 1;

/// Everything a config file can set. Unset keys keep their defaults.
struct AppConfig {
    harness::ExperimentConfig experiment;
    recognizer::PipelineSpec pipeline;
    recognizer::RecognizeOptions recognize;
};

/// YAML document with a top-level `version: 1`; see README for the schema.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

}  // namespace adl::config

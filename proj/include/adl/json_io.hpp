#pragma once

#include <json.hpp>

#include "adl/fusion.hpp"

namespace adl::json_io {

using Json = nlohmann::ordered_json;

Json to_json(const fusion::FusionConfig& config);
fusion::FusionConfig fusion_from_json(const nlohmann::json& doc);

Json to_json(const fusion::Normalizer& normalizer);
fusion::Normalizer normalizer_from_json(const nlohmann::json& doc);

Json to_json(const audio::MfccConfig& config);
audio::MfccConfig mfcc_from_json(const nlohmann::json& doc);

std::vector<std::string> sensor_list(const SensorAvailability& sensors);
SensorAvailability sensors_from_names(const std::vector<std::string>& names);

}  // namespace adl::json_io

#pragma once

#include <string>

#include "iotids/models.hpp"

namespace iotids {

// Versioned JSON document with a payload checksum. Round-trips reproduce
// bit-identical predictions.
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

std::string model_to_json_string(const TrainedModel& m);
TrainedModel model_from_json_string(const std::string& text);

}  // namespace iotids

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "catcast/model.hpp"

namespace catcast {

// Artifact container: a one-line magic+version, a JSON header, a raw
// little-endian float64 payload, and an FNV-1a checksum over the payload
// bytes. Baseline models reuse the same container with their own headers.
void write_artifact(const std::string& path, const nlohmann::json& header,
                    const std::vector<double>& payload);
std::pair<nlohmann::json, std::vector<double>> read_artifact(const std::string& path);

void save_model(const ModelGraph& model, const std::string& path);
ModelGraph load_model_graph(const nlohmann::json& header, const std::vector<double>& payload);
ModelGraph load_model(const std::string& path);

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);

} // namespace catcast

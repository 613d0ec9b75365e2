#pragma once

#include <string>

#include <json.hpp>

#include "cvqt/entanglement.hpp"
#include "cvqt/network.hpp"
#include "cvqt/symplectic.hpp"
#include "cvqt/teleport.hpp"

namespace cvqt {

using nlohmann::json;

json to_json(const GaussianState& state);
GaussianState state_from_json(const json& j);

json to_json(const EntanglementReport& report);
json to_json(const FidelityReport& report);
json to_json(const OptimizerResult& result);

GaussianState load_state(const std::string& path);
void save_state(const GaussianState& state, const std::string& path);

}  // namespace cvqt

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lumptrack/filter.hpp"
#include "lumptrack/simulator.hpp"

namespace lumptrack {

/// Structured-text configuration files (JSON). Parsing is strict: unknown
/// keys are rejected with the offending key and context in the message.

nlohmann::json pose_to_json(const AxisAnglePose& pose);
AxisAnglePose pose_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json chain_to_json(const KinematicChain& chain);
KinematicChain chain_from_json(const nlohmann::json& j, const std::string& context);
KinematicChain load_chain(const std::filesystem::path& file);
void save_chain(const KinematicChain& chain, const std::filesystem::path& file);

nlohmann::json rig_to_json(const std::vector<CameraModel>& rig);
std::vector<CameraModel> rig_from_json(const nlohmann::json& j, const std::string& context);
std::vector<CameraModel> load_rig(const std::filesystem::path& file);
void save_rig(const std::vector<CameraModel>& rig, const std::filesystem::path& file);

nlohmann::json filter_config_to_json(const FilterConfig& config);
FilterConfig filter_config_from_json(const nlohmann::json& j, const std::string& context);
FilterConfig load_filter_config(const std::filesystem::path& file);
void save_filter_config(const FilterConfig& config, const std::filesystem::path& file);

/// Scenario files reference the chain / rig / camera-chain files by path
/// (relative paths resolve against the scenario file's directory).
Scenario load_scenario(const std::filesystem::path& file);

/// Writes scenario.json plus the referenced chain/rig/camera-chain files
/// into `directory`. Returns the scenario file path.
std::filesystem::path save_scenario_bundle(const Scenario& scenario,
                                           const std::filesystem::path& directory);

TrackingMode tracking_mode_from_string(const std::string& s);
std::string to_string(TrackingMode mode);
CameraMode camera_mode_from_string(const std::string& s);
std::string to_string(CameraMode mode);

}  // namespace lumptrack

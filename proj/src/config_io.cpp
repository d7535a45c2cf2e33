#include "lumptrack/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "lumptrack/errors.hpp"

namespace lumptrack {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!obj.is_object()) {
    throw ConfigError(context + ": expected an object");
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(context + ": missing key '" + key + "'");
  }
  return *it;
}

double number(const json& j, const std::string& context) {
  if (!j.is_number()) throw ConfigError(context + ": expected a number");
  return j.get<double>();
}

Vec3 vec3_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(context + ": expected 3 numbers");
  return Vec3(number(j[0], context), number(j[1], context), number(j[2], context));
}

VecX vecx_from_json(const json& j, const std::string& context, int expected = -1) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array of numbers");
  if (expected >= 0 && static_cast<int>(j.size()) != expected) {
    throw ConfigError(context + ": expected " + std::to_string(expected) + " numbers, got " +
                      std::to_string(j.size()));
  }
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = number(j[i], context);
  return v;
}

json vecx_to_json(const VecX& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return j;
}

void save_json(const json& j, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

JointCycle cycle_from_json(const json& j, const std::string& context) {
  require_keys(j, {"center", "amplitude", "period", "phase", "jitter_sigma"}, context);
  JointCycle c;
  if (j.contains("center")) c.center = number(j["center"], context);
  if (j.contains("amplitude")) c.amplitude = number(j["amplitude"], context);
  if (j.contains("period")) c.period = number(j["period"], context);
  if (j.contains("phase")) c.phase = number(j["phase"], context);
  if (j.contains("jitter_sigma")) c.jitter_sigma = number(j["jitter_sigma"], context);
  return c;
}

json cycle_to_json(const JointCycle& c) {
  return {{"center", c.center},
          {"amplitude", c.amplitude},
          {"period", c.period},
          {"phase", c.phase},
          {"jitter_sigma", c.jitter_sigma}};
}

}  // namespace

json pose_to_json(const AxisAnglePose& pose) {
  return {{"w", vec3_to_json(pose.w)}, {"b", vec3_to_json(pose.b)}};
}

AxisAnglePose pose_from_json(const json& j, const std::string& context) {
  require_keys(j, {"w", "b"}, context);
  AxisAnglePose pose;
  pose.w = vec3_from_json(require(j, "w", context), context + ".w");
  pose.b = vec3_from_json(require(j, "b", context), context + ".b");
  return pose;
}

json transform_to_json(const RigidTransform& t) { return pose_to_json(t.to_pose()); }

RigidTransform transform_from_json(const json& j, const std::string& context) {
  return RigidTransform::from_pose(pose_from_json(j, context));
}

json chain_to_json(const KinematicChain& chain) {
  json joints = json::array();
  for (const auto& j : chain.joints) {
    joints.push_back({{"kind", j.kind == JointKind::Revolute ? "revolute" : "prismatic"},
                      {"alpha", j.alpha},
                      {"a", j.a},
                      {"theta_offset", j.theta_offset},
                      {"d_offset", j.d_offset}});
  }
  json tool_points = json::array();
  for (const auto& tp : chain.tool_points) {
    tool_points.push_back({{"link", tp.link}, {"point", vec3_to_json(tp.point)}});
  }
  json cylinders = json::array();
  for (const auto& c : chain.cylinders) {
    cylinders.push_back({{"link", c.link},
                         {"radius", c.radius},
                         {"axis", vec3_to_json(c.axis)},
                         {"origin", vec3_to_json(c.origin)}});
  }
  return {{"joints", joints},
          {"n_b", chain.n_b},
          {"tool_points", tool_points},
          {"cylinders", cylinders},
          {"end_transform", transform_to_json(chain.end_transform)}};
}

KinematicChain chain_from_json(const json& j, const std::string& context) {
  require_keys(j, {"joints", "n_b", "tool_points", "cylinders", "end_transform"}, context);
  KinematicChain chain;
  for (const auto& joint_json : require(j, "joints", context)) {
    const std::string jc = context + ".joints";
    require_keys(joint_json, {"kind", "alpha", "a", "theta_offset", "d_offset"}, jc);
    MdhJoint joint;
    const std::string kind = require(joint_json, "kind", jc).get<std::string>();
    if (kind == "revolute") {
      joint.kind = JointKind::Revolute;
    } else if (kind == "prismatic") {
      joint.kind = JointKind::Prismatic;
    } else {
      throw ConfigError(jc + ": unknown joint kind '" + kind + "'");
    }
    joint.alpha = number(require(joint_json, "alpha", jc), jc + ".alpha");
    joint.a = number(require(joint_json, "a", jc), jc + ".a");
    joint.theta_offset = number(require(joint_json, "theta_offset", jc), jc + ".theta_offset");
    joint.d_offset = number(require(joint_json, "d_offset", jc), jc + ".d_offset");
    chain.joints.push_back(joint);
  }
  chain.n_b = require(j, "n_b", context).get<int>();
  if (j.contains("tool_points")) {
    for (const auto& tp_json : j["tool_points"]) {
      const std::string tc = context + ".tool_points";
      require_keys(tp_json, {"link", "point"}, tc);
      ToolPoint tp;
      tp.link = require(tp_json, "link", tc).get<int>();
      tp.point = vec3_from_json(require(tp_json, "point", tc), tc + ".point");
      chain.tool_points.push_back(tp);
    }
  }
  if (j.contains("cylinders")) {
    for (const auto& c_json : j["cylinders"]) {
      const std::string cc = context + ".cylinders";
      require_keys(c_json, {"link", "radius", "axis", "origin"}, cc);
      CylinderPrimitive c;
      c.link = require(c_json, "link", cc).get<int>();
      c.radius = number(require(c_json, "radius", cc), cc + ".radius");
      c.axis = vec3_from_json(require(c_json, "axis", cc), cc + ".axis");
      c.origin = vec3_from_json(require(c_json, "origin", cc), cc + ".origin");
      chain.cylinders.push_back(c);
    }
  }
  if (j.contains("end_transform")) {
    chain.end_transform = transform_from_json(j["end_transform"], context + ".end_transform");
  }
  chain.validate();
  return chain;
}

KinematicChain load_chain(const std::filesystem::path& file) {
  return chain_from_json(load_json(file), file.filename().string());
}

void save_chain(const KinematicChain& chain, const std::filesystem::path& file) {
  save_json(chain_to_json(chain), file);
}

json rig_to_json(const std::vector<CameraModel>& rig) {
  json cameras = json::array();
  for (const auto& c : rig) {
    cameras.push_back({{"fx", c.fx},
                       {"fy", c.fy},
                       {"cu", c.cu},
                       {"cv", c.cv},
                       {"width", c.width},
                       {"height", c.height},
                       {"extrinsic", transform_to_json(c.extrinsic)}});
  }
  return {{"cameras", cameras}};
}

std::vector<CameraModel> rig_from_json(const json& j, const std::string& context) {
  require_keys(j, {"cameras"}, context);
  std::vector<CameraModel> rig;
  for (const auto& c_json : require(j, "cameras", context)) {
    const std::string cc = context + ".cameras";
    require_keys(c_json, {"fx", "fy", "cu", "cv", "width", "height", "extrinsic"}, cc);
    CameraModel c;
    c.fx = number(require(c_json, "fx", cc), cc + ".fx");
    c.fy = number(require(c_json, "fy", cc), cc + ".fy");
    c.cu = number(require(c_json, "cu", cc), cc + ".cu");
    c.cv = number(require(c_json, "cv", cc), cc + ".cv");
    c.width = require(c_json, "width", cc).get<int>();
    c.height = require(c_json, "height", cc).get<int>();
    if (c_json.contains("extrinsic")) {
      c.extrinsic = transform_from_json(c_json["extrinsic"], cc + ".extrinsic");
    }
    if (c.fx <= 0 || c.fy <= 0 || c.width <= 0 || c.height <= 0) {
      throw ConfigError(cc + ": focal lengths and image size must be positive");
    }
    rig.push_back(c);
  }
  if (rig.empty()) throw ConfigError(context + ": rig has no cameras");
  return rig;
}

std::vector<CameraModel> load_rig(const std::filesystem::path& file) {
  return rig_from_json(load_json(file), file.filename().string());
}

void save_rig(const std::vector<CameraModel>& rig, const std::filesystem::path& file) {
  save_json(rig_to_json(rig), file);
}

TrackingMode tracking_mode_from_string(const std::string& s) {
  if (s == "all_unknowns") return TrackingMode::AllUnknowns;
  if (s == "lumped") return TrackingMode::Lumped;
  if (s == "lumped_plus_joints") return TrackingMode::LumpedPlusJoints;
  throw ConfigError("unknown tracking mode '" + s + "'");
}

std::string to_string(TrackingMode mode) {
  switch (mode) {
    case TrackingMode::AllUnknowns:
      return "all_unknowns";
    case TrackingMode::Lumped:
      return "lumped";
    case TrackingMode::LumpedPlusJoints:
      return "lumped_plus_joints";
  }
  return "lumped";
}

CameraMode camera_mode_from_string(const std::string& s) {
  if (s == "stationary") return CameraMode::Stationary;
  if (s == "eye_in_hand") return CameraMode::EyeInHand;
  throw ConfigError("unknown camera mode '" + s + "'");
}

std::string to_string(CameraMode mode) {
  return mode == CameraMode::Stationary ? "stationary" : "eye_in_hand";
}

json filter_config_to_json(const FilterConfig& c) {
  Vec6 init = c.lump_init_cov;
  Vec6 step = c.lump_step_cov;
  VecX initx(6), stepx(6);
  initx << init;
  stepx << step;
  return {{"particles", c.particle_count},
          {"ess_threshold", c.ess_threshold},
          {"lump_init_cov", vecx_to_json(initx)},
          {"lump_step_cov", vecx_to_json(stepx)},
          {"joint_error_bound", vecx_to_json(c.joint_error_bound)},
          {"joint_error_step_cov", vecx_to_json(c.joint_error_step_cov)},
          {"cam_joint_error_bound", vecx_to_json(c.cam_joint_error_bound)},
          {"cam_joint_error_step_cov", vecx_to_json(c.cam_joint_error_step_cov)},
          {"gamma_m", c.gamma_m},
          {"gamma_rho", c.gamma_rho},
          {"gamma_phi", c.gamma_phi},
          {"max_point_cost", c.max_point_cost},
          {"max_edge_cost", c.max_edge_cost},
          {"mode", to_string(c.mode)},
          {"observation",
           c.observation == ObservationVariant::ClippedGaussian ? "clipped_gaussian"
                                                                : "confidence_weighted"},
          {"prediction",
           c.prediction == PredictionWeighting::ProposalDensity ? "proposal_density"
                                                                : "standard_sir"},
          {"resample_trigger",
           c.resample_trigger == ResampleTrigger::BelowThreshold ? "below_threshold"
                                                                 : "paper_literal"},
          {"anneal_steps", c.anneal_steps},
          {"anneal_scale", c.anneal_scale}};
}

FilterConfig filter_config_from_json(const json& j, const std::string& context) {
  require_keys(j,
               {"particles", "ess_threshold", "lump_init_cov", "lump_step_cov",
                "joint_error_bound", "joint_error_step_cov", "cam_joint_error_bound",
                "cam_joint_error_step_cov", "gamma_m", "gamma_rho", "gamma_phi", "max_point_cost",
                "max_edge_cost", "mode", "observation", "prediction", "resample_trigger",
                "anneal_steps", "anneal_scale"},
               context);
  FilterConfig c;
  c.particle_count = require(j, "particles", context).get<int>();
  c.ess_threshold = number(require(j, "ess_threshold", context), context + ".ess_threshold");
  const VecX init = vecx_from_json(require(j, "lump_init_cov", context), context, 6);
  const VecX step = vecx_from_json(require(j, "lump_step_cov", context), context, 6);
  c.lump_init_cov = init.head<6>();
  c.lump_step_cov = step.head<6>();
  c.joint_error_bound = vecx_from_json(require(j, "joint_error_bound", context), context);
  c.joint_error_step_cov = vecx_from_json(require(j, "joint_error_step_cov", context), context);
  if (j.contains("cam_joint_error_bound")) {
    c.cam_joint_error_bound = vecx_from_json(j["cam_joint_error_bound"], context);
  }
  if (j.contains("cam_joint_error_step_cov")) {
    c.cam_joint_error_step_cov = vecx_from_json(j["cam_joint_error_step_cov"], context);
  }
  c.gamma_m = number(require(j, "gamma_m", context), context + ".gamma_m");
  c.gamma_rho = number(require(j, "gamma_rho", context), context + ".gamma_rho");
  c.gamma_phi = number(require(j, "gamma_phi", context), context + ".gamma_phi");
  c.max_point_cost = number(require(j, "max_point_cost", context), context + ".max_point_cost");
  c.max_edge_cost = number(require(j, "max_edge_cost", context), context + ".max_edge_cost");
  c.mode = tracking_mode_from_string(require(j, "mode", context).get<std::string>());
  const std::string obs = require(j, "observation", context).get<std::string>();
  if (obs == "clipped_gaussian") {
    c.observation = ObservationVariant::ClippedGaussian;
  } else if (obs == "confidence_weighted") {
    c.observation = ObservationVariant::ConfidenceWeighted;
  } else {
    throw ConfigError(context + ": unknown observation variant '" + obs + "'");
  }
  const std::string pred = require(j, "prediction", context).get<std::string>();
  if (pred == "proposal_density") {
    c.prediction = PredictionWeighting::ProposalDensity;
  } else if (pred == "standard_sir") {
    c.prediction = PredictionWeighting::StandardSir;
  } else {
    throw ConfigError(context + ": unknown prediction weighting '" + pred + "'");
  }
  const std::string trig = require(j, "resample_trigger", context).get<std::string>();
  if (trig == "below_threshold") {
    c.resample_trigger = ResampleTrigger::BelowThreshold;
  } else if (trig == "paper_literal") {
    c.resample_trigger = ResampleTrigger::PaperLiteral;
  } else {
    throw ConfigError(context + ": unknown resample trigger '" + trig + "'");
  }
  if (j.contains("anneal_steps")) c.anneal_steps = j["anneal_steps"].get<int>();
  if (j.contains("anneal_scale")) c.anneal_scale = number(j["anneal_scale"], context);
  c.validate();
  return c;
}

FilterConfig load_filter_config(const std::filesystem::path& file) {
  return filter_config_from_json(load_json(file), file.filename().string());
}

void save_filter_config(const FilterConfig& config, const std::filesystem::path& file) {
  save_json(filter_config_to_json(config), file);
}

namespace {

NoiseModel noise_from_json(const json& j, const std::string& context) {
  require_keys(j,
               {"calib_cov", "joint_bias_bound", "cable_stretch", "cam_joint_bias_bound",
                "cam_joint_sigma", "detection"},
               context);
  NoiseModel n;
  if (j.contains("calib_cov")) {
    n.calib_cov = vecx_from_json(j["calib_cov"], context + ".calib_cov", 6).head<6>();
  }
  if (j.contains("joint_bias_bound")) {
    n.joint_bias_bound = vecx_from_json(j["joint_bias_bound"], context);
  }
  if (j.contains("cable_stretch")) n.cable_stretch = vecx_from_json(j["cable_stretch"], context);
  if (j.contains("cam_joint_bias_bound")) {
    n.cam_joint_bias_bound = vecx_from_json(j["cam_joint_bias_bound"], context);
  }
  if (j.contains("cam_joint_sigma")) {
    n.cam_joint_sigma = vecx_from_json(j["cam_joint_sigma"], context);
  }
  if (j.contains("detection")) {
    const json& d = j["detection"];
    const std::string dc = context + ".detection";
    require_keys(d,
                 {"pixel_sigma", "rho_sigma", "phi_sigma", "dropout", "false_positive_rate",
                  "confidence_features", "beta_a", "beta_b"},
                 dc);
    if (d.contains("pixel_sigma")) n.detection.pixel_sigma = number(d["pixel_sigma"], dc);
    if (d.contains("rho_sigma")) n.detection.rho_sigma = number(d["rho_sigma"], dc);
    if (d.contains("phi_sigma")) n.detection.phi_sigma = number(d["phi_sigma"], dc);
    if (d.contains("dropout")) n.detection.dropout = number(d["dropout"], dc);
    if (d.contains("false_positive_rate")) {
      n.detection.false_positive_rate = number(d["false_positive_rate"], dc);
    }
    if (d.contains("confidence_features")) {
      n.detection.confidence_features = d["confidence_features"].get<bool>();
    }
    if (d.contains("beta_a")) n.detection.beta_a = d["beta_a"].get<int>();
    if (d.contains("beta_b")) n.detection.beta_b = d["beta_b"].get<int>();
  }
  return n;
}

json noise_to_json(const NoiseModel& n) {
  VecX calib(6);
  calib << n.calib_cov;
  return {{"calib_cov", vecx_to_json(calib)},
          {"joint_bias_bound", vecx_to_json(n.joint_bias_bound)},
          {"cable_stretch", vecx_to_json(n.cable_stretch)},
          {"cam_joint_bias_bound", vecx_to_json(n.cam_joint_bias_bound)},
          {"cam_joint_sigma", vecx_to_json(n.cam_joint_sigma)},
          {"detection",
           {{"pixel_sigma", n.detection.pixel_sigma},
            {"rho_sigma", n.detection.rho_sigma},
            {"phi_sigma", n.detection.phi_sigma},
            {"dropout", n.detection.dropout},
            {"false_positive_rate", n.detection.false_positive_rate},
            {"confidence_features", n.detection.confidence_features},
            {"beta_a", n.detection.beta_a},
            {"beta_b", n.detection.beta_b}}}};
}

TrajectorySpec trajectory_from_json(const json& j, const std::string& context) {
  require_keys(j, {"steps", "tool_cycles", "cam_cycles", "walk_max_angle", "walk_joints"},
               context);
  TrajectorySpec t;
  t.steps = require(j, "steps", context).get<int>();
  for (const auto& c : require(j, "tool_cycles", context)) {
    t.tool_cycles.push_back(cycle_from_json(c, context + ".tool_cycles"));
  }
  if (j.contains("cam_cycles")) {
    for (const auto& c : j["cam_cycles"]) {
      t.cam_cycles.push_back(cycle_from_json(c, context + ".cam_cycles"));
    }
  }
  if (j.contains("walk_max_angle")) {
    t.walk_max_angle = number(j["walk_max_angle"], context + ".walk_max_angle");
  }
  if (j.contains("walk_joints")) {
    for (const auto& idx : j["walk_joints"]) t.walk_joints.push_back(idx.get<int>());
  }
  return t;
}

json trajectory_to_json(const TrajectorySpec& t) {
  json tool = json::array();
  for (const auto& c : t.tool_cycles) tool.push_back(cycle_to_json(c));
  json cam = json::array();
  for (const auto& c : t.cam_cycles) cam.push_back(cycle_to_json(c));
  json walk = json::array();
  for (int idx : t.walk_joints) walk.push_back(idx);
  return {{"steps", t.steps},
          {"tool_cycles", tool},
          {"cam_cycles", cam},
          {"walk_max_angle", t.walk_max_angle},
          {"walk_joints", walk}};
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& file) {
  const json j = load_json(file);
  const std::string context = file.filename().string();
  require_keys(j,
               {"chain", "rig", "camera_mode", "base_to_camera", "camera_chain", "base_to_base",
                "noise", "trajectory", "seed"},
               context);
  const auto dir = file.parent_path();
  Scenario s;
  s.chain = load_chain(dir / require(j, "chain", context).get<std::string>());
  s.rig = load_rig(dir / require(j, "rig", context).get<std::string>());
  s.camera_mode =
      camera_mode_from_string(require(j, "camera_mode", context).get<std::string>());
  if (s.camera_mode == CameraMode::Stationary) {
    s.base_to_camera =
        transform_from_json(require(j, "base_to_camera", context), context + ".base_to_camera");
  } else {
    s.camera_chain = load_chain(dir / require(j, "camera_chain", context).get<std::string>());
    s.base_to_base =
        transform_from_json(require(j, "base_to_base", context), context + ".base_to_base");
  }
  s.noise = noise_from_json(require(j, "noise", context), context + ".noise");
  s.trajectory = trajectory_from_json(require(j, "trajectory", context), context + ".trajectory");
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  s.validate();
  return s;
}

std::filesystem::path save_scenario_bundle(const Scenario& scenario,
                                           const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  save_chain(scenario.chain, directory / "chain.json");
  save_rig(scenario.rig, directory / "rig.json");
  json j{{"chain", "chain.json"},
         {"rig", "rig.json"},
         {"camera_mode", to_string(scenario.camera_mode)},
         {"noise", noise_to_json(scenario.noise)},
         {"trajectory", trajectory_to_json(scenario.trajectory)},
         {"seed", scenario.seed}};
  if (scenario.camera_mode == CameraMode::Stationary) {
    j["base_to_camera"] = transform_to_json(scenario.base_to_camera);
  } else {
    save_chain(scenario.camera_chain, directory / "camera_chain.json");
    j["camera_chain"] = "camera_chain.json";
    j["base_to_base"] = transform_to_json(scenario.base_to_base);
  }
  const auto file = directory / "scenario.json";
  save_json(j, file);
  return file;
}

}  // namespace lumptrack

#include "lumptrack/simulator.hpp"

#include <cmath>
#include <string>

#include "lumptrack/errors.hpp"
#include "lumptrack/lump.hpp"

namespace lumptrack {

namespace {

constexpr std::uint64_t kSimulatorTag = 0x51;

void check_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(std::string("scenario: ") + name + " must be in [0, 1]");
  }
}

EdgeFeature canonical_edge(double rho, double phi) {
  phi = std::fmod(phi, M_PI);
  if (phi < 0.0) {
    phi += M_PI;
    rho = -rho;
  }
  return {rho, phi};
}

}  // namespace

void Scenario::validate() const {
  chain.validate();
  const int n_j = chain.joint_count();
  if (rig.empty()) throw ConfigError("scenario: rig has no cameras");
  if (trajectory.steps < 1) throw ConfigError("scenario: step count must be >= 1");
  if (static_cast<int>(trajectory.tool_cycles.size()) != n_j) {
    throw ConfigError("scenario: expected one tool joint cycle per joint");
  }
  if (noise.joint_bias_bound.size() != 0 && noise.joint_bias_bound.size() != n_j) {
    throw ConfigError("scenario: joint_bias_bound length mismatch");
  }
  if (noise.cable_stretch.size() != 0 && noise.cable_stretch.size() != n_j) {
    throw ConfigError("scenario: cable_stretch length mismatch");
  }
  check_rate(noise.detection.dropout, "dropout");
  if (noise.detection.pixel_sigma < 0 || noise.detection.rho_sigma < 0 ||
      noise.detection.phi_sigma < 0 || noise.detection.false_positive_rate < 0) {
    throw ConfigError("scenario: detection noise values must be non-negative");
  }
  for (int idx : trajectory.walk_joints) {
    if (idx < 0 || idx >= n_j) throw ConfigError("scenario: walk joint index out of range");
  }
  if (trajectory.walk_joints.size() > 3) {
    throw ConfigError("scenario: the orientation walk maps to at most 3 joints");
  }
  if (camera_mode == CameraMode::EyeInHand) {
    camera_chain.validate();
    const int n_c = camera_chain.joint_count();
    if (n_c == 0) throw ConfigError("scenario: eye-in-hand needs a camera chain");
    if (camera_chain.n_b != n_c) {
      throw ConfigError(
          "scenario: every camera-arm link is out of view; camera_chain.n_b must equal its "
          "joint count");
    }
    if (static_cast<int>(trajectory.cam_cycles.size()) != n_c) {
      throw ConfigError("scenario: expected one camera joint cycle per camera joint");
    }
    if (noise.cam_joint_bias_bound.size() != 0 && noise.cam_joint_bias_bound.size() != n_c) {
      throw ConfigError("scenario: cam_joint_bias_bound length mismatch");
    }
    if (noise.cam_joint_sigma.size() != 0 && noise.cam_joint_sigma.size() != n_c) {
      throw ConfigError("scenario: cam_joint_sigma length mismatch");
    }
  }
}

RigidTransform sample_calibration_error(const Vec6& cov, RandomStream& rng) {
  AxisAnglePose pose;
  for (int i = 0; i < 3; ++i) {
    pose.w[i] = std::sqrt(cov[i]) * rng.gaussian();
  }
  for (int i = 0; i < 3; ++i) {
    pose.b[i] = std::sqrt(cov[3 + i]) * rng.gaussian();
  }
  return RigidTransform::from_pose(pose);
}

VecX tool_joint_errors(const NoiseModel& noise, const VecX& bias, const VecX& q_true) {
  VecX e = VecX::Zero(q_true.size());
  for (int i = 0; i < q_true.size(); ++i) {
    const double b = i < bias.size() ? bias[i] : 0.0;
    const double c = i < noise.cable_stretch.size() ? noise.cable_stretch[i] : 0.0;
    e[i] = b + c * q_true[i];
  }
  return e;
}

VecX camera_joint_errors(const NoiseModel& noise, const VecX& bias, RandomStream& rng) {
  VecX e = VecX::Zero(bias.size());
  for (int i = 0; i < bias.size(); ++i) {
    const double sigma = i < noise.cam_joint_sigma.size() ? noise.cam_joint_sigma[i] : 0.0;
    e[i] = bias[i] + sigma * rng.gaussian();
  }
  return e;
}

Quaternion random_walk_orientation(const Quaternion& current, double max_angle,
                                   RandomStream& rng) {
  if (max_angle <= 0.0) return current;
  const double polar = std::acos(rng.uniform(-1.0, 1.0));
  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  const double angle = rng.uniform(0.0, max_angle);
  const Vec3 axis(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                  std::cos(polar));
  return (current * Quaternion::from_axis_angle(angle * axis)).normalized();
}

std::vector<CameraObservations> synthesize_features(const KinematicChain& chain,
                                                    const std::vector<CameraModel>& rig,
                                                    const std::vector<RigidTransform>& true_poses,
                                                    const DetectionNoise& noise,
                                                    RandomStream& rng) {
  std::vector<CameraObservations> batches(rig.size());
  for (std::size_t c = 0; c < rig.size(); ++c) {
    const CameraModel& camera = rig[c];
    CameraObservations& batch = batches[c];
    const auto projected = project_chain_features(chain, camera, true_poses);
    for (std::size_t k = 0; k < projected.points.size(); ++k) {
      if (!projected.points[k]) continue;
      if (noise.dropout > 0.0 && rng.uniform() < noise.dropout) continue;
      PointFeature f = *projected.points[k];
      f.uv.x() += noise.pixel_sigma * rng.gaussian();
      f.uv.y() += noise.pixel_sigma * rng.gaussian();
      if (!inside_image(camera, f.uv)) continue;
      if (noise.confidence_features) {
        f.confidence = rng.beta_integer(noise.beta_a, noise.beta_b);
        batch.point_labels.push_back(static_cast<int>(k));
      }
      batch.points.push_back(f);
    }
    for (const auto& cyl : projected.edge_list()) {
      if (!cyl) continue;
      if (noise.dropout > 0.0 && rng.uniform() < noise.dropout) continue;
      EdgeFeature e = canonical_edge(cyl->rho + noise.rho_sigma * rng.gaussian(),
                                     cyl->phi + noise.phi_sigma * rng.gaussian());
      if (!edge_intersects_image(camera, e)) continue;
      batch.edges.push_back(e);
    }
    if (!noise.confidence_features && noise.false_positive_rate > 0.0) {
      const int spurious_points = rng.poisson(noise.false_positive_rate);
      for (int i = 0; i < spurious_points; ++i) {
        PointFeature f;
        f.uv = Vec2(rng.uniform(0.0, camera.width - 1.0), rng.uniform(0.0, camera.height - 1.0));
        batch.points.push_back(f);
      }
      const int spurious_edges = rng.poisson(noise.false_positive_rate);
      for (int i = 0; i < spurious_edges; ++i) {
        const double u = rng.uniform(0.0, camera.width - 1.0);
        const double v = rng.uniform(0.0, camera.height - 1.0);
        const double phi = rng.uniform(0.0, M_PI);
        batch.edges.push_back({u * std::cos(phi) + v * std::sin(phi), phi});
      }
    }
  }
  return batches;
}

SceneSimulator::SceneSimulator(Scenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), rng_(RandomStream::derive(seed, kSimulatorTag)) {
  scenario_.validate();
  const int n_j = scenario_.chain.joint_count();
  if (scenario_.noise.joint_bias_bound.size() == 0) {
    scenario_.noise.joint_bias_bound = VecX::Zero(n_j);
  }
  if (scenario_.noise.cable_stretch.size() == 0) {
    scenario_.noise.cable_stretch = VecX::Zero(n_j);
  }
  // Per-trial draws, in order: calibration error, tool biases, camera biases.
  calibration_error_ = sample_calibration_error(scenario_.noise.calib_cov, rng_);
  const RigidTransform true_base = scenario_.camera_mode == CameraMode::Stationary
                                       ? scenario_.base_to_camera
                                       : scenario_.base_to_base;
  calibrated_base_ = true_base * calibration_error_.inverse();
  tool_bias_ = VecX::Zero(n_j);
  for (int i = 0; i < n_j; ++i) {
    const double a = scenario_.noise.joint_bias_bound[i];
    tool_bias_[i] = rng_.uniform(-a, a);
  }
  if (scenario_.camera_mode == CameraMode::EyeInHand) {
    const int n_c = scenario_.camera_chain.joint_count();
    if (scenario_.noise.cam_joint_bias_bound.size() == 0) {
      scenario_.noise.cam_joint_bias_bound = VecX::Zero(n_c);
    }
    if (scenario_.noise.cam_joint_sigma.size() == 0) {
      scenario_.noise.cam_joint_sigma = VecX::Zero(n_c);
    }
    cam_bias_ = VecX::Zero(n_c);
    for (int i = 0; i < n_c; ++i) {
      const double a = scenario_.noise.cam_joint_bias_bound[i];
      cam_bias_[i] = rng_.uniform(-a, a);
    }
  }
  last_q_meas_ = VecX::Zero(n_j);
  for (int i = 0; i < n_j; ++i) {
    last_q_meas_[i] = scenario_.trajectory.tool_cycles[i].center;
  }
}

VecX SceneSimulator::trajectory_joints(int t) {
  const auto& cycles = scenario_.trajectory.tool_cycles;
  VecX q(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    q[i] = c.center + c.amplitude * std::sin(2.0 * M_PI * t / c.period + c.phase);
    if (c.jitter_sigma > 0.0) q[i] += c.jitter_sigma * rng_.gaussian();
  }
  if (scenario_.trajectory.walk_max_angle > 0.0 && !scenario_.trajectory.walk_joints.empty()) {
    walk_state_ = random_walk_orientation(walk_state_, scenario_.trajectory.walk_max_angle, rng_);
    const Vec3 offsets = walk_state_.to_axis_angle();
    for (std::size_t k = 0; k < scenario_.trajectory.walk_joints.size(); ++k) {
      q[scenario_.trajectory.walk_joints[k]] += offsets[static_cast<int>(k)];
    }
  }
  return q;
}

TruthRow SceneSimulator::step() {
  const VecX q_true = trajectory_joints(t_);
  VecX q_cam_true;
  if (scenario_.camera_mode == CameraMode::EyeInHand) {
    const auto& cycles = scenario_.trajectory.cam_cycles;
    q_cam_true.resize(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      const auto& c = cycles[i];
      q_cam_true[i] = c.center + c.amplitude * std::sin(2.0 * M_PI * t_ / c.period + c.phase);
      if (c.jitter_sigma > 0.0) q_cam_true[i] += c.jitter_sigma * rng_.gaussian();
    }
  }
  return emit(t_++, q_true, q_cam_true);
}

TruthRow SceneSimulator::step_commanded(const VecX& q_meas_command) {
  const int n_j = scenario_.chain.joint_count();
  if (q_meas_command.size() != n_j) {
    throw InvalidInputError("step_commanded: joint vector size mismatch");
  }
  // The joint regulators settle where the measured reading equals the
  // command: q = cmd + bias + stretch * q.
  VecX q_true(n_j);
  for (int i = 0; i < n_j; ++i) {
    const double stretch = scenario_.noise.cable_stretch[i];
    if (std::abs(1.0 - stretch) < 1e-9) {
      throw ConfigError("step_commanded: cable stretch coefficient of 1 is singular");
    }
    q_true[i] = (q_meas_command[i] + tool_bias_[i]) / (1.0 - stretch);
  }
  VecX q_cam_true;
  if (scenario_.camera_mode == CameraMode::EyeInHand) {
    const auto& cycles = scenario_.trajectory.cam_cycles;
    q_cam_true.resize(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      const auto& c = cycles[i];
      q_cam_true[i] = c.center + c.amplitude * std::sin(2.0 * M_PI * t_ / c.period + c.phase);
      if (c.jitter_sigma > 0.0) q_cam_true[i] += c.jitter_sigma * rng_.gaussian();
    }
  }
  return emit(t_++, q_true, q_cam_true);
}

TruthRow SceneSimulator::emit(int t, const VecX& q_true, const VecX& q_cam_true) {
  TruthRow row;
  row.t = t;
  row.q_true = q_true;
  const VecX e = tool_joint_errors(scenario_.noise, tool_bias_, q_true);
  row.q_meas = q_true - e;
  RigidTransform true_base;
  if (scenario_.camera_mode == CameraMode::Stationary) {
    true_base = scenario_.base_to_camera;
  } else {
    VecX e_cam = camera_joint_errors(scenario_.noise, cam_bias_, rng_);
    row.q_cam_true = q_cam_true;
    row.q_cam_meas = q_cam_true - e_cam;
    true_base = forward_kinematics_to_end(scenario_.camera_chain, q_cam_true).inverse() *
                scenario_.base_to_base;
    const VecX beta_cam = VecX::Zero(scenario_.camera_chain.joint_count());
    const RigidTransform camera_lump =
        analytical_lump(scenario_.camera_chain, row.q_cam_meas, e_cam, beta_cam);
    const VecX beta = VecX::Zero(scenario_.chain.n_b);
    const RigidTransform tool_lump =
        calibration_error_ * analytical_lump(scenario_.chain, row.q_meas, e, beta);
    row.true_lump =
        eye_in_hand_lump(calibrated_base_, camera_lump.to_pose(), tool_lump.to_pose());
  }
  if (scenario_.camera_mode == CameraMode::Stationary) {
    const VecX beta = VecX::Zero(scenario_.chain.n_b);
    const RigidTransform lump =
        calibration_error_ * analytical_lump(scenario_.chain, row.q_meas, e, beta);
    row.true_lump = lump.to_pose();
  }
  const auto poses = link_poses(scenario_.chain, true_base, q_true);
  row.true_end_pose = poses.back() * scenario_.chain.end_transform;
  row.batches =
      synthesize_features(scenario_.chain, scenario_.rig, poses, scenario_.noise.detection, rng_);
  last_q_meas_ = row.q_meas;
  return row;
}

}  // namespace lumptrack

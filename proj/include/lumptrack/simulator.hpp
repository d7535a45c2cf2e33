#pragma once

#include <cstdint>
#include <vector>

#include "lumptrack/camera.hpp"
#include "lumptrack/filter.hpp"
#include "lumptrack/kinematics.hpp"
#include "lumptrack/random.hpp"

namespace lumptrack {

/// Synthetic detector imperfections standing in for the real feature
/// detectors. Rates per camera per step.
struct DetectionNoise {
  double pixel_sigma = 0.5;        // px, on each point coordinate
  double rho_sigma = 0.5;          // px, on edge offsets
  double phi_sigma = 0.002;        // rad, on edge angles
  double dropout = 0.05;           // per-detection drop probability
  double false_positive_rate = 1.0;  // Poisson mean of spurious detections
  /// Emit pre-associated detections with Beta(beta_a, beta_b) confidences
  /// instead of anonymous ones (the learned-feature style).
  bool confidence_features = false;
  int beta_a = 8;
  int beta_b = 2;
};

struct NoiseModel {
  /// Diagonal covariance of the calibration error, axis-angle then
  /// translation.
  Vec6 calib_cov = Vec6::Zero();
  VecX joint_bias_bound;   // per tool joint, bias ~ U(-a, a) once per trial
  VecX cable_stretch;      // per tool joint, linear coefficient on the true q
  VecX cam_joint_bias_bound;  // per camera-arm joint
  VecX cam_joint_sigma;       // per camera-arm joint, fresh N(0, sigma^2) each step
  DetectionNoise detection;
};

/// Joint-space sinusoid q(t) = center + amplitude * sin(2 pi t / period +
/// phase) plus per-step Gaussian jitter.
struct JointCycle {
  double center = 0.0;
  double amplitude = 0.0;
  double period = 140.0;
  double phase = 0.0;
  double jitter_sigma = 0.0;
};

struct TrajectorySpec {
  int steps = 140;
  std::vector<JointCycle> tool_cycles;  // one per tool joint
  std::vector<JointCycle> cam_cycles;   // one per camera-arm joint (eye-in-hand)
  /// Quaternion random walk whose axis-angle is added to these tool joints
  /// (0-based indices); each step's rotation angle is U(0, walk_max_angle).
  double walk_max_angle = 0.0;
  std::vector<int> walk_joints;
};

struct Scenario {
  KinematicChain chain;
  std::vector<CameraModel> rig;
  CameraMode camera_mode = CameraMode::Stationary;
  /// True base-to-camera transform T^c_b (stationary).
  RigidTransform base_to_camera{};
  /// Eye-in-hand: camera arm (end_transform = joint-to-camera mount) and the
  /// true tool-base-to-camera-base transform.
  KinematicChain camera_chain;
  RigidTransform base_to_base{};
  NoiseModel noise;
  TrajectorySpec trajectory;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Ground truth for one step plus the emitted feature batches.
struct TruthRow {
  int t = 0;
  VecX q_true;
  VecX q_meas;
  VecX q_cam_true;
  VecX q_cam_meas;
  /// Analytical lump of the injected errors (beta = 0); the quantity the
  /// filter's lump estimate is compared against.
  AxisAnglePose true_lump;
  /// True end-frame pose in the camera reference frame.
  RigidTransform true_end_pose;
  std::vector<CameraObservations> batches;
};

/// Calibration error transform with (w, b) ~ N(0, diag(cov)).
RigidTransform sample_calibration_error(const Vec6& cov, RandomStream& rng);

/// Tool-joint measurement errors: per-trial bias plus linear cable stretch
/// on the true joint value.
VecX tool_joint_errors(const NoiseModel& noise, const VecX& bias, const VecX& q_true);

/// Camera-arm measurement errors: per-trial bias plus a fresh Gaussian draw
/// per step.
VecX camera_joint_errors(const NoiseModel& noise, const VecX& bias, RandomStream& rng);

/// One bounded random-walk step: rotates `current` by a quaternion whose
/// axis is uniform on the sphere and whose angle is U(0, max_angle).
Quaternion random_walk_orientation(const Quaternion& current, double max_angle, RandomStream& rng);

/// Projects the chain's landmarks and cylinders through the rig and applies
/// pixel noise, dropouts and false positives. Emitted batches never contain
/// behind-camera or out-of-frame true detections.
std::vector<CameraObservations> synthesize_features(const KinematicChain& chain,
                                                    const std::vector<CameraModel>& rig,
                                                    const std::vector<RigidTransform>& true_poses,
                                                    const DetectionNoise& noise,
                                                    RandomStream& rng);

/// Drives one trial: trajectory stepping, the paper's joint/calibration noise
/// processes, and feature synthesis. Per-trial draws (calibration error,
/// joint biases) happen at construction.
class SceneSimulator {
 public:
  SceneSimulator(Scenario scenario, std::uint64_t seed);

  /// Calibration handed to the filter: T^c_{b-} (stationary) or the
  /// calibrated base-to-base transform (eye-in-hand).
  const RigidTransform& calibrated_base() const { return calibrated_base_; }
  /// Injected calibration error T^{b-}_b.
  const RigidTransform& calibration_error() const { return calibration_error_; }
  const Scenario& scenario() const { return scenario_; }
  int steps() const { return scenario_.trajectory.steps; }

  /// Advance along the preset trajectory.
  TruthRow step();
  /// Servo interface: realize a commanded measured-joint vector through the
  /// same noisy joint processes instead of the trajectory.
  TruthRow step_commanded(const VecX& q_meas_command);
  /// Measured joints that the trajectory produced last step (servo loops
  /// start from here).
  const VecX& last_q_meas() const { return last_q_meas_; }

 private:
  TruthRow emit(int t, const VecX& q_true, const VecX& q_cam_true);
  VecX trajectory_joints(int t);

  Scenario scenario_;
  RandomStream rng_;
  RigidTransform calibration_error_;
  RigidTransform calibrated_base_;
  VecX tool_bias_;
  VecX cam_bias_;
  Quaternion walk_state_;
  VecX last_q_meas_;
  int t_ = 0;
};

}  // namespace lumptrack

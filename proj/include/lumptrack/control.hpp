#pragma once

#include <optional>
#include <vector>

#include "lumptrack/filter.hpp"
#include "lumptrack/simulator.hpp"

namespace lumptrack {

struct ControllerConfig {
  double max_step_mm = 3.0;
  double tolerance_mm = 0.5;
  int max_iterations = 200;

  void validate() const;  // throws ConfigError
};

struct Goal {
  Vec3 position = Vec3::Zero();  // camera frame, mm
  std::optional<Mat3> rotation;  // camera frame
};

/// Camera-frame goal pulled into the virtual base defined by the tracked
/// lump; returns the updated end-effector position after one clamped step
/// of length min(||d||, max_step).
Vec3 position_step(const Vec3& goal_camera, const Vec3& current_base,
                   const RigidTransform& calibrated_base, const RigidTransform& tracked_lump,
                   double max_step_mm);

/// End-effector orientation (base frame) that realizes the camera-frame goal
/// under the tracked lump.
Mat3 orientation_target(const Mat3& goal_rotation_camera, const Mat3& calibrated_base_rotation,
                        const Mat3& tracked_lump_rotation);

struct ServoIteration {
  int iteration = 0;
  double believed_error_mm = 0.0;  // ||d|| under the tracked lump
  double true_error_mm = 0.0;      // against simulator ground truth
};

struct ServoResult {
  bool converged = false;
  int iterations = 0;
  double believed_error_mm = 0.0;
  double true_position_error_mm = 0.0;
  double true_rotation_error_rad = 0.0;
  std::vector<ServoIteration> log;
};

struct ServoOptions {
  /// When false the lump is pinned to identity (tracking disabled).
  bool use_tracking = true;
  /// Filter updates run before the first command so the lump settles.
  int warmup_steps = 20;
};

/// Closed position/orientation regulation loop: each iteration updates the
/// tracker from synthesized features, steps the goal through the virtual
/// base, and realizes the commanded end pose through the simulator's noisy
/// measured-joint interface (damped-least-squares IK). Non-convergence is a
/// result, not an exception.
ServoResult servo_loop(SceneSimulator& simulator, ParticleTracker& tracker,
                       const ControllerConfig& controller, const Goal& goal,
                       const ServoOptions& options = {});

}  // namespace lumptrack

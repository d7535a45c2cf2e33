#include "lumptrack/control.hpp"

#include <cmath>

#include "lumptrack/errors.hpp"

namespace lumptrack {

namespace {

Vec3 clamped_step(const Vec3& current, const Vec3& direction, double max_step_mm) {
  const double distance = direction.norm();
  if (distance <= max_step_mm || distance == 0.0) {
    return current + direction;
  }
  return current + (max_step_mm / distance) * direction;
}

}  // namespace

void ControllerConfig::validate() const {
  if (max_step_mm <= 0.0) throw ConfigError("controller: max step must be positive");
  if (tolerance_mm <= 0.0) throw ConfigError("controller: tolerance must be positive");
  if (max_iterations < 0) throw ConfigError("controller: max iterations must be >= 0");
}

Vec3 position_step(const Vec3& goal_camera, const Vec3& current_base,
                   const RigidTransform& calibrated_base, const RigidTransform& tracked_lump,
                   double max_step_mm) {
  const Vec3 d = (calibrated_base * tracked_lump).inverse() * goal_camera - current_base;
  return clamped_step(current_base, d, max_step_mm);
}

Mat3 orientation_target(const Mat3& goal_rotation_camera, const Mat3& calibrated_base_rotation,
                        const Mat3& tracked_lump_rotation) {
  return (calibrated_base_rotation * tracked_lump_rotation).transpose() * goal_rotation_camera;
}

ServoResult servo_loop(SceneSimulator& simulator, ParticleTracker& tracker,
                       const ControllerConfig& controller, const Goal& goal,
                       const ServoOptions& options) {
  controller.validate();
  ServoResult result;
  VecX q_command = simulator.last_q_meas();

  const auto run_step = [&](const VecX& command) {
    TruthRow row = simulator.step_commanded(command);
    StepInput input;
    input.t = row.t;
    input.q_meas = row.q_meas;
    input.q_cam_meas = row.q_cam_meas;
    input.cameras = row.batches;
    Estimate est = tracker.update(input);
    return std::make_pair(row, est);
  };

  for (int i = 0; i < options.warmup_steps; ++i) {
    run_step(q_command);
  }

  for (int iter = 0; iter <= controller.max_iterations; ++iter) {
    auto [row, est] = run_step(q_command);
    if (!options.use_tracking) {
      est.lump = AxisAnglePose{};
      est.joint_errors.setZero();
      est.cam_joint_errors.setZero();
    }
    const RigidTransform virtual_base =
        tracker.model_base_pose(est.lump, est.cam_joint_errors, row.q_cam_meas);
    const RigidTransform measured_end =
        forward_kinematics_to_end(tracker.setup().chain, row.q_meas);
    const Vec3 d = virtual_base.inverse() * goal.position - measured_end.translation;

    result.believed_error_mm = d.norm();
    result.true_position_error_mm = (goal.position - row.true_end_pose.translation).norm();
    if (goal.rotation) {
      result.true_rotation_error_rad =
          rotation_log(*goal.rotation * row.true_end_pose.rotation.transpose()).norm();
    }
    result.log.push_back({iter, result.believed_error_mm, result.true_position_error_mm});
    result.iterations = iter;
    if (result.believed_error_mm < controller.tolerance_mm) {
      result.converged = true;
      return result;
    }
    if (iter == controller.max_iterations) break;

    RigidTransform target = measured_end;
    target.translation = clamped_step(measured_end.translation, d, controller.max_step_mm);
    if (goal.rotation) {
      target.rotation = virtual_base.rotation.transpose() * (*goal.rotation);
    }
    q_command = ik_solve(tracker.setup().chain, row.q_meas, target, goal.rotation.has_value());
  }
  result.converged = false;
  return result;
}

}  // namespace lumptrack

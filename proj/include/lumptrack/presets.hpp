#pragma once

#include "lumptrack/experiment.hpp"
#include "lumptrack/filter.hpp"
#include "lumptrack/simulator.hpp"

namespace lumptrack {

/// Desk-scale surgical-arm preset: 6 DoF + gripper tool chain with n_b = 4,
/// 7 point landmarks near the gripper, the cylindrical insertion shaft, and
/// a 540x432 stereo rig (60 deg FOV, 5 mm baseline). Eye-in-hand swaps the
/// fixed rig mount for a 4 DoF camera arm moving on sinusoids.
Scenario davinci_scenario(CameraMode camera_mode);

/// Filter parameters used with the surgical-arm preset (eye-in-hand doubles
/// the lump process covariance and keeps the 10x initial scaling).
FilterConfig davinci_filter_config(TrackingMode mode, CameraMode camera_mode);

/// 7 DoF arm preset with n_b = 6, a mono camera and pre-associated
/// confidence-weighted point features (synthetic Beta(8,2) confidences).
Scenario baxter_scenario();

FilterConfig baxter_filter_config(TrackingMode mode);

/// Servo variants: same injected joint/calibration noise, clean detections,
/// and a tighter process covariance so the regulator can settle.
Scenario davinci_servo_scenario();
FilterConfig davinci_servo_filter_config();

/// Camera pose helper: base-to-camera transform of a camera at
/// `camera_position` looking at `target`, both in the chain base frame.
RigidTransform look_at_base_to_camera(const Vec3& camera_position, const Vec3& target,
                                      const Vec3& up_hint);

}  // namespace lumptrack

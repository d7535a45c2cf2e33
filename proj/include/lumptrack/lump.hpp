#pragma once

#include "lumptrack/geometry.hpp"
#include "lumptrack/kinematics.hpp"

namespace lumptrack {

/// Transform T^{n_b} that moves the (1 - beta_i) share of each of the first
/// n_b joint errors out of the chain:
///
///   prod_{i<=n_b} T(q_meas_i + e_i)
///     == analytical_lump(...) * prod_{i<=n_b} T(q_meas_i + beta_i * e_i)
///
/// built as the telescoping product of conjugated error factors. beta must
/// have n_b entries; q_meas and e have one entry per chain joint (entries
/// past n_b are ignored). beta = 0 lumps everything, beta = 1 nothing.
RigidTransform analytical_lump(const KinematicChain& chain, const VecX& q_meas, const VecX& e,
                               const VecX& beta);

/// Conjugates a left-side lump across the first n_b measured joint
/// transforms, so it can sit to their right instead.
RigidTransform right_hand_lump(const KinematicChain& chain, const VecX& q_meas,
                               const RigidTransform& left_lump);

/// Folds the camera-arm lump into the tool-side lump for the eye-in-hand
/// case, reducing the tracked unknowns to a single pose:
///
///   T(result) = calib^-1 * T(camera_lump)^-1 * calib * T(tool_lump)
///
/// where calib is the calibrated base-to-base transform.
AxisAnglePose eye_in_hand_lump(const RigidTransform& base_to_base_calib,
                               const AxisAnglePose& camera_lump, const AxisAnglePose& tool_lump);

}  // namespace lumptrack

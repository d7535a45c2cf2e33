#pragma once

#include <vector>

#include "lumptrack/geometry.hpp"

namespace lumptrack {

enum class JointKind { Revolute, Prismatic };

/// Modified Denavit-Hartenberg joint: T_x(alpha, a) * T_z(theta, d).
/// The joint variable enters theta (revolute) or d (prismatic); the other
/// coordinate stays at its offset. Angles rad, lengths mm.
struct MdhJoint {
  double alpha = 0.0;
  double a = 0.0;
  double theta_offset = 0.0;
  double d_offset = 0.0;
  JointKind kind = JointKind::Revolute;
};

/// Known landmark in a link frame; projected as a point feature.
struct ToolPoint {
  int link = 1;  // 1-based joint/link index
  Vec3 point = Vec3::Zero();
};

/// Cylinder anchored to a link: unit axis direction and a point on the axis,
/// both in the link frame. Projected as a pair of silhouette edges.
struct CylinderPrimitive {
  int link = 1;
  double radius = 1.0;  // mm
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
};

/// Serial chain with the visibility boundary n_b: links preceding joint n_b
/// are never seen by the camera, so their joint errors are lumped.
struct KinematicChain {
  std::vector<MdhJoint> joints;
  int n_b = 0;
  std::vector<ToolPoint> tool_points;
  std::vector<CylinderPrimitive> cylinders;
  /// Static transform appended after the last joint (tool tip or, for a
  /// camera arm, the mount from the final joint frame to the camera frame
  /// pointing frame->camera-parent, i.e. fk * end_transform is the pose of
  /// the end frame in the base).
  RigidTransform end_transform{};

  int joint_count() const { return static_cast<int>(joints.size()); }

  /// Throws ConfigError if n_b or any anchor index is out of range, or a
  /// cylinder axis is not unit length.
  void validate() const;
};

RigidTransform mdh_transform(const MdhJoint& joint, double q);

/// Left-fold product of the first `up_to` joint transforms; up_to = 0 gives
/// the identity. q must have one entry per joint of the chain.
RigidTransform forward_kinematics(const KinematicChain& chain, const VecX& q, int up_to);

/// Full chain including the static end transform.
RigidTransform forward_kinematics_to_end(const KinematicChain& chain, const VecX& q);

/// Conjugated error factor T_i(omega) with
/// mdh_transform(joint, q + omega) == joint_error_factor(joint, omega) * mdh_transform(joint, q).
RigidTransform joint_error_factor(const MdhJoint& joint, double omega);

/// Pose of every link frame under base_pose * prod_{i<=j} T(q_i);
/// result[j] for j in [0, n_j]. Shared by the simulator and the filter.
std::vector<RigidTransform> link_poses(const KinematicChain& chain, const RigidTransform& base_pose,
                                       const VecX& q);

/// Geometric Jacobian (6 x n_j; linear rows then angular rows) of the end
/// frame at configuration q, expressed in the chain base frame.
Eigen::MatrixXd chain_jacobian(const KinematicChain& chain, const VecX& q);

struct IkOptions {
  int max_iterations = 200;
  double damping = 1.0;
  double position_tolerance = 1e-6;  // mm
  double rotation_tolerance = 1e-8;  // rad
};

/// Damped-least-squares IK for the end frame; orientation is tracked only
/// when `target_rotation` is true. Returns the joint vector reached (best
/// effort; callers check the residual if they need a guarantee).
VecX ik_solve(const KinematicChain& chain, const VecX& q_init, const RigidTransform& target,
              bool target_rotation, const IkOptions& options = {});

}  // namespace lumptrack

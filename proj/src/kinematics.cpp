#include "lumptrack/kinematics.hpp"

#include <cmath>
#include <string>

#include "lumptrack/errors.hpp"

namespace lumptrack {

namespace {

RigidTransform t_x(double alpha, double a) {
  RigidTransform t;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  t.rotation << 1, 0, 0, 0, c, -s, 0, s, c;
  t.translation = Vec3(a, 0, 0);
  return t;
}

RigidTransform t_z(double theta, double d) {
  RigidTransform t;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  t.rotation << c, -s, 0, s, c, 0, 0, 0, 1;
  t.translation = Vec3(0, 0, d);
  return t;
}

}  // namespace

void KinematicChain::validate() const {
  const int n = joint_count();
  if (n_b < 0 || n_b > n) {
    throw ConfigError("chain: n_b = " + std::to_string(n_b) + " outside [0, " +
                      std::to_string(n) + "]");
  }
  for (const auto& tp : tool_points) {
    if (tp.link < 1 || tp.link > n) {
      throw ConfigError("chain: tool point anchored to link " + std::to_string(tp.link));
    }
  }
  for (const auto& cyl : cylinders) {
    if (cyl.link < 1 || cyl.link > n) {
      throw ConfigError("chain: cylinder anchored to link " + std::to_string(cyl.link));
    }
    if (std::abs(cyl.axis.norm() - 1.0) > 1e-12) {
      throw ConfigError("chain: cylinder axis is not unit length");
    }
    if (cyl.radius <= 0.0) {
      throw ConfigError("chain: cylinder radius must be positive");
    }
  }
}

RigidTransform mdh_transform(const MdhJoint& joint, double q) {
  if (!std::isfinite(q)) {
    throw InvalidInputError("mdh_transform: non-finite joint value");
  }
  const double theta = joint.kind == JointKind::Revolute ? joint.theta_offset + q : joint.theta_offset;
  const double d = joint.kind == JointKind::Prismatic ? joint.d_offset + q : joint.d_offset;
  return t_x(joint.alpha, joint.a) * t_z(theta, d);
}

RigidTransform forward_kinematics(const KinematicChain& chain, const VecX& q, int up_to) {
  const int n = chain.joint_count();
  if (q.size() != n) {
    throw InvalidInputError("forward_kinematics: joint vector has " + std::to_string(q.size()) +
                            " entries, chain has " + std::to_string(n));
  }
  if (up_to < 0 || up_to > n) {
    throw InvalidInputError("forward_kinematics: link index " + std::to_string(up_to) +
                            " outside [0, " + std::to_string(n) + "]");
  }
  RigidTransform t;
  for (int i = 0; i < up_to; ++i) {
    t = t * mdh_transform(chain.joints[i], q[i]);
  }
  return t;
}

RigidTransform forward_kinematics_to_end(const KinematicChain& chain, const VecX& q) {
  return forward_kinematics(chain, q, chain.joint_count()) * chain.end_transform;
}

RigidTransform joint_error_factor(const MdhJoint& joint, double omega) {
  if (!std::isfinite(omega)) {
    throw InvalidInputError("joint_error_factor: non-finite error value");
  }
  const RigidTransform tx = t_x(joint.alpha, joint.a);
  const RigidTransform inner =
      joint.kind == JointKind::Revolute ? t_z(omega, 0.0) : t_z(0.0, omega);
  return tx * inner * tx.inverse();
}

std::vector<RigidTransform> link_poses(const KinematicChain& chain, const RigidTransform& base_pose,
                                       const VecX& q) {
  const int n = chain.joint_count();
  if (q.size() != n) {
    throw InvalidInputError("link_poses: joint vector size mismatch");
  }
  std::vector<RigidTransform> poses(static_cast<std::size_t>(n) + 1);
  poses[0] = base_pose;
  for (int i = 0; i < n; ++i) {
    poses[i + 1] = poses[i] * mdh_transform(chain.joints[i], q[i]);
  }
  return poses;
}

Eigen::MatrixXd chain_jacobian(const KinematicChain& chain, const VecX& q) {
  const int n = chain.joint_count();
  const auto poses = link_poses(chain, RigidTransform::identity(), q);
  const Vec3 p_end = (poses[n] * chain.end_transform).translation;
  Eigen::MatrixXd jac(6, n);
  for (int i = 0; i < n; ++i) {
    // In the modified convention joint i acts about the z axis of frame i.
    const Vec3 axis = poses[i + 1].rotation.col(2);
    const Vec3 origin = poses[i + 1].translation;
    if (chain.joints[i].kind == JointKind::Revolute) {
      jac.block<3, 1>(0, i) = axis.cross(p_end - origin);
      jac.block<3, 1>(3, i) = axis;
    } else {
      jac.block<3, 1>(0, i) = axis;
      jac.block<3, 1>(3, i) = Vec3::Zero();
    }
  }
  return jac;
}

VecX ik_solve(const KinematicChain& chain, const VecX& q_init, const RigidTransform& target,
              bool target_rotation, const IkOptions& options) {
  VecX q = q_init;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const RigidTransform current = forward_kinematics_to_end(chain, q);
    const Vec3 dp = target.translation - current.translation;
    const Vec3 dw = target_rotation
                        ? rotation_log(target.rotation * current.rotation.transpose())
                        : Vec3::Zero();
    if (dp.norm() < options.position_tolerance &&
        (!target_rotation || dw.norm() < options.rotation_tolerance)) {
      break;
    }
    const Eigen::MatrixXd jac = chain_jacobian(chain, q);
    const int rows = target_rotation ? 6 : 3;
    const Eigen::MatrixXd j = jac.topRows(rows);
    Eigen::VectorXd err(rows);
    if (target_rotation) {
      err << dp, dw;
    } else {
      err = dp;
    }
    const Eigen::MatrixXd jjt = j * j.transpose() +
                                options.damping * options.damping *
                                    Eigen::MatrixXd::Identity(rows, rows);
    q += j.transpose() * jjt.ldlt().solve(err);
  }
  return q;
}

}  // namespace lumptrack

#pragma once

#include <Eigen/Dense>

namespace lumptrack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotation as axis-angle (magnitude = angle, rad) plus translation (mm).
/// This is the 6-vector parameterization all filter arithmetic runs on.
struct AxisAnglePose {
  Vec3 w = Vec3::Zero();
  Vec3 b = Vec3::Zero();

  Vec6 as_vector() const {
    Vec6 v;
    v << w, b;
    return v;
  }
  static AxisAnglePose from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

Mat3 rotation_exp(const Vec3& w);

/// Inverse of rotation_exp. Returns the representative with angle in [0, pi];
/// at exactly pi (where the axis sign is ambiguous) the representative with a
/// non-negative first nonzero axis component is returned.
Vec3 rotation_log(const Mat3& rotation);

/// SE(3) element: orthonormal rotation (det +1) and translation in mm.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_pose(const AxisAnglePose& pose) {
    return {rotation_exp(pose.w), pose.b};
  }

  AxisAnglePose to_pose() const { return {rotation_log(rotation), translation}; }

  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

/// Unit quaternion; only what the orientation random walk needs.
struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quaternion from_axis_angle(const Vec3& axis_angle);
  Vec3 to_axis_angle() const;
  Mat3 to_rotation() const;
  Quaternion operator*(const Quaternion& rhs) const;
  Quaternion normalized() const;
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

struct PoseError {
  double translation_mm = 0.0;
  double rotation_rad = 0.0;
};

/// eps_b = ||b - b_hat||, eps_w = angle of R * R_hat^-1.
PoseError pose_error(const RigidTransform& truth, const RigidTransform& estimate);

}  // namespace lumptrack

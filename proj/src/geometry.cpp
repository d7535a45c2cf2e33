#include "lumptrack/geometry.hpp"

#include <cmath>

namespace lumptrack {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

Mat3 rotation_exp(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double sin_over, one_minus_cos_over;
  if (theta < 1e-8) {
    sin_over = 1.0 - theta2 / 6.0;
    one_minus_cos_over = 0.5 - theta2 / 24.0;
  } else {
    sin_over = std::sin(theta) / theta;
    one_minus_cos_over = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = skew(w);
  return Mat3::Identity() + sin_over * k + one_minus_cos_over * (k * k);
}

Vec3 rotation_log(const Mat3& r) {
  // Rotation -> quaternion (Shepperd branches), quaternion -> axis-angle.
  // The quaternion route stays accurate arbitrarily close to pi.
  double qw, qx, qy, qz;
  const double trace = r.trace();
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    qw = 0.25 * s;
    qx = (r(2, 1) - r(1, 2)) / s;
    qy = (r(0, 2) - r(2, 0)) / s;
    qz = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    qw = (r(2, 1) - r(1, 2)) / s;
    qx = 0.25 * s;
    qy = (r(0, 1) + r(1, 0)) / s;
    qz = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    qw = (r(0, 2) - r(2, 0)) / s;
    qx = (r(0, 1) + r(1, 0)) / s;
    qy = 0.25 * s;
    qz = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    qw = (r(1, 0) - r(0, 1)) / s;
    qx = (r(0, 2) + r(2, 0)) / s;
    qy = (r(1, 2) + r(2, 1)) / s;
    qz = 0.25 * s;
  }
  if (qw < 0.0) {
    qw = -qw;
    qx = -qx;
    qy = -qy;
    qz = -qz;
  }
  Vec3 v(qx, qy, qz);
  const double vnorm = v.norm();
  if (vnorm < 1e-12) {
    return 2.0 * v;  // angle ~ 0
  }
  const double angle = 2.0 * std::atan2(vnorm, qw);
  Vec3 w = (angle / vnorm) * v;
  if (qw < 1e-12) {
    // angle == pi: both signs describe the rotation, pick a canonical one.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(w[i]) > 1e-12) {
        if (w[i] < 0.0) w = -w;
        break;
      }
    }
  }
  return w;
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  Quaternion q;
  if (angle < 1e-12) {
    q.w = 1.0;
    q.x = 0.5 * axis_angle.x();
    q.y = 0.5 * axis_angle.y();
    q.z = 0.5 * axis_angle.z();
    return q.normalized();
  }
  const double half = 0.5 * angle;
  const double scale = std::sin(half) / angle;
  q.w = std::cos(half);
  q.x = scale * axis_angle.x();
  q.y = scale * axis_angle.y();
  q.z = scale * axis_angle.z();
  return q;
}

Vec3 Quaternion::to_axis_angle() const {
  Quaternion q = normalized();
  if (q.w < 0.0) {
    q.w = -q.w;
    q.x = -q.x;
    q.y = -q.y;
    q.z = -q.z;
  }
  const Vec3 v(q.x, q.y, q.z);
  const double vnorm = v.norm();
  if (vnorm < 1e-12) return 2.0 * v;
  return (2.0 * std::atan2(vnorm, q.w) / vnorm) * v;
}

Mat3 Quaternion::to_rotation() const { return rotation_exp(to_axis_angle()); }

Quaternion Quaternion::operator*(const Quaternion& r) const {
  return {w * r.w - x * r.x - y * r.y - z * r.z, w * r.x + x * r.w + y * r.z - z * r.y,
          w * r.y - x * r.z + y * r.w + z * r.x, w * r.z + x * r.y - y * r.x + z * r.w};
}

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) return {};
  return {w / n, x / n, y / n, z / n};
}

PoseError pose_error(const RigidTransform& truth, const RigidTransform& estimate) {
  PoseError e;
  e.translation_mm = (truth.translation - estimate.translation).norm();
  e.rotation_rad = rotation_log(truth.rotation * estimate.rotation.transpose()).norm();
  return e;
}

}  // namespace lumptrack

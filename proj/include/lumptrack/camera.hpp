#pragma once

#include <optional>
#include <utility>

#include "lumptrack/geometry.hpp"

namespace lumptrack {

/// Pinhole camera. `extrinsic` maps points from the rig reference frame into
/// this camera's frame (identity for the reference / mono camera).
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cu = 0.0;
  double cv = 0.0;
  int width = 0;
  int height = 0;
  RigidTransform extrinsic{};
};

struct PointFeature {
  Vec2 uv = Vec2::Zero();
  double confidence = 1.0;
};

/// Image line in Hough normal form, rho = u cos(phi) + v sin(phi),
/// with phi canonicalized to [0, pi) and rho signed.
struct EdgeFeature {
  double rho = 0.0;
  double phi = 0.0;
};

inline constexpr double kDepthEpsilonMm = 1e-6;

/// Pinhole projection of a point given in the rig reference frame.
/// Throws BehindCameraError when the depth in this camera is <= 1e-6 mm.
PointFeature project_point(const CameraModel& camera, const Vec3& point_in_reference);

/// Visibility-checked projection: empty when behind the camera or outside
/// the image rectangle.
std::optional<PointFeature> project_visible_point(const CameraModel& camera,
                                                  const Vec3& point_in_reference);

/// Canonicalizes the line coef_u * u + coef_v * v + coef_1 = 0 into Hough
/// normal form. Throws InvalidInputError when the normal (coef_u, coef_v)
/// vanishes.
EdgeFeature normalize_line(double coef_u, double coef_v, double coef_1);

/// Silhouette edges of an infinite cylinder of radius `radius` (unit axis
/// direction and axis point given in the rig reference frame). Ordered by
/// canonical rho (then phi). Throws DegenerateViewError when the camera
/// center is inside or on the cylinder, DegenerateAxisError when the axis
/// passes through it.
std::pair<EdgeFeature, EdgeFeature> project_cylinder_edges(const CameraModel& camera,
                                                           double radius,
                                                           const Vec3& axis_direction,
                                                           const Vec3& axis_point);

/// Absolute angular difference wrapped modulo pi (lines are undirected).
double angle_difference_mod_pi(double a, double b);

/// True when the infinite line crosses the image rectangle.
bool edge_intersects_image(const CameraModel& camera, const EdgeFeature& edge);

inline bool inside_image(const CameraModel& camera, const Vec2& uv) {
  return uv.x() >= 0.0 && uv.x() <= camera.width - 1 && uv.y() >= 0.0 &&
         uv.y() <= camera.height - 1;
}

}  // namespace lumptrack

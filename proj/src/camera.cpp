#include "lumptrack/camera.hpp"

#include <algorithm>
#include <cmath>

#include "lumptrack/errors.hpp"

namespace lumptrack {

PointFeature project_point(const CameraModel& camera, const Vec3& point_in_reference) {
  const Vec3 p = camera.extrinsic * point_in_reference;
  if (p.z() <= kDepthEpsilonMm) {
    throw BehindCameraError("project_point: depth " + std::to_string(p.z()) + " mm");
  }
  PointFeature f;
  f.uv = Vec2(camera.fx * p.x() / p.z() + camera.cu, camera.fy * p.y() / p.z() + camera.cv);
  return f;
}

std::optional<PointFeature> project_visible_point(const CameraModel& camera,
                                                  const Vec3& point_in_reference) {
  const Vec3 p = camera.extrinsic * point_in_reference;
  if (p.z() <= kDepthEpsilonMm) return std::nullopt;
  PointFeature f;
  f.uv = Vec2(camera.fx * p.x() / p.z() + camera.cu, camera.fy * p.y() / p.z() + camera.cv);
  if (!inside_image(camera, f.uv)) return std::nullopt;
  return f;
}

EdgeFeature normalize_line(double coef_u, double coef_v, double coef_1) {
  const double norm = std::hypot(coef_u, coef_v);
  if (norm < 1e-15) {
    throw InvalidInputError("normalize_line: zero normal");
  }
  double phi = std::atan2(coef_v, coef_u);
  double rho = -coef_1 / norm;
  if (phi < 0.0) {
    phi += M_PI;
    rho = -rho;
  }
  if (phi >= M_PI) {  // atan2 returns exactly pi for (-x, 0)
    phi -= M_PI;
    rho = -rho;
  }
  return {rho, phi};
}

std::pair<EdgeFeature, EdgeFeature> project_cylinder_edges(const CameraModel& camera,
                                                           double radius,
                                                           const Vec3& axis_direction,
                                                           const Vec3& axis_point) {
  const Vec3 d = camera.extrinsic.rotation * axis_direction;
  const Vec3 p0 = camera.extrinsic * axis_point;
  const double nu = d.dot(p0);
  const double c_coef = p0.squaredNorm() - nu * nu - radius * radius;
  if (c_coef <= 0.0) {
    throw DegenerateViewError("project_cylinder_edges: camera center inside or on the cylinder");
  }
  const double sqrt_c = std::sqrt(c_coef);
  // Zero-discriminant factorization of the projected tangency quadratic.
  const Vec3 radial = (radius / sqrt_c) * (p0 - nu * d);  // r (p0 - nu d) / sqrt(C)
  const Vec3 moment = p0.cross(d);                        // (alpha, beta, kappa)
  const Vec3 line_a = radial - moment;  // unit-camera coefficients (X, Y, 1)
  const Vec3 line_b = radial + moment;
  if (line_a.norm() < 1e-12 && line_b.norm() < 1e-12) {
    throw DegenerateAxisError("project_cylinder_edges: axis passes through the camera center");
  }
  // Unit-camera (X, Y) to pixels via X = (u - cu)/fx, Y = (v - cv)/fy.
  const auto to_pixel_edge = [&camera](const Vec3& l) {
    const double coef_u = l.x() / camera.fx;
    const double coef_v = l.y() / camera.fy;
    const double coef_1 = l.z() - l.x() * camera.cu / camera.fx - l.y() * camera.cv / camera.fy;
    return normalize_line(coef_u, coef_v, coef_1);
  };
  EdgeFeature e1 = to_pixel_edge(line_a);
  EdgeFeature e2 = to_pixel_edge(line_b);
  if (e2.rho < e1.rho || (e2.rho == e1.rho && e2.phi < e1.phi)) {
    std::swap(e1, e2);
  }
  return {e1, e2};
}

double angle_difference_mod_pi(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return std::min(d, M_PI - d);
}

bool edge_intersects_image(const CameraModel& camera, const EdgeFeature& edge) {
  // Signed distance rho - (u cos phi + v sin phi) changes sign across the
  // line; test the four corners.
  const double c = std::cos(edge.phi);
  const double s = std::sin(edge.phi);
  const double w = camera.width - 1.0;
  const double h = camera.height - 1.0;
  const double d0 = edge.rho - (0.0 * c + 0.0 * s);
  const double d1 = edge.rho - (w * c + 0.0 * s);
  const double d2 = edge.rho - (0.0 * c + h * s);
  const double d3 = edge.rho - (w * c + h * s);
  const double lo = std::min(std::min(d0, d1), std::min(d2, d3));
  const double hi = std::max(std::max(d0, d1), std::max(d2, d3));
  return lo <= 0.0 && hi >= 0.0;
}

}  // namespace lumptrack

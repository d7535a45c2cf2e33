#include "lumptrack/association.hpp"

#include <algorithm>
#include <cmath>

#include "lumptrack/errors.hpp"

namespace lumptrack {

std::vector<Match> greedy_match(const Eigen::MatrixXd& cost, double max_cost) {
  std::vector<Match> candidates;
  candidates.reserve(static_cast<std::size_t>(cost.size()));
  for (int k = 0; k < cost.rows(); ++k) {
    for (int i = 0; i < cost.cols(); ++i) {
      if (cost(k, i) < max_cost) {
        candidates.push_back({k, i, cost(k, i)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.detection != b.detection) return a.detection < b.detection;
    return a.projection < b.projection;
  });
  std::vector<bool> det_used(cost.rows(), false);
  std::vector<bool> proj_used(cost.cols(), false);
  std::vector<Match> matches;
  for (const auto& c : candidates) {
    if (det_used[c.detection] || proj_used[c.projection]) continue;
    det_used[c.detection] = true;
    proj_used[c.projection] = true;
    matches.push_back(c);
  }
  return matches;
}

std::vector<Match> associate_points(const std::vector<PointFeature>& detected,
                                    const std::vector<std::optional<PointFeature>>& projected,
                                    double gamma_m, double max_cost) {
  Eigen::MatrixXd cost(detected.size(), projected.size());
  for (std::size_t k = 0; k < detected.size(); ++k) {
    for (std::size_t i = 0; i < projected.size(); ++i) {
      cost(k, i) = projected[i]
                       ? gamma_m * (detected[k].uv - projected[i]->uv).squaredNorm()
                       : std::numeric_limits<double>::infinity();
    }
  }
  return greedy_match(cost, max_cost);
}

std::vector<Match> associate_edges(const std::vector<EdgeFeature>& detected,
                                   const std::vector<std::optional<EdgeFeature>>& projected,
                                   double gamma_rho, double gamma_phi, double max_cost) {
  Eigen::MatrixXd cost(detected.size(), projected.size());
  for (std::size_t k = 0; k < detected.size(); ++k) {
    for (std::size_t i = 0; i < projected.size(); ++i) {
      cost(k, i) = projected[i]
                       ? gamma_rho * std::abs(detected[k].rho - projected[i]->rho) +
                             gamma_phi * angle_difference_mod_pi(detected[k].phi, projected[i]->phi)
                       : std::numeric_limits<double>::infinity();
    }
  }
  return greedy_match(cost, max_cost);
}

double clipped_gaussian_likelihood(const std::vector<Match>& matches, int n_detectable,
                                   double max_cost) {
  double value = (n_detectable - static_cast<int>(matches.size())) * std::exp(-max_cost);
  for (const auto& m : matches) {
    value += std::exp(-m.cost);
  }
  return value;
}

double confidence_point_likelihood(const std::vector<PointFeature>& detected,
                                   const std::vector<int>& landmark_of_detection,
                                   const std::vector<std::optional<PointFeature>>& projected,
                                   double gamma_m) {
  if (detected.size() != landmark_of_detection.size()) {
    throw InvalidInputError("confidence_point_likelihood: detections and labels differ in length");
  }
  double value = kObservationFloor;
  for (std::size_t k = 0; k < detected.size(); ++k) {
    const int landmark = landmark_of_detection[k];
    if (landmark < 0 || landmark >= static_cast<int>(projected.size())) {
      throw InvalidInputError("confidence_point_likelihood: landmark index out of range");
    }
    if (!projected[landmark]) continue;
    const double residual = (detected[k].uv - projected[landmark]->uv).norm();
    value += detected[k].confidence * std::exp(-gamma_m * residual);
  }
  return value;
}

}  // namespace lumptrack

#pragma once

#include <optional>
#include <vector>

#include "lumptrack/camera.hpp"

namespace lumptrack {

struct Match {
  int detection = -1;
  int projection = -1;
  double cost = 0.0;
};

/// Greedy ascending-cost matching: cheapest pair first, each detection and
/// projection used at most once, pairs with cost >= max_cost never matched.
/// cost(k, i) = cost of detection k against projection i.
std::vector<Match> greedy_match(const Eigen::MatrixXd& cost, double max_cost);

/// C^m_{k,i} = gamma_m * ||m_k - m_hat_i||^2 over present projections.
std::vector<Match> associate_points(const std::vector<PointFeature>& detected,
                                    const std::vector<std::optional<PointFeature>>& projected,
                                    double gamma_m, double max_cost);

/// C^l_{k,i} = gamma_rho * |rho_k - rho_hat_i| + gamma_phi * |phi_k - phi_hat_i|
/// with the angular difference wrapped modulo pi.
std::vector<Match> associate_edges(const std::vector<EdgeFeature>& detected,
                                   const std::vector<std::optional<EdgeFeature>>& projected,
                                   double gamma_rho, double gamma_phi, double max_cost);

/// (n_detectable - |A|) e^{-max_cost} + sum over matches e^{-cost}; left
/// unnormalized on purpose (the particle filter renormalizes).
double clipped_gaussian_likelihood(const std::vector<Match>& matches, int n_detectable,
                                   double max_cost);

/// Confidence-weighted point model for pre-associated detections:
/// sum_k eta_k e^{-gamma_m ||m_k - m_hat||} + floor. Detections whose
/// associated projection is absent contribute nothing. The 1e-12 floor keeps
/// weights alive through detector dropouts.
double confidence_point_likelihood(const std::vector<PointFeature>& detected,
                                   const std::vector<int>& landmark_of_detection,
                                   const std::vector<std::optional<PointFeature>>& projected,
                                   double gamma_m);

inline constexpr double kObservationFloor = 1e-12;

}  // namespace lumptrack

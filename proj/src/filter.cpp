#include "lumptrack/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lumptrack/errors.hpp"

namespace lumptrack {

namespace {

constexpr std::uint64_t kInitTag = 0x11;
constexpr std::uint64_t kAncestorTag = 0x22;
constexpr std::uint64_t kPredictTag = 0x33;
constexpr std::uint64_t kResampleTag = 0x44;

double log_gaussian_density(double delta, double variance) {
  if (variance <= 0.0) return 0.0;  // deterministic component, no density term
  return -0.5 * delta * delta / variance - 0.5 * std::log(2.0 * M_PI * variance);
}

void check_covariance(const VecX& cov, const char* name) {
  for (int i = 0; i < cov.size(); ++i) {
    if (!(cov[i] >= 0.0)) {
      throw ConfigError(std::string("filter config: ") + name + " has a negative entry");
    }
  }
}

}  // namespace

void FilterConfig::validate() const {
  if (particle_count < 1) throw ConfigError("filter config: particle_count must be >= 1");
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    throw ConfigError("filter config: ess_threshold must be in (0, 1]");
  }
  check_covariance(lump_init_cov, "lump_init_cov");
  check_covariance(lump_step_cov, "lump_step_cov");
  check_covariance(joint_error_step_cov, "joint_error_step_cov");
  check_covariance(cam_joint_error_step_cov, "cam_joint_error_step_cov");
  if (max_point_cost <= 0.0 || max_edge_cost <= 0.0) {
    throw ConfigError("filter config: association cutoffs must be positive");
  }
  if (anneal_steps < 0 || anneal_scale <= 0.0) {
    throw ConfigError("filter config: annealing parameters must be non-negative / positive");
  }
}

double effective_sample_size(const VecX& normalized_weights) {
  const double sum_sq = normalized_weights.squaredNorm();
  if (sum_sq <= 0.0) {
    throw DegenerateFilterError("effective_sample_size: all weights are zero");
  }
  return 1.0 / sum_sq;
}

void normalize_log_weights(VecX& log_weights) {
  const double max_log = log_weights.maxCoeff();
  if (!std::isfinite(max_log)) {
    throw DegenerateFilterError(
        "normalize_log_weights: weights collapsed (max log weight is " + std::to_string(max_log) +
        ")");
  }
  const double log_sum =
      max_log + std::log((log_weights.array() - max_log).exp().sum());
  log_weights.array() -= log_sum;
}

FilterState stratified_resample(const FilterState& state, RandomStream& rng) {
  const int n = static_cast<int>(state.particles.size());
  const VecX w = state.weights();
  if (w.sum() <= 0.0) {
    throw DegenerateFilterError("stratified_resample: all weights are zero");
  }
  FilterState out;
  out.particles.reserve(n);
  out.log_weights = VecX::Constant(n, -std::log(static_cast<double>(n)));
  double cumulative = w[0];
  int index = 0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + rng.uniform()) / n;
    while (cumulative < u && index < n - 1) {
      ++index;
      cumulative += w[index];
    }
    out.particles.push_back(state.particles[index]);
  }
  return out;
}

Estimate extract_estimate(const FilterState& state) {
  const VecX w = state.weights();
  Estimate est;
  Vec6 lump = Vec6::Zero();
  VecX e = VecX::Zero(state.particles.front().joint_errors.size());
  VecX ec = VecX::Zero(state.particles.front().cam_joint_errors.size());
  for (std::size_t p = 0; p < state.particles.size(); ++p) {
    lump += w[p] * state.particles[p].lump;
    e += w[p] * state.particles[p].joint_errors;
    ec += w[p] * state.particles[p].cam_joint_errors;
  }
  est.lump = AxisAnglePose::from_vector(lump);
  est.joint_errors = e;
  est.cam_joint_errors = ec;
  est.ess_fraction = effective_sample_size(w) / static_cast<double>(state.particles.size());
  return est;
}

ProjectedFeatures project_chain_features(const KinematicChain& chain, const CameraModel& camera,
                                         const std::vector<RigidTransform>& poses) {
  ProjectedFeatures out;
  out.points.reserve(chain.tool_points.size());
  for (const auto& tp : chain.tool_points) {
    out.points.push_back(project_visible_point(camera, poses[tp.link] * tp.point));
  }
  out.cylinders.reserve(chain.cylinders.size());
  for (const auto& cyl : chain.cylinders) {
    const RigidTransform& pose = poses[cyl.link];
    const Vec3 axis = pose.rotation * cyl.axis;
    const Vec3 origin = pose * cyl.origin;
    // The anchor must sit in front of the camera for the silhouette to be a
    // real detection surrogate; the Hough lines themselves are unbounded.
    const Vec3 origin_local = camera.extrinsic * origin;
    if (origin_local.z() <= kDepthEpsilonMm) {
      out.cylinders.emplace_back(std::nullopt);
      continue;
    }
    try {
      auto edges = project_cylinder_edges(camera, cyl.radius, axis, origin);
      if (edge_intersects_image(camera, edges.first) ||
          edge_intersects_image(camera, edges.second)) {
        out.cylinders.emplace_back(std::move(edges));
      } else {
        out.cylinders.emplace_back(std::nullopt);
      }
    } catch (const DegenerateViewError&) {
      out.cylinders.emplace_back(std::nullopt);
    } catch (const DegenerateAxisError&) {
      out.cylinders.emplace_back(std::nullopt);
    }
  }
  return out;
}

ParticleTracker::ParticleTracker(TrackerSetup setup, FilterConfig config, std::uint64_t seed)
    : setup_(std::move(setup)), config_(std::move(config)), seed_(seed) {
  config_.validate();
  setup_.chain.validate();
  const int n_j = setup_.chain.joint_count();
  if (config_.joint_error_bound.size() == 0) config_.joint_error_bound = VecX::Zero(n_j);
  if (config_.joint_error_step_cov.size() == 0) config_.joint_error_step_cov = VecX::Zero(n_j);
  if (config_.joint_error_bound.size() != n_j || config_.joint_error_step_cov.size() != n_j) {
    throw ConfigError("filter config: per-joint vectors must match the chain length");
  }
  if (setup_.camera_mode == CameraMode::EyeInHand) {
    setup_.camera_chain.validate();
    const int n_c = setup_.camera_chain.joint_count();
    if (config_.cam_joint_error_bound.size() == 0) config_.cam_joint_error_bound = VecX::Zero(n_c);
    if (config_.cam_joint_error_step_cov.size() == 0) {
      config_.cam_joint_error_step_cov = VecX::Zero(n_c);
    }
    if (config_.cam_joint_error_bound.size() != n_c ||
        config_.cam_joint_error_step_cov.size() != n_c) {
      throw ConfigError("filter config: per-joint camera vectors must match the camera chain");
    }
  }

  const int n_e = tracked_error_count();
  const int n_ec = tracks_camera_errors() ? setup_.camera_chain.joint_count() : 0;
  const int offset = effective_nb();
  const int n = config_.particle_count;
  state_.particles.assign(n, Particle{});
  state_.log_weights = VecX::Zero(n);
  for (int p = 0; p < n; ++p) {
    RandomStream rng = RandomStream::derive(seed_, kInitTag, 0, static_cast<std::uint64_t>(p));
    Particle& particle = state_.particles[p];
    double log_w = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double sigma = std::sqrt(config_.lump_init_cov[i]);
      particle.lump[i] = sigma * rng.gaussian();
      log_w += log_gaussian_density(particle.lump[i], config_.lump_init_cov[i]);
    }
    particle.joint_errors = VecX::Zero(n_e);
    for (int i = 0; i < n_e; ++i) {
      const double bound = config_.joint_error_bound[offset + i];
      particle.joint_errors[i] = rng.uniform(-bound, bound);
    }
    particle.cam_joint_errors = VecX::Zero(n_ec);
    for (int i = 0; i < n_ec; ++i) {
      const double bound = config_.cam_joint_error_bound[i];
      particle.cam_joint_errors[i] = rng.uniform(-bound, bound);
    }
    state_.log_weights[p] = log_w;
  }
  normalize_log_weights(state_.log_weights);
}

int ParticleTracker::effective_nb() const {
  return config_.mode == TrackingMode::AllUnknowns ? 0 : setup_.chain.n_b;
}

int ParticleTracker::tracked_error_count() const {
  if (config_.mode == TrackingMode::Lumped) return 0;
  return setup_.chain.joint_count() - effective_nb();
}

bool ParticleTracker::tracks_camera_errors() const {
  return setup_.camera_mode == CameraMode::EyeInHand &&
         config_.mode == TrackingMode::AllUnknowns;
}

RigidTransform ParticleTracker::model_base_pose(const AxisAnglePose& lump,
                                                const VecX& cam_joint_errors,
                                                const VecX& q_cam_meas) const {
  const RigidTransform lump_t = RigidTransform::from_pose(lump);
  if (setup_.camera_mode == CameraMode::Stationary) {
    return setup_.calibrated_base * lump_t;
  }
  VecX q_cam = q_cam_meas;
  if (cam_joint_errors.size() == q_cam.size()) {
    q_cam += cam_joint_errors;
  }
  const RigidTransform camera_pose = forward_kinematics_to_end(setup_.camera_chain, q_cam);
  return camera_pose.inverse() * setup_.calibrated_base * lump_t;
}

VecX ParticleTracker::effective_joints(const VecX& q_meas, const VecX& joint_errors) const {
  VecX q = q_meas;
  const int offset = effective_nb();
  for (int i = 0; i < joint_errors.size(); ++i) {
    q[offset + i] += joint_errors[i];
  }
  return q;
}

double ParticleTracker::observe_particle(const Particle& particle, const StepInput& input) const {
  const RigidTransform base =
      model_base_pose(AxisAnglePose::from_vector(particle.lump), particle.cam_joint_errors,
                      input.q_cam_meas);
  const auto poses = link_poses(setup_.chain, base, effective_joints(input.q_meas, particle.joint_errors));
  const int n_m = static_cast<int>(setup_.chain.tool_points.size());
  const int n_l = 2 * static_cast<int>(setup_.chain.cylinders.size());
  double log_likelihood = 0.0;
  for (std::size_t c = 0; c < setup_.rig.size(); ++c) {
    const auto projected = project_chain_features(setup_.chain, setup_.rig[c], poses);
    const CameraObservations& obs = input.cameras[c];
    double point_likelihood;
    if (config_.observation == ObservationVariant::ConfidenceWeighted) {
      point_likelihood =
          confidence_point_likelihood(obs.points, obs.point_labels, projected.points, config_.gamma_m);
    } else {
      const auto matches =
          associate_points(obs.points, projected.points, config_.gamma_m, config_.max_point_cost);
      point_likelihood = clipped_gaussian_likelihood(matches, n_m, config_.max_point_cost);
    }
    log_likelihood += std::log(point_likelihood);
    if (n_l > 0) {
      const auto edge_matches = associate_edges(obs.edges, projected.edge_list(), config_.gamma_rho,
                                                config_.gamma_phi, config_.max_edge_cost);
      log_likelihood +=
          std::log(clipped_gaussian_likelihood(edge_matches, n_l, config_.max_edge_cost));
    }
  }
  return log_likelihood;
}

void ParticleTracker::predict(int t) {
  const int n = config_.particle_count;
  const VecX w = state_.weights();
  if (w.sum() <= 0.0) {
    throw DegenerateFilterError("predict: all ancestor weights are zero");
  }
  VecX cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    cdf[i] = acc;
  }
  RandomStream ancestor_rng =
      RandomStream::derive(seed_, kAncestorTag, static_cast<std::uint64_t>(t), 0);
  std::vector<Particle> next(n);
  VecX next_log_w(n);
  const int offset = effective_nb();
  const double noise_scale = t < config_.anneal_steps ? config_.anneal_scale : 1.0;
  for (int p = 0; p < n; ++p) {
    const double u = ancestor_rng.uniform() * acc;
    const int idx = static_cast<int>(
        std::lower_bound(cdf.data(), cdf.data() + n, u) - cdf.data());
    const Particle& ancestor = state_.particles[std::min(idx, n - 1)];
    RandomStream rng = RandomStream::derive(seed_, kPredictTag, static_cast<std::uint64_t>(t),
                                            static_cast<std::uint64_t>(p));
    Particle particle = ancestor;
    double log_w = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double variance = noise_scale * config_.lump_step_cov[i];
      const double delta = std::sqrt(variance) * rng.gaussian();
      particle.lump[i] += delta;
      log_w += log_gaussian_density(delta, variance);
    }
    for (int i = 0; i < particle.joint_errors.size(); ++i) {
      const double variance = noise_scale * config_.joint_error_step_cov[offset + i];
      const double delta = std::sqrt(variance) * rng.gaussian();
      particle.joint_errors[i] += delta;
      log_w += log_gaussian_density(delta, variance);
    }
    for (int i = 0; i < particle.cam_joint_errors.size(); ++i) {
      const double variance = noise_scale * config_.cam_joint_error_step_cov[i];
      const double delta = std::sqrt(variance) * rng.gaussian();
      particle.cam_joint_errors[i] += delta;
      log_w += log_gaussian_density(delta, variance);
    }
    next[p] = std::move(particle);
    next_log_w[p] = config_.prediction == PredictionWeighting::ProposalDensity
                        ? log_w
                        : -std::log(static_cast<double>(n));
  }
  state_.particles = std::move(next);
  state_.log_weights = std::move(next_log_w);
}

Estimate ParticleTracker::update(const StepInput& input) {
  if (static_cast<int>(input.cameras.size()) != static_cast<int>(setup_.rig.size())) {
    throw InvalidInputError("update: expected one feature batch per rig camera");
  }
  if (input.q_meas.size() != setup_.chain.joint_count()) {
    throw InvalidInputError("update: measured joint vector size mismatch");
  }
  if (setup_.camera_mode == CameraMode::EyeInHand &&
      input.q_cam_meas.size() != setup_.camera_chain.joint_count()) {
    throw InvalidInputError("update: measured camera joint vector size mismatch");
  }
  const int t = step_++;
  predict(t);
  for (int p = 0; p < config_.particle_count; ++p) {
    state_.log_weights[p] += observe_particle(state_.particles[p], input);
  }
  try {
    normalize_log_weights(state_.log_weights);
  } catch (const DegenerateFilterError&) {
    throw DegenerateFilterError("update: weights underflowed at step " + std::to_string(t) +
                                " (every particle fell outside the association gates)");
  }
  const double ess_fraction =
      effective_sample_size(state_.weights()) / static_cast<double>(config_.particle_count);
  // The weighted mean is taken over the full weighted population; resampling
  // afterwards only re-draws the support for the next prediction.
  Estimate est = extract_estimate(state_);
  est.ess_fraction = ess_fraction;
  const bool resample = config_.resample_trigger == ResampleTrigger::BelowThreshold
                            ? ess_fraction < config_.ess_threshold
                            : ess_fraction > config_.ess_threshold;
  if (resample) {
    RandomStream rng =
        RandomStream::derive(seed_, kResampleTag, static_cast<std::uint64_t>(t), 0);
    state_ = stratified_resample(state_, rng);
  }
  return est;
}

RigidTransform ParticleTracker::estimated_end_pose(const Estimate& estimate,
                                                   const StepInput& input) const {
  const RigidTransform base =
      model_base_pose(estimate.lump, estimate.cam_joint_errors, input.q_cam_meas);
  const auto poses =
      link_poses(setup_.chain, base, effective_joints(input.q_meas, estimate.joint_errors));
  return poses.back() * setup_.chain.end_transform;
}

std::pair<int, int> ParticleTracker::count_matches(const Estimate& estimate,
                                                   const StepInput& input) const {
  const RigidTransform base =
      model_base_pose(estimate.lump, estimate.cam_joint_errors, input.q_cam_meas);
  const auto poses =
      link_poses(setup_.chain, base, effective_joints(input.q_meas, estimate.joint_errors));
  int n_points = 0;
  int n_edges = 0;
  for (std::size_t c = 0; c < setup_.rig.size(); ++c) {
    const auto projected = project_chain_features(setup_.chain, setup_.rig[c], poses);
    const CameraObservations& obs = input.cameras[c];
    if (config_.observation == ObservationVariant::ConfidenceWeighted) {
      for (std::size_t k = 0; k < obs.points.size(); ++k) {
        const int landmark = obs.point_labels[k];
        if (landmark >= 0 && landmark < static_cast<int>(projected.points.size()) &&
            projected.points[landmark]) {
          ++n_points;
        }
      }
    } else {
      n_points += static_cast<int>(
          associate_points(obs.points, projected.points, config_.gamma_m, config_.max_point_cost)
              .size());
    }
    n_edges += static_cast<int>(associate_edges(obs.edges, projected.edge_list(),
                                                config_.gamma_rho, config_.gamma_phi,
                                                config_.max_edge_cost)
                                    .size());
  }
  return {n_points, n_edges};
}

}  // namespace lumptrack

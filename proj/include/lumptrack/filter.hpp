#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lumptrack/association.hpp"
#include "lumptrack/camera.hpp"
#include "lumptrack/kinematics.hpp"
#include "lumptrack/random.hpp"

namespace lumptrack {

/// Which unknowns the filter carries. AllUnknowns runs the filter with an
/// effective n_b of 0 (base error plus every joint error), Lumped tracks the
/// pose alone, LumpedPlusJoints adds the observable joint errors.
enum class TrackingMode { AllUnknowns, Lumped, LumpedPlusJoints };

enum class CameraMode { Stationary, EyeInHand };

enum class ObservationVariant { ClippedGaussian, ConfidenceWeighted };

/// ProposalDensity follows the listing (weight set to the density of the
/// sampled perturbation); StandardSir resets predicted weights to uniform and
/// lets the observation do all the weighting.
enum class PredictionWeighting { ProposalDensity, StandardSir };

/// BelowThreshold resamples when ESS/N drops under the threshold (the
/// standard degeneracy rule); PaperLiteral keeps the listing's comparison
/// direction and resamples when ESS/N exceeds it.
enum class ResampleTrigger { BelowThreshold, PaperLiteral };

struct FilterConfig {
  int particle_count = 1000;
  double ess_threshold = 0.5;
  /// Diagonal covariances, axis-angle entries first then translation.
  Vec6 lump_init_cov = Vec6::Zero();
  Vec6 lump_step_cov = Vec6::Zero();
  /// Per chain joint (full length n_j); the filter slices the tracked tail.
  VecX joint_error_bound;
  VecX joint_error_step_cov;
  /// Per camera-arm joint; used only in the eye-in-hand all-unknowns case.
  VecX cam_joint_error_bound;
  VecX cam_joint_error_step_cov;
  double gamma_m = 0.15;
  double gamma_rho = 0.1;
  double gamma_phi = 40.0;
  double max_point_cost = 3.75;
  double max_edge_cost = 6.5;
  TrackingMode mode = TrackingMode::Lumped;
  ObservationVariant observation = ObservationVariant::ClippedGaussian;
  PredictionWeighting prediction = PredictionWeighting::ProposalDensity;
  ResampleTrigger resample_trigger = ResampleTrigger::BelowThreshold;
  /// Optional exploration phase: for the first anneal_steps updates every
  /// step covariance is multiplied by anneal_scale. Off by default; the
  /// servo preset uses it to bootstrap before settling into a fine walk.
  int anneal_steps = 0;
  double anneal_scale = 1.0;

  void validate() const;  // throws ConfigError
};

struct Particle {
  Vec6 lump = Vec6::Zero();  // (w, b)
  VecX joint_errors;         // tracked tail of the chain
  VecX cam_joint_errors;     // eye-in-hand all-unknowns only
};

struct FilterState {
  std::vector<Particle> particles;
  /// Normalized in log space: logsumexp(log_weights) == 0.
  VecX log_weights;

  VecX weights() const { return log_weights.array().exp(); }
};

/// One camera's detections for a step.
struct CameraObservations {
  std::vector<PointFeature> points;
  /// Landmark index per detection; populated in the confidence-weighted
  /// variant, empty otherwise.
  std::vector<int> point_labels;
  std::vector<EdgeFeature> edges;
};

struct StepInput {
  int t = 0;
  VecX q_meas;
  VecX q_cam_meas;  // eye-in-hand only
  std::vector<CameraObservations> cameras;
};

struct Estimate {
  AxisAnglePose lump;
  VecX joint_errors;
  VecX cam_joint_errors;
  double ess_fraction = 1.0;
};

/// Everything static the tracker needs: tool chain, camera rig, the initial
/// calibration, and (eye-in-hand) the camera arm whose end_transform carries
/// the joint-to-camera mount.
struct TrackerSetup {
  KinematicChain chain;
  std::vector<CameraModel> rig;
  CameraMode camera_mode = CameraMode::Stationary;
  /// T^c_{b-} for a stationary camera, the calibrated base-to-base transform
  /// for eye-in-hand.
  RigidTransform calibrated_base{};
  KinematicChain camera_chain;
};

struct ProjectedFeatures {
  std::vector<std::optional<PointFeature>> points;  // one slot per tool point
  std::vector<std::optional<std::pair<EdgeFeature, EdgeFeature>>> cylinders;

  std::vector<std::optional<EdgeFeature>> edge_list() const {
    std::vector<std::optional<EdgeFeature>> edges;
    edges.reserve(cylinders.size() * 2);
    for (const auto& c : cylinders) {
      if (c) {
        edges.emplace_back(c->first);
        edges.emplace_back(c->second);
      } else {
        edges.emplace_back(std::nullopt);
        edges.emplace_back(std::nullopt);
      }
    }
    return edges;
  }
};

/// 1 / sum(w^2) for normalized weights; in [1, N].
double effective_sample_size(const VecX& normalized_weights);

/// Log-sum-exp normalization in place. Throws DegenerateFilterError when
/// every weight has underflowed (or gone non-finite).
void normalize_log_weights(VecX& log_weights);

/// N survivors with uniform weights, one uniform draw per stratum
/// [i/N, (i+1)/N); expected copy count of particle p is N * w_p.
FilterState stratified_resample(const FilterState& state, RandomStream& rng);

/// Weighted componentwise mean of (w, b, e) exactly as the listing's final
/// line; valid for post-convergence spreads well below pi.
Estimate extract_estimate(const FilterState& state);

/// Tool-point and cylinder-edge projections of the chain posed at
/// `pose_chain` (chain base pose already composed with calibration and lump)
/// through one camera. Features behind the camera or outside the image are
/// absent, not errors.
ProjectedFeatures project_chain_features(const KinematicChain& chain, const CameraModel& camera,
                                         const std::vector<RigidTransform>& poses);

class ParticleTracker {
 public:
  ParticleTracker(TrackerSetup setup, FilterConfig config, std::uint64_t seed);

  /// One full Algorithm-1 iteration: predict, weight against the step's
  /// feature batches, normalize, resample on the ESS trigger, extract.
  Estimate update(const StepInput& input);

  const FilterState& state() const { return state_; }
  const TrackerSetup& setup() const { return setup_; }
  const FilterConfig& config() const { return config_; }

  /// n_b the filter actually uses (0 in AllUnknowns mode).
  int effective_nb() const;
  /// Number of tracked chain joint errors.
  int tracked_error_count() const;
  bool tracks_camera_errors() const;

  /// Chain base pose (calibration * lump, and the camera-arm factor when
  /// eye-in-hand) for a given state.
  RigidTransform model_base_pose(const AxisAnglePose& lump, const VecX& cam_joint_errors,
                                 const VecX& q_cam_meas) const;
  /// Full joint vector with the tracked errors added to the measured tail.
  VecX effective_joints(const VecX& q_meas, const VecX& joint_errors) const;
  /// End-frame pose in the camera reference frame implied by an estimate.
  RigidTransform estimated_end_pose(const Estimate& estimate, const StepInput& input) const;
  /// Matched detection counts (points, edges) of an estimate against the
  /// step's batches, summed over cameras.
  std::pair<int, int> count_matches(const Estimate& estimate, const StepInput& input) const;

 private:
  void predict(int t);
  double observe_particle(const Particle& particle, const StepInput& input) const;

  TrackerSetup setup_;
  FilterConfig config_;
  FilterState state_;
  std::uint64_t seed_ = 0;
  int step_ = 0;
};

}  // namespace lumptrack

#include <doctest.h>

#include <cmath>

#include "lumptrack/lump.hpp"
#include "lumptrack/presets.hpp"
#include "lumptrack/simulator.hpp"

using namespace lumptrack;

TEST_SUITE_BEGIN("simulator");

TEST_CASE("calibration error sampling") {
  SUBCASE("zero covariance gives the identity error") {
    RandomStream rng(1);
    const RigidTransform e = sample_calibration_error(Vec6::Zero(), rng);
    CHECK((e.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("sample standard deviations match sqrt(diag) within 3%") {
    Vec6 cov;
    cov << 0.005, 0.005, 0.005, 5.0, 5.0, 5.0;
    RandomStream rng(2);
    Vec6 sum = Vec6::Zero();
    Vec6 sum_sq = Vec6::Zero();
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const AxisAnglePose pose = sample_calibration_error(cov, rng).to_pose();
      const Vec6 v = pose.as_vector();
      sum += v;
      sum_sq += v.cwiseProduct(v);
    }
    for (int k = 0; k < 6; ++k) {
      const double mean = sum[k] / n;
      const double stddev = std::sqrt(sum_sq[k] / n - mean * mean);
      CHECK(stddev == doctest::Approx(std::sqrt(cov[k])).epsilon(0.03));
    }
  }

  SUBCASE("composing truth with the error and removing it recovers truth") {
    Vec6 cov;
    cov << 0.01, 0.01, 0.01, 4.0, 4.0, 4.0;
    RandomStream rng(3);
    const RigidTransform truth =
        RigidTransform::from_pose({Vec3(0.4, -0.2, 0.9), Vec3(10, 20, 30)});
    const RigidTransform error = sample_calibration_error(cov, rng);
    const RigidTransform calibrated = truth * error.inverse();
    const RigidTransform recovered = calibrated * error;
    CHECK((recovered.matrix() - truth.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("joint error processes") {
  NoiseModel noise;
  noise.cable_stretch = VecX::Zero(3);

  SUBCASE("all-zero model gives zero errors") {
    const VecX q = VecX::Constant(3, 1.5);
    const VecX e = tool_joint_errors(noise, VecX::Zero(3), q);
    CHECK(e.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("bias plus linear cable stretch") {
    noise.cable_stretch = VecX::Constant(3, 0.02);
    VecX bias = VecX::Constant(3, 0.004);
    VecX q = VecX::Constant(3, 2.0);
    const VecX e = tool_joint_errors(noise, bias, q);
    CHECK(e[0] == doctest::Approx(0.044).epsilon(1e-12));
  }

  SUBCASE("camera-arm errors have the configured per-step spread") {
    NoiseModel cam_noise;
    cam_noise.cam_joint_sigma = VecX::Constant(1, 0.0075);
    RandomStream rng(5);
    const VecX bias = VecX::Zero(1);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = camera_joint_errors(cam_noise, bias, rng)[0];
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sum_sq / n - mean * mean);
    CHECK(stddev == doctest::Approx(0.0075).epsilon(0.03));
  }
}

TEST_CASE("orientation random walk") {
  SUBCASE("zero maximum angle leaves the state untouched") {
    RandomStream rng(7);
    Quaternion q = Quaternion::from_axis_angle(Vec3(0.1, 0.2, 0.3));
    const Quaternion out = random_walk_orientation(q, 0.0, rng);
    CHECK(out.w == q.w);
    CHECK(out.x == q.x);
  }

  SUBCASE("unit norm preserved over many steps and steps bounded") {
    RandomStream rng(8);
    Quaternion q;
    Quaternion prev = q;
    for (int i = 0; i < 100000; ++i) {
      q = random_walk_orientation(q, 0.07, rng);
      CHECK(std::abs(q.norm() - 1.0) < 1e-12);
      if (i < 1000) {
        // relative rotation angle between consecutive states <= max angle
        const Quaternion rel{prev.w * q.w + prev.x * q.x + prev.y * q.y + prev.z * q.z, 0, 0, 0};
        const double angle = 2.0 * std::acos(std::min(1.0, std::abs(rel.w)));
        CHECK(angle <= 0.07 + 1e-9);
        prev = q;
      }
    }
  }

  SUBCASE("step axes are uniform on the sphere (octant chi-square)") {
    RandomStream rng(9);
    int counts[8] = {0};
    const int n = 100000;
    Quaternion identity;
    for (int i = 0; i < n; ++i) {
      const Quaternion step = random_walk_orientation(identity, 0.07, rng);
      const Vec3 axis = step.to_axis_angle();
      if (axis.norm() < 1e-12) continue;
      const int octant =
          (axis.x() > 0 ? 1 : 0) | (axis.y() > 0 ? 2 : 0) | (axis.z() > 0 ? 4 : 0);
      ++counts[octant];
    }
    double chi2 = 0.0;
    const double expected = n / 8.0;
    for (int k = 0; k < 8; ++k) {
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    // 7 dof; chi2 above ~24.3 has p < 0.001.
    CHECK(chi2 < 24.3);
  }
}

TEST_CASE("feature synthesis") {
  Scenario scenario = davinci_scenario(CameraMode::Stationary);
  VecX home(7);
  for (int i = 0; i < 7; ++i) home[i] = scenario.trajectory.tool_cycles[i].center;
  const auto poses = link_poses(scenario.chain, scenario.base_to_camera, home);

  SUBCASE("zero noise reproduces the exact projections") {
    DetectionNoise clean;
    clean.pixel_sigma = 0.0;
    clean.rho_sigma = 0.0;
    clean.phi_sigma = 0.0;
    clean.dropout = 0.0;
    clean.false_positive_rate = 0.0;
    RandomStream rng(10);
    const auto batches = synthesize_features(scenario.chain, scenario.rig, poses, clean, rng);
    REQUIRE(batches.size() == 2);
    const auto projected = project_chain_features(scenario.chain, scenario.rig[0], poses);
    std::size_t visible = 0;
    for (const auto& p : projected.points) visible += p.has_value() ? 1 : 0;
    CHECK(batches[0].points.size() == visible);
    std::size_t k = 0;
    for (const auto& p : projected.points) {
      if (!p) continue;
      CHECK((batches[0].points[k].uv - p->uv).norm() < 1e-12);
      ++k;
    }
    CHECK(batches[0].edges.size() == 2);
  }

  SUBCASE("full dropout empties the batches") {
    DetectionNoise noise;
    noise.dropout = 1.0;
    noise.false_positive_rate = 0.0;
    RandomStream rng(11);
    const auto batches = synthesize_features(scenario.chain, scenario.rig, poses, noise, rng);
    for (const auto& b : batches) {
      CHECK(b.points.empty());
      CHECK(b.edges.empty());
    }
  }

  SUBCASE("false positive rate 2 yields about 2 spurious detections per camera") {
    DetectionNoise noise;
    noise.dropout = 1.0;  // only false positives remain
    noise.false_positive_rate = 2.0;
    RandomStream rng(12);
    long total = 0;
    const int steps = 10000;
    for (int i = 0; i < steps; ++i) {
      const auto batches = synthesize_features(scenario.chain, scenario.rig, poses, noise, rng);
      total += static_cast<long>(batches[0].points.size());
    }
    const double mean = static_cast<double>(total) / steps;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
  }

  SUBCASE("confidence features carry labels and Beta confidences") {
    DetectionNoise noise;
    noise.pixel_sigma = 0.0;
    noise.dropout = 0.0;
    noise.confidence_features = true;
    RandomStream rng(13);
    const auto batches = synthesize_features(scenario.chain, scenario.rig, poses, noise, rng);
    REQUIRE(!batches[0].points.empty());
    CHECK(batches[0].point_labels.size() == batches[0].points.size());
    for (const auto& p : batches[0].points) {
      CHECK(p.confidence > 0.0);
      CHECK(p.confidence < 1.0);
    }
  }
}

TEST_CASE("scene stepping") {
  SUBCASE("zero noise model: measured equals true and the lump is the calibration error only") {
    Scenario scenario = davinci_scenario(CameraMode::Stationary);
    scenario.noise = NoiseModel{};
    scenario.noise.detection.pixel_sigma = 0.0;
    scenario.noise.detection.dropout = 0.0;
    scenario.noise.detection.false_positive_rate = 0.0;
    SceneSimulator sim(scenario, 99);
    const TruthRow row = sim.step();
    CHECK((row.q_meas - row.q_true).cwiseAbs().maxCoeff() == 0.0);
    const RigidTransform lump = RigidTransform::from_pose(row.true_lump);
    CHECK((lump.matrix() - sim.calibration_error().matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("the logged lump satisfies the exact-pose identity every step") {
    Scenario scenario = davinci_scenario(CameraMode::Stationary);
    SceneSimulator sim(scenario, 123);
    for (int t = 0; t < 25; ++t) {
      const TruthRow row = sim.step();
      // Calibrated-base route with the logged lump must reproduce the true
      // end pose computed from the true joints.
      RigidTransform recomposed = sim.calibrated_base() *
                                  RigidTransform::from_pose(row.true_lump);
      for (int i = 0; i < scenario.chain.n_b; ++i) {
        recomposed = recomposed * mdh_transform(scenario.chain.joints[i], row.q_meas[i]);
      }
      for (int i = scenario.chain.n_b; i < scenario.chain.joint_count(); ++i) {
        recomposed = recomposed * mdh_transform(scenario.chain.joints[i], row.q_true[i]);
      }
      recomposed = recomposed * scenario.chain.end_transform;
      CHECK((recomposed.matrix() - row.true_end_pose.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SUBCASE("eye-in-hand lump reproduces the true end pose as well") {
    Scenario scenario = davinci_scenario(CameraMode::EyeInHand);
    SceneSimulator sim(scenario, 321);
    for (int t = 0; t < 15; ++t) {
      const TruthRow row = sim.step();
      RigidTransform recomposed =
          forward_kinematics_to_end(scenario.camera_chain, row.q_cam_meas).inverse() *
          sim.calibrated_base() * RigidTransform::from_pose(row.true_lump);
      for (int i = 0; i < scenario.chain.n_b; ++i) {
        recomposed = recomposed * mdh_transform(scenario.chain.joints[i], row.q_meas[i]);
      }
      for (int i = scenario.chain.n_b; i < scenario.chain.joint_count(); ++i) {
        recomposed = recomposed * mdh_transform(scenario.chain.joints[i], row.q_true[i]);
      }
      recomposed = recomposed * scenario.chain.end_transform;
      CHECK((recomposed.matrix() - row.true_end_pose.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SUBCASE("a 140-step run emits 140 rows and stays deterministic under the seed") {
    Scenario scenario = davinci_scenario(CameraMode::Stationary);
    SceneSimulator a(scenario, 555);
    SceneSimulator b(scenario, 555);
    int rows = 0;
    for (int t = 0; t < scenario.trajectory.steps; ++t) {
      const TruthRow ra = a.step();
      const TruthRow rb = b.step();
      ++rows;
      CHECK((ra.q_true - rb.q_true).cwiseAbs().maxCoeff() == 0.0);
      REQUIRE(ra.batches.size() == rb.batches.size());
      for (std::size_t c = 0; c < ra.batches.size(); ++c) {
        REQUIRE(ra.batches[c].points.size() == rb.batches[c].points.size());
        for (std::size_t k = 0; k < ra.batches[c].points.size(); ++k) {
          CHECK((ra.batches[c].points[k].uv - rb.batches[c].points[k].uv).norm() == 0.0);
        }
      }
    }
    CHECK(rows == 140);
  }

  SUBCASE("true detections never sit outside the image") {
    Scenario scenario = davinci_scenario(CameraMode::Stationary);
    SceneSimulator sim(scenario, 777);
    for (int t = 0; t < 50; ++t) {
      const TruthRow row = sim.step();
      for (std::size_t c = 0; c < row.batches.size(); ++c) {
        for (const auto& p : row.batches[c].points) {
          CHECK(inside_image(scenario.rig[c], p.uv));
        }
      }
    }
  }
}

TEST_CASE("most landmarks stay visible along the preset trajectory") {
  Scenario scenario = davinci_scenario(CameraMode::Stationary);
  scenario.noise.detection.dropout = 0.0;
  scenario.noise.detection.false_positive_rate = 0.0;
  scenario.noise.detection.pixel_sigma = 0.0;
  SceneSimulator sim(scenario, 2);
  long seen = 0;
  long possible = 0;
  for (int t = 0; t < scenario.trajectory.steps; ++t) {
    const TruthRow row = sim.step();
    seen += static_cast<long>(row.batches[0].points.size());
    possible += static_cast<long>(scenario.chain.tool_points.size());
  }
  CHECK(static_cast<double>(seen) / static_cast<double>(possible) > 0.9);
}

TEST_SUITE_END();

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lumptrack/config_io.hpp"
#include "lumptrack/errors.hpp"
#include "lumptrack/presets.hpp"
#include "lumptrack/stream_io.hpp"

using namespace lumptrack;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("lumptrack_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("chain file round trip") {
  TempDir dir;
  const KinematicChain chain = davinci_scenario(CameraMode::Stationary).chain;
  save_chain(chain, dir.path / "chain.json");
  const KinematicChain back = load_chain(dir.path / "chain.json");
  CHECK(back.joint_count() == chain.joint_count());
  CHECK(back.n_b == chain.n_b);
  CHECK(back.tool_points.size() == chain.tool_points.size());
  CHECK(back.cylinders.size() == chain.cylinders.size());
  for (int i = 0; i < chain.joint_count(); ++i) {
    CHECK(back.joints[i].alpha == doctest::Approx(chain.joints[i].alpha).epsilon(1e-15));
    CHECK(back.joints[i].d_offset == doctest::Approx(chain.joints[i].d_offset).epsilon(1e-15));
    CHECK(back.joints[i].kind == chain.joints[i].kind);
  }
}

TEST_CASE("unknown keys are rejected with the offending key named") {
  TempDir dir;
  {
    std::ofstream out(dir.path / "bad.json");
    out << R"({"joints": [], "n_b": 0, "tool_points": [], "cylinders": [], "spline": 3})";
  }
  try {
    load_chain(dir.path / "bad.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("spline") != std::string::npos);
  }
}

TEST_CASE("misspelled joint kind is rejected") {
  TempDir dir;
  {
    std::ofstream out(dir.path / "bad.json");
    out << R"({"joints": [{"kind": "revolote", "alpha": 0, "a": 0,
                "theta_offset": 0, "d_offset": 0}],
               "n_b": 0, "tool_points": [], "cylinders": []})";
  }
  CHECK_THROWS_AS(load_chain(dir.path / "bad.json"), ConfigError);
}

TEST_CASE("rig and filter config round trips") {
  TempDir dir;
  const auto rig = davinci_scenario(CameraMode::Stationary).rig;
  save_rig(rig, dir.path / "rig.json");
  const auto rig_back = load_rig(dir.path / "rig.json");
  REQUIRE(rig_back.size() == rig.size());
  CHECK(rig_back[1].extrinsic.translation.x() == doctest::Approx(-5.0));
  CHECK(rig_back[0].fx == doctest::Approx(rig[0].fx).epsilon(1e-15));

  const FilterConfig config =
      davinci_filter_config(TrackingMode::LumpedPlusJoints, CameraMode::Stationary);
  save_filter_config(config, dir.path / "filter.json");
  const FilterConfig back = load_filter_config(dir.path / "filter.json");
  CHECK(back.particle_count == config.particle_count);
  CHECK(back.mode == config.mode);
  CHECK(back.gamma_phi == doctest::Approx(40.0));
  CHECK(back.max_edge_cost == doctest::Approx(6.5));
  CHECK((back.joint_error_bound - config.joint_error_bound).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scenario bundle round trip") {
  TempDir dir;
  for (const CameraMode mode : {CameraMode::Stationary, CameraMode::EyeInHand}) {
    const Scenario scenario = davinci_scenario(mode);
    const auto file = save_scenario_bundle(scenario, dir.path / to_string(mode));
    const Scenario back = load_scenario(file);
    CHECK(back.camera_mode == scenario.camera_mode);
    CHECK(back.chain.joint_count() == scenario.chain.joint_count());
    CHECK(back.trajectory.steps == scenario.trajectory.steps);
    CHECK((back.noise.joint_bias_bound - scenario.noise.joint_bias_bound).cwiseAbs().maxCoeff() ==
          0.0);
    if (mode == CameraMode::Stationary) {
      CHECK((back.base_to_camera.matrix() - scenario.base_to_camera.matrix())
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    } else {
      CHECK(back.camera_chain.joint_count() == scenario.camera_chain.joint_count());
      CHECK((back.base_to_base.matrix() - scenario.base_to_base.matrix()).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("pose serialization survives the round trip exactly") {
  const AxisAnglePose pose{Vec3(0.123456789012345, -0.5, 1.0e-7), Vec3(1.5, -2.25, 1e3)};
  const AxisAnglePose back = pose_from_json(pose_to_json(pose), "test");
  CHECK((back.w - pose.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b - pose.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feature stream round trip") {
  std::vector<StepInput> records;
  StepInput a;
  a.t = 0;
  a.q_meas = VecX::Zero(3);
  a.q_meas << 0.25, -0.5, 100.0;
  CameraObservations cam;
  cam.points.push_back({Vec2(12.5, 40.25), 0.75});
  cam.points.push_back({Vec2(100.0, 200.0), 1.0});
  cam.point_labels = {2, 0};
  cam.edges.push_back({123.456, 1.234});
  a.cameras = {cam, CameraObservations{}};
  records.push_back(a);
  StepInput b = a;
  b.t = 1;
  b.q_cam_meas = VecX::Constant(2, 0.5);
  records.push_back(b);

  std::ostringstream out;
  for (const auto& r : records) write_stream_record(out, r);
  std::istringstream in(out.str());
  const auto back = read_stream(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].t == 0);
  CHECK((back[0].q_meas - a.q_meas).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back[0].cameras.size() == 2);
  CHECK(back[0].cameras[0].points.size() == 2);
  CHECK(back[0].cameras[0].points[0].confidence == 0.75);
  CHECK(back[0].cameras[0].point_labels == std::vector<int>{2, 0});
  CHECK(back[0].cameras[0].edges[0].rho == 123.456);
  CHECK(back[1].q_cam_meas.size() == 2);
}

TEST_CASE("estimate records round trip") {
  Estimate est;
  est.lump.w = Vec3(0.01, -0.02, 0.03);
  est.lump.b = Vec3(1.0, 2.0, -3.0);
  est.joint_errors = VecX::Constant(3, 0.005);
  est.ess_fraction = 0.625;
  std::ostringstream out;
  write_estimate_record(out, 7, est);
  std::istringstream in(out.str());
  const auto back = read_estimates(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].t == 7);
  CHECK((back[0].estimate.lump.w - est.lump.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back[0].estimate.ess_fraction == 0.625);
}

TEST_CASE("meta sidecar round trip") {
  TempDir dir;
  SimulationMeta meta;
  meta.camera_mode = CameraMode::Stationary;
  meta.calibrated_base = RigidTransform::from_pose({Vec3(0.1, 0.2, 0.3), Vec3(5, 6, 7)});
  meta.calibration_error = {Vec3(0.01, 0.0, -0.01), Vec3(1, -1, 2)};
  TruthRow row;
  row.t = 0;
  row.q_true = VecX::Constant(2, 1.0);
  row.q_meas = VecX::Constant(2, 0.99);
  row.true_lump = meta.calibration_error;
  row.true_end_pose = RigidTransform::from_pose({Vec3(0, 0, 0.5), Vec3(10, 20, 30)});
  meta.truth = {row};
  const std::string file = (dir.path / "meta.json").string();
  write_meta_file(file, meta);
  const SimulationMeta back = read_meta_file(file);
  CHECK(back.truth.size() == 1);
  CHECK((back.calibrated_base.matrix() - meta.calibrated_base.matrix()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((back.truth[0].q_meas - row.q_meas).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("format_double emits shortest round-trip decimals") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_SUITE_END();

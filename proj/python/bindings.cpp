#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lumptrack/camera.hpp"
#include "lumptrack/config_io.hpp"
#include "lumptrack/control.hpp"
#include "lumptrack/experiment.hpp"
#include "lumptrack/lump.hpp"
#include "lumptrack/presets.hpp"
#include "lumptrack/stream_io.hpp"

namespace py = pybind11;
using namespace lumptrack;

PYBIND11_MODULE(_lumptrack, m) {
  m.doc() = "Lumped-error robotic tool tracking core";

  py::class_<AxisAnglePose>(m, "AxisAnglePose")
      .def(py::init<>())
      .def(py::init([](const Vec3& w, const Vec3& b) { return AxisAnglePose{w, b}; }),
           py::arg("w"), py::arg("b"))
      .def_readwrite("w", &AxisAnglePose::w)
      .def_readwrite("b", &AxisAnglePose::b);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def_static("from_pose", &RigidTransform::from_pose)
      .def_readwrite("rotation", &RigidTransform::rotation)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("to_pose", &RigidTransform::to_pose)
      .def("inverse", &RigidTransform::inverse)
      .def("matrix", &RigidTransform::matrix)
      .def("__mul__",
           [](const RigidTransform& a, const RigidTransform& b) { return a * b; })
      .def("apply", [](const RigidTransform& t, const Vec3& p) { return t * p; });

  m.def("rotation_exp", &rotation_exp, py::arg("w"));
  m.def("rotation_log", &rotation_log, py::arg("rotation"));
  m.def(
      "pose_error",
      [](const RigidTransform& truth, const RigidTransform& estimate) {
        const PoseError e = pose_error(truth, estimate);
        return py::make_tuple(e.translation_mm, e.rotation_rad);
      },
      py::arg("truth"), py::arg("estimate"));

  py::enum_<JointKind>(m, "JointKind")
      .value("Revolute", JointKind::Revolute)
      .value("Prismatic", JointKind::Prismatic);

  py::class_<MdhJoint>(m, "MdhJoint")
      .def(py::init([](double alpha, double a, double theta_offset, double d_offset,
                       JointKind kind) {
             return MdhJoint{alpha, a, theta_offset, d_offset, kind};
           }),
           py::arg("alpha") = 0.0, py::arg("a") = 0.0, py::arg("theta_offset") = 0.0,
           py::arg("d_offset") = 0.0, py::arg("kind") = JointKind::Revolute)
      .def_readwrite("alpha", &MdhJoint::alpha)
      .def_readwrite("a", &MdhJoint::a)
      .def_readwrite("theta_offset", &MdhJoint::theta_offset)
      .def_readwrite("d_offset", &MdhJoint::d_offset)
      .def_readwrite("kind", &MdhJoint::kind);

  py::class_<ToolPoint>(m, "ToolPoint")
      .def(py::init([](int link, const Vec3& point) { return ToolPoint{link, point}; }),
           py::arg("link"), py::arg("point"))
      .def_readwrite("link", &ToolPoint::link)
      .def_readwrite("point", &ToolPoint::point);

  py::class_<CylinderPrimitive>(m, "CylinderPrimitive")
      .def(py::init([](int link, double radius, const Vec3& axis, const Vec3& origin) {
             return CylinderPrimitive{link, radius, axis, origin};
           }),
           py::arg("link"), py::arg("radius"), py::arg("axis"), py::arg("origin"))
      .def_readwrite("link", &CylinderPrimitive::link)
      .def_readwrite("radius", &CylinderPrimitive::radius)
      .def_readwrite("axis", &CylinderPrimitive::axis)
      .def_readwrite("origin", &CylinderPrimitive::origin);

  py::class_<KinematicChain>(m, "KinematicChain")
      .def(py::init<>())
      .def_readwrite("joints", &KinematicChain::joints)
      .def_readwrite("n_b", &KinematicChain::n_b)
      .def_readwrite("tool_points", &KinematicChain::tool_points)
      .def_readwrite("cylinders", &KinematicChain::cylinders)
      .def_readwrite("end_transform", &KinematicChain::end_transform)
      .def("joint_count", &KinematicChain::joint_count)
      .def("validate", &KinematicChain::validate);

  m.def("mdh_transform", &mdh_transform, py::arg("joint"), py::arg("q"));
  m.def("forward_kinematics", &forward_kinematics, py::arg("chain"), py::arg("q"),
        py::arg("up_to"));
  m.def("forward_kinematics_to_end", &forward_kinematics_to_end, py::arg("chain"), py::arg("q"));
  m.def("joint_error_factor", &joint_error_factor, py::arg("joint"), py::arg("omega"));
  m.def("analytical_lump", &analytical_lump, py::arg("chain"), py::arg("q_meas"), py::arg("e"),
        py::arg("beta"));
  m.def("right_hand_lump", &right_hand_lump, py::arg("chain"), py::arg("q_meas"),
        py::arg("left_lump"));
  m.def("eye_in_hand_lump", &eye_in_hand_lump, py::arg("base_to_base_calib"),
        py::arg("camera_lump"), py::arg("tool_lump"));

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("fx", &CameraModel::fx)
      .def_readwrite("fy", &CameraModel::fy)
      .def_readwrite("cu", &CameraModel::cu)
      .def_readwrite("cv", &CameraModel::cv)
      .def_readwrite("width", &CameraModel::width)
      .def_readwrite("height", &CameraModel::height)
      .def_readwrite("extrinsic", &CameraModel::extrinsic);

  py::class_<PointFeature>(m, "PointFeature")
      .def(py::init<>())
      .def_readwrite("uv", &PointFeature::uv)
      .def_readwrite("confidence", &PointFeature::confidence);

  py::class_<EdgeFeature>(m, "EdgeFeature")
      .def(py::init([](double rho, double phi) { return EdgeFeature{rho, phi}; }),
           py::arg("rho") = 0.0, py::arg("phi") = 0.0)
      .def_readwrite("rho", &EdgeFeature::rho)
      .def_readwrite("phi", &EdgeFeature::phi);

  m.def("project_point", &project_point, py::arg("camera"), py::arg("point"));
  m.def("normalize_line", &normalize_line, py::arg("coef_u"), py::arg("coef_v"),
        py::arg("coef_1"));
  m.def("project_cylinder_edges", &project_cylinder_edges, py::arg("camera"), py::arg("radius"),
        py::arg("axis_direction"), py::arg("axis_point"));

  py::enum_<TrackingMode>(m, "TrackingMode")
      .value("AllUnknowns", TrackingMode::AllUnknowns)
      .value("Lumped", TrackingMode::Lumped)
      .value("LumpedPlusJoints", TrackingMode::LumpedPlusJoints);

  py::enum_<CameraMode>(m, "CameraMode")
      .value("Stationary", CameraMode::Stationary)
      .value("EyeInHand", CameraMode::EyeInHand);

  py::class_<FilterConfig>(m, "FilterConfig")
      .def(py::init<>())
      .def_readwrite("particle_count", &FilterConfig::particle_count)
      .def_readwrite("ess_threshold", &FilterConfig::ess_threshold)
      .def_readwrite("lump_init_cov", &FilterConfig::lump_init_cov)
      .def_readwrite("lump_step_cov", &FilterConfig::lump_step_cov)
      .def_readwrite("joint_error_bound", &FilterConfig::joint_error_bound)
      .def_readwrite("joint_error_step_cov", &FilterConfig::joint_error_step_cov)
      .def_readwrite("gamma_m", &FilterConfig::gamma_m)
      .def_readwrite("gamma_rho", &FilterConfig::gamma_rho)
      .def_readwrite("gamma_phi", &FilterConfig::gamma_phi)
      .def_readwrite("max_point_cost", &FilterConfig::max_point_cost)
      .def_readwrite("max_edge_cost", &FilterConfig::max_edge_cost)
      .def_readwrite("mode", &FilterConfig::mode);

  py::class_<CameraObservations>(m, "CameraObservations")
      .def(py::init<>())
      .def_readwrite("points", &CameraObservations::points)
      .def_readwrite("point_labels", &CameraObservations::point_labels)
      .def_readwrite("edges", &CameraObservations::edges);

  py::class_<StepInput>(m, "StepInput")
      .def(py::init<>())
      .def_readwrite("t", &StepInput::t)
      .def_readwrite("q_meas", &StepInput::q_meas)
      .def_readwrite("q_cam_meas", &StepInput::q_cam_meas)
      .def_readwrite("cameras", &StepInput::cameras);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("lump", &Estimate::lump)
      .def_readonly("joint_errors", &Estimate::joint_errors)
      .def_readonly("cam_joint_errors", &Estimate::cam_joint_errors)
      .def_readonly("ess_fraction", &Estimate::ess_fraction);

  py::class_<TrackerSetup>(m, "TrackerSetup")
      .def(py::init<>())
      .def_readwrite("chain", &TrackerSetup::chain)
      .def_readwrite("rig", &TrackerSetup::rig)
      .def_readwrite("camera_mode", &TrackerSetup::camera_mode)
      .def_readwrite("calibrated_base", &TrackerSetup::calibrated_base)
      .def_readwrite("camera_chain", &TrackerSetup::camera_chain);

  py::class_<ParticleTracker>(m, "ParticleTracker")
      .def(py::init<TrackerSetup, FilterConfig, std::uint64_t>(), py::arg("setup"),
           py::arg("config"), py::arg("seed"))
      .def("update", &ParticleTracker::update, py::arg("input"))
      .def("estimated_end_pose", &ParticleTracker::estimated_end_pose, py::arg("estimate"),
           py::arg("input"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("chain", &Scenario::chain)
      .def_readwrite("rig", &Scenario::rig)
      .def_readwrite("camera_mode", &Scenario::camera_mode)
      .def_readwrite("base_to_camera", &Scenario::base_to_camera)
      .def_readwrite("camera_chain", &Scenario::camera_chain)
      .def_readwrite("base_to_base", &Scenario::base_to_base)
      .def_readwrite("seed", &Scenario::seed);

  py::class_<TruthRow>(m, "TruthRow")
      .def_readonly("t", &TruthRow::t)
      .def_readonly("q_true", &TruthRow::q_true)
      .def_readonly("q_meas", &TruthRow::q_meas)
      .def_readonly("q_cam_meas", &TruthRow::q_cam_meas)
      .def_readonly("true_lump", &TruthRow::true_lump)
      .def_readonly("true_end_pose", &TruthRow::true_end_pose)
      .def_readonly("batches", &TruthRow::batches);

  py::class_<SceneSimulator>(m, "SceneSimulator")
      .def(py::init<Scenario, std::uint64_t>(), py::arg("scenario"), py::arg("seed"))
      .def("calibrated_base", &SceneSimulator::calibrated_base)
      .def("calibration_error", &SceneSimulator::calibration_error)
      .def("steps", &SceneSimulator::steps)
      .def("step", &SceneSimulator::step);

  m.def("davinci_scenario", &davinci_scenario, py::arg("camera_mode"));
  m.def("davinci_filter_config", &davinci_filter_config, py::arg("mode"), py::arg("camera_mode"));
  m.def("baxter_scenario", &baxter_scenario);
  m.def("baxter_filter_config", &baxter_filter_config, py::arg("mode"));

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("scenario", &ExperimentSpec::scenario)
      .def_readwrite("filter", &ExperimentSpec::filter)
      .def_readwrite("trials", &ExperimentSpec::trials)
      .def_readwrite("seed", &ExperimentSpec::seed)
      .def_readwrite("burn_in", &ExperimentSpec::burn_in);

  m.def(
      "run_experiment_csv",
      [](const ExperimentSpec& spec) { return result_csv_string(run_experiment(spec)); },
      py::arg("spec"), "Run an experiment and return the result CSV as a string");
}

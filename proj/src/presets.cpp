#include "lumptrack/presets.hpp"

#include <cmath>

namespace lumptrack {

namespace {

constexpr double kPi = M_PI;

VecX vec(std::initializer_list<double> values) {
  VecX v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

KinematicChain davinci_tool_chain() {
  KinematicChain chain;
  chain.joints = {
      {kPi / 2, 0.0, kPi / 2, 0.0, JointKind::Revolute},    // yaw about the remote center
      {-kPi / 2, 0.0, -kPi / 2, 0.0, JointKind::Revolute},  // pitch
      {kPi / 2, 0.0, 0.0, -431.8, JointKind::Prismatic},    // insertion
      {0.0, 0.0, 0.0, 416.2, JointKind::Revolute},          // instrument roll
      {-kPi / 2, 0.0, -kPi / 2, 0.0, JointKind::Revolute},  // wrist pitch
      {-kPi / 2, 9.1, -kPi / 2, 0.0, JointKind::Revolute},  // wrist yaw
      {-kPi / 2, 10.2, 0.0, 0.0, JointKind::Revolute},      // gripper
  };
  chain.n_b = 4;
  // Deliberately asymmetric constellation: no roll flip or jaw swap maps the
  // markers onto each other.
  chain.tool_points = {
      {5, Vec3(0.0, 12.0, 0.0)},  {5, Vec3(3.0, -8.0, 4.0)},  {6, Vec3(11.0, 0.0, 5.0)},
      {6, Vec3(-7.0, 2.0, 9.0)},  {7, Vec3(15.0, 0.0, 0.0)},  {7, Vec3(0.0, 10.0, 3.0)},
      {7, Vec3(-8.0, -4.0, 6.0)},
  };
  // Insertion shaft, anchored to the roll link; spans proximally from the wrist.
  chain.cylinders = {{4, 4.2, Vec3(0.0, 0.0, 1.0), Vec3(0.0, 0.0, -40.0)}};
  return chain;
}

KinematicChain davinci_camera_chain() {
  KinematicChain chain;
  chain.joints = {
      {kPi / 2, 0.0, kPi / 2, 0.0, JointKind::Revolute},
      {-kPi / 2, 0.0, -kPi / 2, 0.0, JointKind::Revolute},
      {kPi / 2, 0.0, 0.0, -382.5, JointKind::Prismatic},
      {0.0, 0.0, 0.0, 382.5, JointKind::Revolute},
  };
  chain.n_b = chain.joint_count();  // every camera-arm link is out of view
  // end_transform (last joint frame -> camera frame) stays identity: a
  // straight scope looking along the insertion axis.
  return chain;
}

std::vector<CameraModel> stereo_rig_540() {
  const double fx = 270.0 / std::tan(kPi / 6.0);  // 60 deg horizontal FOV
  CameraModel left;
  left.fx = fx;
  left.fy = fx;
  left.cu = 270.0;
  left.cv = 216.0;
  left.width = 540;
  left.height = 432;
  CameraModel right = left;
  right.extrinsic.translation = Vec3(-5.0, 0.0, 0.0);  // 5 mm baseline
  return {left, right};
}

VecX davinci_home() { return vec({0.0, 0.0, 115.6, 0.0, 0.0, 0.0, 0.35}); }

std::vector<JointCycle> davinci_tool_cycles() {
  return {
      {0.0, 0.10, 140.0, 0.0, 0.002},   // yaw
      {0.0, 0.08, 89.0, 0.7, 0.002},    // pitch
      {115.6, 12.0, 140.0, 2.1, 1.0},   // insertion, 1 mm positional jitter
      {0.0, 0.35, 110.0, 0.3, 0.0},     // roll
      {0.0, 0.15, 70.0, 1.1, 0.0},      // wrist pitch
      {0.0, 0.15, 55.0, 2.6, 0.0},      // wrist yaw
      {0.35, 0.30, 70.0, 0.0, 0.0},     // gripper open/close
  };
}

NoiseModel davinci_noise() {
  NoiseModel noise;
  noise.calib_cov << 0.005, 0.005, 0.005, 5.0, 5.0, 5.0;
  noise.joint_bias_bound = vec({0.004, 0.004, 2.0, 0.004, 0.004, 0.004, 0.01});
  noise.cable_stretch = vec({0.02, 0.02, 0.0025, 0.02, 0.02, 0.02, 0.05});
  noise.cam_joint_bias_bound = vec({0.004, 0.004, 2.0, 0.004});
  noise.cam_joint_sigma = vec({0.0075, 0.0075, 0.75, 0.0075});
  noise.detection.pixel_sigma = 0.5;
  noise.detection.rho_sigma = 0.5;
  noise.detection.phi_sigma = 0.002;
  noise.detection.dropout = 0.05;
  noise.detection.false_positive_rate = 1.0;
  return noise;
}

}  // namespace

RigidTransform look_at_base_to_camera(const Vec3& camera_position, const Vec3& target,
                                      const Vec3& up_hint) {
  const Vec3 z = (target - camera_position).normalized();
  Vec3 x = up_hint.cross(z);
  if (x.norm() < 1e-9) {
    x = Vec3::UnitX().cross(z);
  }
  x.normalize();
  const Vec3 y = z.cross(x);
  RigidTransform camera_in_base;
  camera_in_base.rotation.col(0) = x;
  camera_in_base.rotation.col(1) = y;
  camera_in_base.rotation.col(2) = z;
  camera_in_base.translation = camera_position;
  return camera_in_base.inverse();
}

Scenario davinci_scenario(CameraMode camera_mode) {
  Scenario s;
  s.chain = davinci_tool_chain();
  s.rig = stereo_rig_540();
  s.camera_mode = camera_mode;
  s.noise = davinci_noise();
  s.trajectory.steps = 140;
  s.trajectory.tool_cycles = davinci_tool_cycles();
  s.trajectory.walk_max_angle = 0.07;
  s.trajectory.walk_joints = {3, 4, 5};  // roll and the two wrist joints

  // Aim the camera at the wrist cluster from 100 mm away, tilted off the
  // shaft axis so the silhouette stays two distinct lines.
  const VecX home = davinci_home();
  const auto poses = link_poses(s.chain, RigidTransform::identity(), home);
  const Vec3 wrist = poses[5].translation;
  const Vec3 shaft_axis = poses[4].rotation.col(2);
  const Vec3 side = poses[4].rotation.col(0);
  const Vec3 target = wrist + 8.0 * shaft_axis;
  const Vec3 camera_position = target - 100.0 * (0.77 * shaft_axis + 0.64 * side).normalized();
  const RigidTransform base_to_camera =
      look_at_base_to_camera(camera_position, target, poses[4].rotation.col(1));

  if (camera_mode == CameraMode::Stationary) {
    s.base_to_camera = base_to_camera;
  } else {
    s.camera_chain = davinci_camera_chain();
    s.trajectory.cam_cycles = {
        {0.0, 0.04, 70.0, 0.0, 0.0},
        {0.0, 0.03, 97.0, 1.3, 0.0},
        {50.0, 6.0, 140.0, 0.6, 0.0},
        {0.0, 0.06, 120.0, 2.2, 0.0},
    };
    VecX cam_home(4);
    cam_home << 0.0, 0.0, 50.0, 0.0;
    // Choose the base-to-base transform so the camera-arm home reproduces
    // the stationary viewpoint.
    const RigidTransform camera_in_arm_base =
        forward_kinematics_to_end(s.camera_chain, cam_home);
    s.base_to_base = camera_in_arm_base * base_to_camera;
  }
  return s;
}

FilterConfig davinci_filter_config(TrackingMode mode, CameraMode camera_mode) {
  FilterConfig c;
  c.particle_count = 1000;
  c.ess_threshold = 0.5;
  const double scale = camera_mode == CameraMode::EyeInHand ? 2.0 : 1.0;
  c.lump_step_cov << 0.005, 0.005, 0.005, 0.25, 0.25, 0.25;
  c.lump_step_cov *= scale;
  c.lump_init_cov = 10.0 * c.lump_step_cov;
  c.joint_error_bound = vec({0.004, 0.004, 2.0, 0.004, 0.004, 0.004, 0.01});
  c.joint_error_step_cov = vec({0.0025, 0.0025, 1.0, 0.0025, 0.0025, 0.0025, 0.005});
  c.cam_joint_error_bound = vec({0.004, 0.004, 2.0, 0.004});
  c.cam_joint_error_step_cov = vec({0.01, 0.01, 2.5, 0.01});
  c.gamma_m = 0.15;
  c.gamma_phi = 40.0;
  c.gamma_rho = 0.1;
  c.max_point_cost = 25.0 * c.gamma_m;
  c.max_edge_cost = 0.1 * c.gamma_phi + 25.0 * c.gamma_rho;
  c.mode = mode;
  return c;
}

Scenario baxter_scenario() {
  Scenario s;
  KinematicChain chain;
  chain.joints = {
      {0.0, 0.0, 0.0, 270.35, JointKind::Revolute},
      {-kPi / 2, 69.0, kPi / 2, 0.0, JointKind::Revolute},
      {kPi / 2, 0.0, 0.0, 364.35, JointKind::Revolute},
      {-kPi / 2, 69.0, 0.0, 0.0, JointKind::Revolute},
      {kPi / 2, 0.0, 0.0, 374.29, JointKind::Revolute},
      {-kPi / 2, 10.0, 0.0, 0.0, JointKind::Revolute},
      {kPi / 2, 0.0, 0.0, 229.525, JointKind::Revolute},
  };
  chain.n_b = 6;
  chain.tool_points = {
      {7, Vec3(30.0, 0.0, -10.0)}, {7, Vec3(0.0, 30.0, -10.0)},  {7, Vec3(-30.0, 0.0, -10.0)},
      {7, Vec3(0.0, -30.0, -10.0)}, {7, Vec3(0.0, 0.0, 15.0)},
  };
  s.chain = chain;

  CameraModel camera;
  camera.fx = 480.0 / std::tan(kPi / 6.0);
  camera.fy = camera.fx;
  camera.cu = 480.0;
  camera.cv = 270.0;
  camera.width = 960;
  camera.height = 540;
  s.rig = {camera};

  s.trajectory.steps = 140;
  s.trajectory.tool_cycles = {
      {0.2, 0.15, 140.0, 0.0, 0.002},  {-0.5, 0.12, 97.0, 0.9, 0.002},
      {0.1, 0.15, 120.0, 1.7, 0.0},    {1.0, 0.20, 140.0, 0.4, 0.0},
      {0.0, 0.20, 80.0, 2.3, 0.0},     {0.4, 0.18, 65.0, 1.1, 0.0},
      {0.0, 0.25, 90.0, 0.0, 0.0},
  };

  NoiseModel noise;
  noise.calib_cov << 0.005, 0.005, 0.005, 5.0, 5.0, 5.0;
  noise.joint_bias_bound = VecX::Constant(7, 0.01);
  noise.cable_stretch = VecX::Zero(7);
  noise.detection.pixel_sigma = 1.0;
  noise.detection.rho_sigma = 0.0;
  noise.detection.phi_sigma = 0.0;
  noise.detection.dropout = 0.1;
  noise.detection.false_positive_rate = 0.0;  // detections arrive pre-associated
  noise.detection.confidence_features = true;
  s.noise = noise;

  // Camera ~0.8 m out, looking at the wrist cluster of the home pose.
  VecX home(7);
  home << 0.2, -0.5, 0.1, 1.0, 0.0, 0.4, 0.0;
  const auto poses = link_poses(s.chain, RigidTransform::identity(), home);
  const Vec3 target = poses[7].translation;
  const Vec3 camera_position = target + Vec3(500.0, 350.0, 300.0);
  s.base_to_camera = look_at_base_to_camera(camera_position, target, Vec3::UnitZ());
  return s;
}

FilterConfig baxter_filter_config(TrackingMode mode) {
  FilterConfig c;
  c.particle_count = 200;
  c.ess_threshold = 0.5;
  c.lump_step_cov << 0.001, 0.001, 0.001, 0.25, 0.25, 0.25;
  c.lump_init_cov = 10.0 * c.lump_step_cov;
  c.joint_error_bound = VecX::Constant(7, 0.01);
  c.joint_error_step_cov = VecX::Constant(7, 0.001);
  c.gamma_m = 5.0;
  c.max_point_cost = 25.0 * c.gamma_m;
  c.mode = mode;
  c.observation = ObservationVariant::ConfidenceWeighted;
  return c;
}

Scenario davinci_servo_scenario() {
  Scenario s = davinci_scenario(CameraMode::Stationary);
  // Joint biases and cable stretch stay; detections are clean so the
  // regulator's terminal accuracy reflects tracking, not detector noise.
  s.noise.detection.pixel_sigma = 0.0;
  s.noise.detection.rho_sigma = 0.0;
  s.noise.detection.phi_sigma = 0.0;
  s.noise.detection.dropout = 0.0;
  s.noise.detection.false_positive_rate = 0.0;
  return s;
}

FilterConfig davinci_servo_filter_config() {
  FilterConfig c = davinci_filter_config(TrackingMode::Lumped, CameraMode::Stationary);
  // Clean features support a sharp likelihood and a tight random walk, which
  // the sub-millimeter servo tolerance needs; the annealed phase covers the
  // initial search before the walk narrows.
  c.particle_count = 2000;
  c.gamma_m = 0.5;
  c.max_point_cost = 50.0;  // 10 px gate: partial credit guides the search in
  c.lump_step_cov << 1e-5, 1e-5, 1e-5, 0.01, 0.01, 0.01;
  c.lump_init_cov << 0.05, 0.05, 0.05, 2.5, 2.5, 2.5;
  c.anneal_steps = 80;
  c.anneal_scale = 100.0;
  return c;
}

}  // namespace lumptrack

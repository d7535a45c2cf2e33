#include "lumptrack/lump.hpp"

#include <string>

#include "lumptrack/errors.hpp"

namespace lumptrack {

RigidTransform analytical_lump(const KinematicChain& chain, const VecX& q_meas, const VecX& e,
                               const VecX& beta) {
  const int n = chain.joint_count();
  if (beta.size() != chain.n_b) {
    throw InvalidInputError("analytical_lump: beta has " + std::to_string(beta.size()) +
                            " entries, chain n_b is " + std::to_string(chain.n_b));
  }
  if (q_meas.size() < chain.n_b || e.size() < chain.n_b || q_meas.size() > n || e.size() > n) {
    throw InvalidInputError("analytical_lump: joint vector size mismatch");
  }
  RigidTransform lump;
  RigidTransform prefix;  // prod_{i<k} T(q_meas_i + beta_i e_i)
  for (int k = 0; k < chain.n_b; ++k) {
    const RigidTransform factor = joint_error_factor(chain.joints[k], (1.0 - beta[k]) * e[k]);
    lump = lump * (prefix * factor * prefix.inverse());
    prefix = prefix * mdh_transform(chain.joints[k], q_meas[k] + beta[k] * e[k]);
  }
  return lump;
}

RigidTransform right_hand_lump(const KinematicChain& chain, const VecX& q_meas,
                               const RigidTransform& left_lump) {
  if (q_meas.size() < chain.n_b) {
    throw InvalidInputError("right_hand_lump: joint vector shorter than n_b");
  }
  RigidTransform fold;
  for (int i = 0; i < chain.n_b; ++i) {
    fold = fold * mdh_transform(chain.joints[i], q_meas[i]);
  }
  return fold.inverse() * left_lump * fold;
}

AxisAnglePose eye_in_hand_lump(const RigidTransform& base_to_base_calib,
                               const AxisAnglePose& camera_lump, const AxisAnglePose& tool_lump) {
  const RigidTransform combined = base_to_base_calib.inverse() *
                                  RigidTransform::from_pose(camera_lump).inverse() *
                                  base_to_base_calib * RigidTransform::from_pose(tool_lump);
  return combined.to_pose();
}

}  // namespace lumptrack

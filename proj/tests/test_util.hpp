#pragma once

#include <random>

#include "tendon/kinematics.hpp"
#include "tendon/types.hpp"

namespace tendon::testutil {

inline JointConfig random_admissible(const ManipulatorSpec& spec, std::mt19937_64& rng,
                                     double margin_frac = 1.0) {
    const auto& lim = spec.joint_limits;
    Vec5 v;
    for (int j = 0; j < 5; ++j) {
        std::uniform_real_distribution<double> u(margin_frac * lim.min[j],
                                                 margin_frac * lim.max[j]);
        v[j] = u(rng);
    }
    if (v[3] > v[4]) std::swap(v[3], v[4]);
    return JointConfig::from_vec(v);
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double pose_diff(const RigidTransform& a, const RigidTransform& b) {
    return std::max((a.p - b.p).cwiseAbs().maxCoeff(), max_abs_diff(a.R, b.R));
}

inline bool is_rotation(const Mat3& R, double tol = 1e-9) {
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
           std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace tendon::testutil

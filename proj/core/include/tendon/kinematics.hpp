#pragma once

#include <array>

#include "tendon/errors.hpp"
#include "tendon/types.hpp"

namespace tendon {

/// Geometry of one circular flexure hinge module (all mm).
struct FlexureHingeParams {
    double h = 0.5;   // height between notches
    double l = 0.7;   // disk thickness
    double R = 0.35;  // hinge round radius
    double t = 0.4;   // front thickness
    double b = 1.3;   // side thickness
    double r = 2.4;   // module radius
};

struct JointLimits {
    std::array<double, 5> min{};
    std::array<double, 5> max{};

    bool contains(const JointConfig& q) const {
        const Vec5 v = q.vec();
        for (int j = 0; j < 5; ++j)
            if (v[j] < min[j] - 1e-12 || v[j] > max[j] + 1e-12) return false;
        return true;
    }
    double span_max_abs(int j) const {
        return std::max(std::abs(min[j]), std::abs(max[j]));
    }
};

/// Two bending segments plus forceps. n1/n2 are hinge-module counts.
struct ManipulatorSpec {
    int n1 = 8;
    int n2 = 3;
    FlexureHingeParams hinge{};
    double forceps_length = 5.0;  // rotation center to tip, mm
    JointLimits joint_limits = default_limits(8, 3);

    static JointLimits default_limits(int n1, int n2) {
        const double e = 5.5;  // single-hinge bending angle, deg
        JointLimits lim;
        lim.min = {-e * n1, -e * n1, -e * n2, -90.0, -90.0};
        lim.max = {e * n1, e * n1, e * n2, 90.0, 90.0};
        return lim;
    }
    /// Straight-pose backbone length base to forceps tip, mm.
    double straight_length() const;
};

/// One modified-DH row: alpha_{k-1} (rad), a_{k-1} (mm), d_k (mm), theta_k (rad).
struct DHRow {
    double alpha = 0.0;
    double a = 0.0;
    double d = 0.0;
    double theta = 0.0;
};

/// Equivalent translation of a hinge bent by theta (rad):
/// l*cos(theta/2) + (2h/theta)*sin(theta/2), with the removable theta=0
/// singularity evaluated by series below the switchover.
double tr_length(double theta, const FlexureHingeParams& hinge);

/// Modified-DH elementary transform,
/// equal to Rot_x(alpha) * Trans_x(a) * Rot_z(theta) * Trans_z(d).
RigidTransform dh_transform(const DHRow& row);

/// One segment-1 module: 8-frame DH chain bending theta_p (pitch) then
/// theta_y (yaw), both rad. Expressed in module-local coordinates with the
/// backbone along +x.
RigidTransform module_transform_seg1(double theta_p, double theta_y,
                                     const FlexureHingeParams& hinge);

/// One segment-2 module: the bend/translate/bend core conjugated by the same
/// axis roll segment 1 uses, so the wrist bends in the pitch plane.
RigidTransform module_transform_seg2(double theta_p, const FlexureHingeParams& hinge);

/// Base-to-end-effector pose. Base frame has +z along the straight backbone;
/// pitch bends keep the tip in the y=0 plane. The forceps contribute the yaw
/// rotation q_yaw=(q4+q5)/2 and the tip offset; grip opening does not move
/// the end-effector frame.
RigidTransform forward_kinematics(const JointConfig& q, const ManipulatorSpec& spec);
RigidTransform forward_kinematics(const ReducedJointConfig& q, const ManipulatorSpec& spec);

/// Pose of the forceps rotation center (chain end before the forceps), used
/// by the synthetic marker rig.
RigidTransform wrist_transform(const ReducedJointConfig& q, const ManipulatorSpec& spec);

struct IKOptions {
    double tolerance = 1e-3;        // on the weighted residual norm
    int max_iter = 100;
    double rot_weight = 10.0;       // mm per rad
    double damping = 1e-6;          // added to J^T J
    double fd_step = 1e-3;          // deg, central differences
};

struct IKResult {
    ReducedJointConfig q;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton-Raphson on the 6-dim weighted pose residual
/// [position error (mm); rot_weight * axis-angle(R_cur^T R_target)].
/// Runs to tolerance or stall and reports; never throws.
IKResult solve_ik(const RigidTransform& target, const ReducedJointConfig& q_init,
                  const ManipulatorSpec& spec, const IKOptions& opts = {});

/// Contract wrapper: returns the solution or throws NoConvergence.
ReducedJointConfig inverse_kinematics(const RigidTransform& target,
                                      const ReducedJointConfig& q_init,
                                      const ManipulatorSpec& spec,
                                      const IKOptions& opts = {});

}  // namespace tendon

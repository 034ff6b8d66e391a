#include "tendon/kinematics.hpp"

#include <cmath>

namespace tendon {
namespace {

// Alignment between the DH chain (backbone along +x) and the robot base
// frame (backbone along +z). The whole chain is conjugated by this rotation.
const RigidTransform kChainToBase = RigidTransform::rot_y(-0.5 * kPi);

RigidTransform conjugate_to_base(const RigidTransform& chain) {
    return kChainToBase * chain * kChainToBase.inverse();
}

// Roll that lets the Rot_z DH joints implement a pitch bend (Table frames 1/5).
const RigidTransform kPitchRoll = RigidTransform::rot_x(0.5 * kPi);
const RigidTransform kPitchRollInv = RigidTransform::rot_x(-0.5 * kPi);

}  // namespace

double ManipulatorSpec::straight_length() const {
    const double unit = hinge.l + hinge.h;
    return n1 * 2.0 * unit + n2 * unit + forceps_length;
}

double tr_length(double theta, const FlexureHingeParams& hinge) {
    const double u = 0.5 * theta;
    if (std::abs(theta) < 1e-4) {
        const double u2 = u * u;
        const double c = 1.0 - u2 / 2.0 + u2 * u2 / 24.0;
        const double sinc = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
        return hinge.l * c + hinge.h * sinc;
    }
    return hinge.l * std::cos(u) + (2.0 * hinge.h / theta) * std::sin(u);
}

RigidTransform dh_transform(const DHRow& row) {
    const double ct = std::cos(row.theta), st = std::sin(row.theta);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    RigidTransform T;
    T.R << ct, -st, 0.0,
           st * ca, ct * ca, -sa,
           st * sa, ct * sa, ca;
    T.p << row.a, -row.d * sa, row.d * ca;
    return T;
}

RigidTransform module_transform_seg1(double theta_p, double theta_y,
                                     const FlexureHingeParams& hinge) {
    const double tr_p = tr_length(theta_p, hinge);
    const double tr_y = tr_length(theta_y, hinge);
    const DHRow rows[8] = {
        {0.5 * kPi, 0.0, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.5 * theta_p},
        {0.0, tr_p, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.5 * theta_p},
        {-0.5 * kPi, 0.0, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.5 * theta_y},
        {0.0, tr_y, 0.0, 0.0},
        {0.0, 0.0, 0.0, 0.5 * theta_y},
    };
    RigidTransform T;
    for (const auto& r : rows) T = T * dh_transform(r);
    return T;
}

RigidTransform module_transform_seg2(double theta_p, const FlexureHingeParams& hinge) {
    const double tr = tr_length(theta_p, hinge);
    RigidTransform core;
    core = dh_transform({0.0, 0.0, 0.0, 0.5 * theta_p});
    core = core * dh_transform({0.0, tr, 0.0, 0.0});
    core = core * dh_transform({0.0, 0.0, 0.0, 0.5 * theta_p});
    // conjugated by the segment-1 roll so the wrist bends in the pitch plane
    return kPitchRoll * core * kPitchRollInv;
}

RigidTransform wrist_transform(const ReducedJointConfig& q, const ManipulatorSpec& spec) {
    const double tp1 = deg2rad(q.q1) / spec.n1;
    const double ty1 = deg2rad(q.q2) / spec.n1;
    const double tp2 = deg2rad(q.q3) / spec.n2;

    RigidTransform chain;
    const RigidTransform m1 = module_transform_seg1(tp1, ty1, spec.hinge);
    for (int i = 0; i < spec.n1; ++i) chain = chain * m1;
    const RigidTransform m2 = module_transform_seg2(tp2, spec.hinge);
    for (int i = 0; i < spec.n2; ++i) chain = chain * m2;
    return conjugate_to_base(chain);
}

RigidTransform forward_kinematics(const ReducedJointConfig& q, const ManipulatorSpec& spec) {
    RigidTransform T = wrist_transform(q, spec);
    T = T * RigidTransform::rot_x(deg2rad(q.q_yaw));
    T = T * RigidTransform::translation({0.0, 0.0, spec.forceps_length});
    return T;
}

RigidTransform forward_kinematics(const JointConfig& q, const ManipulatorSpec& spec) {
    return forward_kinematics(ReducedJointConfig::from_full(q), spec);
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 pose_residual(const RigidTransform& cur, const RigidTransform& target, double w_rot) {
    Vec6 e;
    e.head<3>() = cur.p - target.p;
    e.tail<3>() = w_rot * rotation_log(cur.R.transpose() * target.R);
    return e;
}

}  // namespace

IKResult solve_ik(const RigidTransform& target, const ReducedJointConfig& q_init,
                  const ManipulatorSpec& spec, const IKOptions& opts) {
    Eigen::Vector4d q = q_init.vec();
    IKResult out;

    auto residual = [&](const Eigen::Vector4d& v) {
        return pose_residual(forward_kinematics(ReducedJointConfig::from_vec(v), spec),
                             target, opts.rot_weight);
    };

    Vec6 e = residual(q);
    out.residual = e.norm();

    for (int it = 0; it < opts.max_iter; ++it) {
        if (out.residual < opts.tolerance) {
            out.converged = true;
            break;
        }
        Eigen::Matrix<double, 6, 4> J;
        for (int j = 0; j < 4; ++j) {
            Eigen::Vector4d qp = q, qm = q;
            qp[j] += opts.fd_step;
            qm[j] -= opts.fd_step;
            J.col(j) = (residual(qp) - residual(qm)) / (2.0 * opts.fd_step);
        }
        const Eigen::Matrix4d JtJ =
            J.transpose() * J + opts.damping * Eigen::Matrix4d::Identity();
        const Eigen::Vector4d step = JtJ.ldlt().solve(J.transpose() * e);
        q -= step;
        e = residual(q);
        out.residual = e.norm();
        out.iterations = it + 1;
        if (step.norm() < 1e-12) break;  // stalled (least-squares optimum)
    }
    if (out.residual < opts.tolerance) out.converged = true;
    out.q = ReducedJointConfig::from_vec(q);
    return out;
}

ReducedJointConfig inverse_kinematics(const RigidTransform& target,
                                      const ReducedJointConfig& q_init,
                                      const ManipulatorSpec& spec, const IKOptions& opts) {
    const IKResult r = solve_ik(target, q_init, spec, opts);
    if (!r.converged) throw NoConvergence(r.iterations, r.residual);
    return r.q;
}

}  // namespace tendon

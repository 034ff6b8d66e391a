#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace tendon {

using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// 5-DOF joint vector in degrees: segment-1 pitch/yaw, segment-2 pitch,
/// left and right forceps angles.
struct JointConfig {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double q4 = 0.0;
    double q5 = 0.0;

    double yaw() const { return 0.5 * (q4 + q5); }
    double grip() const { return q5 - q4; }

    Vec5 vec() const {
        Vec5 v;
        v << q1, q2, q3, q4, q5;
        return v;
    }
    static JointConfig from_vec(const Vec5& v) {
        return JointConfig{v[0], v[1], v[2], v[3], v[4]};
    }
};

/// 4-vector consumed by the numerical IK: q1, q2, q3, q_yaw (degrees).
struct ReducedJointConfig {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double q_yaw = 0.0;

    Eigen::Vector4d vec() const { return {q1, q2, q3, q_yaw}; }
    static ReducedJointConfig from_vec(const Eigen::Vector4d& v) {
        return ReducedJointConfig{v[0], v[1], v[2], v[3]};
    }
    static ReducedJointConfig from_full(const JointConfig& q) {
        return ReducedJointConfig{q.q1, q.q2, q.q3, q.yaw()};
    }
    /// Expand back to a full config given a grip opening (deg).
    JointConfig to_full(double grip) const {
        return JointConfig{q1, q2, q3, q_yaw - 0.5 * grip, q_yaw + 0.5 * grip};
    }
};

/// Rotation + translation, millimetres.
struct RigidTransform {
    Mat3 R = Mat3::Identity();
    Vec3 p = Vec3::Zero();

    RigidTransform operator*(const RigidTransform& o) const {
        return {R * o.R, R * o.p + p};
    }
    RigidTransform inverse() const { return {R.transpose(), -(R.transpose() * p)}; }
    Vec3 apply(const Vec3& x) const { return R * x + p; }

    static RigidTransform identity() { return {}; }
    static RigidTransform rot_x(double rad) {
        RigidTransform t;
        t.R = Eigen::AngleAxisd(rad, Vec3::UnitX()).toRotationMatrix();
        return t;
    }
    static RigidTransform rot_y(double rad) {
        RigidTransform t;
        t.R = Eigen::AngleAxisd(rad, Vec3::UnitY()).toRotationMatrix();
        return t;
    }
    static RigidTransform rot_z(double rad) {
        RigidTransform t;
        t.R = Eigen::AngleAxisd(rad, Vec3::UnitZ()).toRotationMatrix();
        return t;
    }
    static RigidTransform translation(const Vec3& v) { return {Mat3::Identity(), v}; }
};

/// Axis-angle vector of a rotation matrix (radians). Robust near 0 and pi.
Vec3 rotation_log(const Mat3& R);

/// Geodesic angle between two rotations, degrees.
double rotation_angle_deg(const Mat3& Ra, const Mat3& Rb);

/// Nearest rotation matrix in Frobenius norm (SVD projection).
/// If deviation is non-null it receives ||M - R||_F of the input.
Mat3 closest_rotation(const Mat3& M, double* deviation = nullptr);

}  // namespace tendon

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tendon/kinematics.hpp"
#include "test_util.hpp"

using namespace tendon;
using namespace tendon::testutil;

namespace {

const FlexureHingeParams kHinge{};  // catalog values

// independent recomposition of one segment-1 module straight from the DH rows
RigidTransform seg1_module_oracle(double tp, double ty, const FlexureHingeParams& h) {
    const double trp = h.l * std::cos(tp / 2) + (tp == 0.0 ? h.h : (2 * h.h / tp) * std::sin(tp / 2));
    const double try_ = h.l * std::cos(ty / 2) + (ty == 0.0 ? h.h : (2 * h.h / ty) * std::sin(ty / 2));
    RigidTransform T;
    T = T * dh_transform({kPi / 2, 0, 0, 0});
    T = T * dh_transform({0, 0, 0, tp / 2});
    T = T * dh_transform({0, trp, 0, 0});
    T = T * dh_transform({0, 0, 0, tp / 2});
    T = T * dh_transform({-kPi / 2, 0, 0, 0});
    T = T * dh_transform({0, 0, 0, ty / 2});
    T = T * dh_transform({0, try_, 0, 0});
    T = T * dh_transform({0, 0, 0, ty / 2});
    return T;
}

}  // namespace

TEST_CASE("tr_length at zero bend is the straight module height l + h") {
    CHECK(tr_length(0.0, kHinge) == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("tr_length matches the high-precision oracle value at 5.5 deg") {
    // frozen 40-digit evaluation of the closed form at 5.5 deg
    const double theta = 5.5 * kPi / 180.0;
    CHECK(tr_length(theta, kHinge) == doctest::Approx(1.1990019202138744).epsilon(1e-13));
    CHECK(tr_length(0.3, kHinge) == doctest::Approx(1.1902668628005603).epsilon(1e-13));
}

TEST_CASE("tr_length is even in theta") {
    for (const double t : {0.3, 0.05, 1e-3, 1e-5}) {
        CHECK(tr_length(t, kHinge) == doctest::Approx(tr_length(-t, kHinge)).epsilon(1e-15));
    }
}

TEST_CASE("tr_length is continuous across the series switchover") {
    const double lo = tr_length(1e-4 * (1.0 - 1e-9), kHinge);
    const double hi = tr_length(1e-4 * (1.0 + 1e-9), kHinge);
    CHECK(std::abs(hi - lo) < 1e-9);
}

TEST_CASE("dh_transform of the zero row is the identity") {
    const RigidTransform T = dh_transform({});
    CHECK(pose_diff(T, RigidTransform::identity()) < 1e-15);
}

TEST_CASE("dh_transform with alpha=pi/2 alone is a pure x rotation") {
    const RigidTransform T = dh_transform({kPi / 2, 0, 0, 0});
    CHECK(pose_diff(T, RigidTransform::rot_x(kPi / 2)) < 1e-15);
}

TEST_CASE("dh_transform equals RotX * TransX * RotZ * TransZ on random rows") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const DHRow row{u(rng), 10.0 * u(rng), 10.0 * u(rng), u(rng)};
        const RigidTransform oracle = RigidTransform::rot_x(row.alpha) *
                                      RigidTransform::translation({row.a, 0, 0}) *
                                      RigidTransform::rot_z(row.theta) *
                                      RigidTransform::translation({0, 0, row.d});
        CHECK(pose_diff(dh_transform(row), oracle) < 1e-12);
        CHECK(is_rotation(dh_transform(row).R, 1e-12));
    }
}

TEST_CASE("straight segment-1 module translates 2(l+h) along the module axis") {
    const RigidTransform T = module_transform_seg1(0.0, 0.0, kHinge);
    CHECK(max_abs_diff(T.R, Mat3::Identity()) < 1e-15);
    CHECK((T.p - Vec3(2.4, 0.0, 0.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pitch-only module bending stays out of the yaw plane") {
    const RigidTransform T = module_transform_seg1(0.05, 0.0, kHinge);
    CHECK(std::abs(T.p.y()) < 1e-14);              // no yaw-plane translation
    CHECK((T.R * Vec3::UnitY() - Vec3::UnitY()).norm() < 1e-14);  // rotation keeps y
}

TEST_CASE("segment-1 module equals the explicit 8-matrix product") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.096, 0.096);
    CHECK(pose_diff(module_transform_seg1(0.05, 0.05, kHinge),
                    seg1_module_oracle(0.05, 0.05, kHinge)) < 1e-13);
    for (int i = 0; i < 20; ++i) {
        const double tp = u(rng), ty = u(rng);
        CHECK(pose_diff(module_transform_seg1(tp, ty, kHinge),
                        seg1_module_oracle(tp, ty, kHinge)) < 1e-13);
    }
}

TEST_CASE("straight-pose forward kinematics points along base z") {
    const ManipulatorSpec spec{};
    const RigidTransform T = forward_kinematics(JointConfig{}, spec);
    CHECK(max_abs_diff(T.R, Mat3::Identity()) < 1e-12);
    CHECK((T.p - Vec3(0.0, 0.0, spec.straight_length())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pure pitch commands keep the end effector in the pitch plane") {
    const ManipulatorSpec spec{};
    for (const double q1 : {-40.0, -10.0, 25.0, 60.0}) {
        for (const double q3 : {-15.0, 0.0, 12.0}) {
            const RigidTransform T = forward_kinematics(JointConfig{q1, 0, q3, 0, 0}, spec);
            CHECK(std::abs(T.p.y()) < 1e-10);
        }
    }
}

TEST_CASE("forward kinematics equals an independently chained module product") {
    const ManipulatorSpec spec{};
    std::mt19937_64 rng(17);
    for (int i = 0; i < 25; ++i) {
        const JointConfig q = random_admissible(spec, rng);

        RigidTransform chain;
        const double tp1 = deg2rad(q.q1) / spec.n1, ty1 = deg2rad(q.q2) / spec.n1;
        for (int m = 0; m < spec.n1; ++m) chain = chain * seg1_module_oracle(tp1, ty1, spec.hinge);
        const double tp2 = deg2rad(q.q3) / spec.n2;
        const RigidTransform roll = RigidTransform::rot_x(kPi / 2);
        for (int m = 0; m < spec.n2; ++m) {
            RigidTransform core = dh_transform({0, 0, 0, tp2 / 2});
            core = core * dh_transform({0, tr_length(tp2, spec.hinge), 0, 0});
            core = core * dh_transform({0, 0, 0, tp2 / 2});
            chain = chain * (roll * core * roll.inverse());
        }
        chain = chain * RigidTransform::rot_z(-deg2rad(q.yaw()));
        chain = chain * RigidTransform::translation({spec.forceps_length, 0, 0});
        const RigidTransform align = RigidTransform::rot_y(-kPi / 2);
        const RigidTransform oracle = align * chain * align.inverse();

        CHECK(pose_diff(forward_kinematics(q, spec), oracle) < 1e-10);
        CHECK(is_rotation(forward_kinematics(q, spec).R, 1e-9));
    }
}

TEST_CASE("reach is maximal at the straight pose") {
    const ManipulatorSpec spec{};
    std::mt19937_64 rng(23);
    const double straight = forward_kinematics(JointConfig{}, spec).p.norm();
    for (int i = 0; i < 100; ++i) {
        const JointConfig q = random_admissible(spec, rng);
        for (const double t : {0.25, 0.5, 1.0}) {
            const JointConfig qt = JointConfig::from_vec(t * q.vec());
            CHECK(forward_kinematics(qt, spec).p.norm() <= straight + 1e-9);
        }
    }
}

TEST_CASE("IK returns the straight pose as a fixed point") {
    const ManipulatorSpec spec{};
    const RigidTransform target = forward_kinematics(ReducedJointConfig{}, spec);
    const ReducedJointConfig q = inverse_kinematics(target, ReducedJointConfig{}, spec);
    CHECK(q.vec().cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("IK recovers randomly sampled configurations from a noisy start") {
    const ManipulatorSpec spec{};
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> noise(-2.0, 2.0);
    for (int i = 0; i < 60; ++i) {
        const JointConfig q = random_admissible(spec, rng, 0.9);
        const ReducedJointConfig q_star = ReducedJointConfig::from_full(q);
        const RigidTransform target = forward_kinematics(q_star, spec);
        ReducedJointConfig init = q_star;
        init.q1 += noise(rng);
        init.q2 += noise(rng);
        init.q3 += noise(rng);
        init.q_yaw += noise(rng);
        const ReducedJointConfig sol = inverse_kinematics(target, init, spec);
        CHECK((sol.vec() - q_star.vec()).cwiseAbs().maxCoeff() < 0.01);
    }
}

TEST_CASE("IK reports NoConvergence on an unreachable target") {
    const ManipulatorSpec spec{};
    RigidTransform target;
    target.p = Vec3(0.0, 0.0, 10.0 * spec.straight_length());
    CHECK_THROWS_AS(inverse_kinematics(target, ReducedJointConfig{}, spec), NoConvergence);
}

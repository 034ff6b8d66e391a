#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "tendon/perception.hpp"
#include "test_util.hpp"

using namespace tendon;
using namespace tendon::testutil;

namespace {

const ManipulatorSpec kSpec{};
const MarkerRig kRig{};

std::vector<Vec3> raw_points(const LabeledPointCloud& c) {
    std::vector<Vec3> out;
    for (const auto& lp : c.points) out.push_back(lp.p);
    return out;
}

RigidTransform random_motion(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 axis(g(rng), g(rng), g(rng));
    axis.normalize();
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    RigidTransform T;
    T.R = Eigen::AngleAxisd(ang(rng), axis).toRotationMatrix();
    T.p = 50.0 * Vec3(g(rng), g(rng), g(rng));
    return T;
}

}  // namespace

TEST_CASE("noiseless clouds lie exactly on the sphere") {
    std::mt19937_64 rng(1);
    const Vec3 c(10, -5, 80);
    const auto cloud = synth_cloud(c, 4.0, MarkerId::R0, Vec3::Zero(), 200, 0.0, 0.0, rng);
    CHECK(cloud.points.size() == 200);
    for (const auto& lp : cloud.points)
        CHECK(std::abs((lp.p - c).norm() - 4.0) < 1e-12);
}

TEST_CASE("requested outlier fraction violates the sphere equation") {
    std::mt19937_64 rng(2);
    const Vec3 c(0, 0, 100);
    const double sd = 0.2;
    const auto cloud = synth_cloud(c, 4.0, MarkerId::R0, Vec3::Zero(), 300, sd, 0.2, rng);
    int violators = 0;
    for (const auto& lp : cloud.points)
        if (std::abs((lp.p - c).norm() - 4.0) > 5.0 * sd) ++violators;
    CHECK(violators >= 60);
}

TEST_CASE("cloud synthesis is deterministic per seed") {
    std::mt19937_64 a(7), b(7);
    const auto ca = synth_cloud({1, 2, 90}, 2.0, MarkerId::B1, Vec3::Zero(), 120, 0.3, 0.1, a);
    const auto cb = synth_cloud({1, 2, 90}, 2.0, MarkerId::B1, Vec3::Zero(), 120, 0.3, 0.1, b);
    REQUIRE(ca.points.size() == cb.points.size());
    for (std::size_t i = 0; i < ca.points.size(); ++i)
        CHECK((ca.points[i].p - cb.points[i].p).norm() == 0.0);
}

TEST_CASE("ransac recovers a noiseless center to machine precision") {
    std::mt19937_64 rng(3);
    const Vec3 c(-20, 14, 120);
    const auto cloud = synth_cloud(c, 4.0, MarkerId::R0, Vec3::Zero(), 150, 0.0, 0.0, rng);
    const SphereFit fit = ransac_sphere(raw_points(cloud), 4.0, 200, 0.5, rng);
    CHECK((fit.center - c).norm() < 1e-9);
    CHECK(fit.inlier_count == 150);
}

TEST_CASE("ransac tolerates noise plus outliers across seeded trials") {
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(1000 + trial);
        const Vec3 c(5, -8, 150);
        const auto cloud =
            synth_cloud(c, 4.0, MarkerId::R0, Vec3::Zero(), 200, 0.5, 0.2, rng);
        const SphereFit fit = ransac_sphere(raw_points(cloud), 4.0, 500, 1.0, rng);
        if ((fit.center - c).norm() < 0.5) ++ok;
    }
    CHECK(ok >= 99);
}

TEST_CASE("an all-outlier cloud fails the quorum") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(Vec3(u(rng), u(rng), u(rng)));
    CHECK_THROWS_AS(ransac_sphere(pts, 4.0, 300, 0.05, rng), FitFailed);
}

TEST_CASE("base frame matches the axis-aligned construction") {
    MarkerRig rig;
    rig.L_base = Vec3::Zero();
    const Vec3 r0(-10, 0, 0), r1(10, 0, 0), b0(10, 0, 20);
    const RigidTransform T = base_frame(r0, r1, b0, rig);
    CHECK((T.R.col(1) - Vec3(1, 0, 0)).norm() < 1e-12);   // y from r0->r1
    CHECK((T.R.col(2) - Vec3(0, 0, 1)).norm() < 1e-12);   // z from r1->b0
    CHECK((T.R.col(0) - Vec3(0, -1, 0)).norm() < 1e-12);  // x = y cross z
    CHECK(T.p.norm() < 1e-12);
}

TEST_CASE("base frame construction is equivariant under rigid motions") {
    std::mt19937_64 rng(5);
    const Vec3 r0(-12, 3, 4), r1(9, 1, -2), b0(8, 2, 17);
    const RigidTransform base = base_frame(r0, r1, b0, kRig);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform g = random_motion(rng);
        const RigidTransform moved =
            base_frame(g.apply(r0), g.apply(r1), g.apply(b0), kRig);
        CHECK(pose_diff(moved, g * base) < 1e-9);
    }
}

TEST_CASE("collinear base markers are rejected") {
    CHECK_THROWS_AS(base_frame({0, 0, 0}, {10, 0, 0}, {20, 0, 0}, kRig), DegenerateMarkers);
}

TEST_CASE("forceps frame matches hand-computed cross products at psi=0") {
    MarkerRig rig;
    rig.psi = 0.0;
    rig.recompute_offsets();
    // stick along +z, other jaw opened toward +y
    const Vec3 prox(0, 0, 6), distal(0, 0, 14);
    const Vec3 other(0.0, 14 * std::sin(0.4), 14 * std::cos(0.4));
    const RigidTransform T = forceps_frame(distal, prox, other, rig, ForcepsSide::Left);

    const Vec3 z_expect = (distal - prox).normalized();
    const Vec3 v1 = (prox - distal).normalized();
    const Vec3 v2 = (prox - other).normalized();
    const Vec3 x_expect = v1.cross(v2).normalized();
    CHECK((T.R.col(2) - z_expect).norm() < 1e-12);
    CHECK((T.R.col(0) - x_expect).norm() < 1e-12);
    CHECK(is_rotation(T.R, 1e-12));
}

TEST_CASE("psi rotates the forceps frame about its constructed hinge axis") {
    MarkerRig rig0;
    rig0.psi = 0.0;
    rig0.recompute_offsets();
    MarkerRig rig10;
    rig10.psi = deg2rad(10.0);
    rig10.L_fcps1 = rig0.L_fcps1;  // isolate the rotation difference
    rig10.L_fcps2 = rig0.L_fcps2;

    const Vec3 prox(3, -2, 6), distal(4, 1, 14);
    const Vec3 other(-1, 6, 13);
    const RigidTransform a = forceps_frame(distal, prox, other, rig0, ForcepsSide::Left);
    const RigidTransform b = forceps_frame(distal, prox, other, rig10, ForcepsSide::Left);

    const Mat3 correction = b.R * a.R.transpose();
    const Mat3 expected =
        Eigen::AngleAxisd(deg2rad(10.0), Vec3(a.R.col(0))).toRotationMatrix();
    CHECK(max_abs_diff(correction, expected) < 1e-12);
}

TEST_CASE("forceps frame is equivariant under rigid motions") {
    std::mt19937_64 rng(6);
    const Vec3 prox(3, -2, 6), distal(4, 1, 14), other(-1, 6, 13);
    const RigidTransform f = forceps_frame(distal, prox, other, kRig, ForcepsSide::Left);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform g = random_motion(rng);
        const RigidTransform moved = forceps_frame(g.apply(distal), g.apply(prox),
                                                   g.apply(other), kRig, ForcepsSide::Left);
        CHECK(pose_diff(moved, g * f) < 1e-9);
    }
}

TEST_CASE("closed grip gives zero angle and orthogonal jaws give ninety degrees") {
    RigidTransform f1, f2;
    MarkerRig rig;
    const RigidTransform base;
    auto est = end_effector_pose(f1, f2, base, rig);
    CHECK(est.grip_deg == doctest::Approx(0.0));
    CHECK((est.pose_in_base.p - f1.p).norm() < 1e-12);  // no tip correction at theta=0

    f2.R = RigidTransform::rot_x(kPi / 2).R;
    est = end_effector_pose(f1, f2, base, rig);
    CHECK(est.grip_deg == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("grip angle clamps numerically out-of-range dot products") {
    RigidTransform f1, f2;
    f1.R = Mat3::Identity() * (1.0 + 1e-12);  // slightly de-normalized axes
    f2.R = f1.R;
    const auto est = end_effector_pose(f1, f2, RigidTransform{}, kRig);
    CHECK(std::isfinite(est.grip_deg));
    CHECK(est.grip_deg == doctest::Approx(0.0));
}

TEST_CASE("the noiseless marker pipeline reproduces the forward kinematics pose") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 12; ++i) {
        JointConfig q = random_admissible(kSpec, rng, 0.8);
        const auto centers = marker_centers(q, kSpec, kRig);

        const RigidTransform T_base = base_frame(centers[0], centers[1], centers[2], kRig);
        const RigidTransform T_f1 =
            forceps_frame(centers[3], centers[4], centers[5], kRig, ForcepsSide::Left);
        const RigidTransform T_f2 =
            forceps_frame(centers[5], centers[6], centers[3], kRig, ForcepsSide::Right);
        const auto est = end_effector_pose(T_f1, T_f2, T_base, kRig);

        const RigidTransform expect = forward_kinematics(q, kSpec);
        CHECK(pose_diff(est.pose_in_base, expect) < 1e-6);
        CHECK(est.grip_deg == doctest::Approx(q.grip()).epsilon(1e-9));
    }
}

TEST_CASE("recover_joint_config closes the loop within 0.05 degrees") {
    std::mt19937_64 rng(9);
    PerceptionNoise clean;
    clean.points_per_marker = 120;
    clean.ransac_iters = 150;
    const PerceptionPipeline pipeline(kSpec, kRig, clean);
    for (int i = 0; i < 6; ++i) {
        const JointConfig q = random_admissible(kSpec, rng, 0.8);
        const JointConfig rec =
            pipeline.observe(q, ReducedJointConfig::from_full(q), rng);
        CHECK((rec.vec() - q.vec()).cwiseAbs().maxCoeff() < 0.05);
    }
}

TEST_CASE("joint recovery error grows with cloud noise") {
    std::mt19937_64 rng(10);
    const JointConfig q{25.0, -18.0, 8.0, -10.0, 22.0};
    std::vector<double> medians;
    for (const double sd : {0.0, 0.2, 0.5, 1.0}) {
        PerceptionNoise n;
        n.points_per_marker = 150;
        n.ransac_iters = 200;
        n.noise_sd = sd;
        const PerceptionPipeline pipeline(kSpec, kRig, n);
        std::vector<double> errs;
        for (int s = 0; s < 50; ++s) {
            try {
                const JointConfig rec =
                    pipeline.observe(q, ReducedJointConfig::from_full(q), rng);
                errs.push_back((rec.vec() - q.vec()).cwiseAbs().maxCoeff());
            } catch (const std::runtime_error&) {
                errs.push_back(1e9);
            }
        }
        std::sort(errs.begin(), errs.end());
        medians.push_back(errs[errs.size() / 2]);
    }
    for (std::size_t i = 1; i < medians.size(); ++i)
        CHECK(medians[i] >= medians[i - 1] - 1e-3);
}

TEST_CASE("labeled cloud CSV round trip preserves points and labels") {
    std::mt19937_64 rng(11);
    const auto cloud = synth_cloud({3, 4, 77}, 2.0, MarkerId::Y0, Vec3::Zero(), 80, 0.1, 0.1, rng);
    const std::string path =
        (std::filesystem::temp_directory_path() / "tendon_cloud_test.csv").string();
    write_cloud_csv(path, cloud);
    const auto back = read_cloud_csv(path);
    REQUIRE(back.points.size() == cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        CHECK(back.points[i].label == cloud.points[i].label);
        CHECK((back.points[i].p - cloud.points[i].p).norm() == 0.0);
    }
    std::filesystem::remove(path);
}

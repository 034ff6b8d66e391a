#include "tendon/perception.hpp"

#include <algorithm>
#include <cmath>

#include "tendon/io_util.hpp"

namespace tendon {
namespace {

constexpr double kDegenerateTol = 1e-8;

Mat3 rodrigues(const Vec3& axis_unit, double angle) {
    return Eigen::AngleAxisd(angle, axis_unit).toRotationMatrix();
}

Vec3 unit_or_throw(const Vec3& v, const char* what) {
    const double n = v.norm();
    if (n < kDegenerateTol) throw DegenerateMarkers(what);
    return v / n;
}

}  // namespace

const char* marker_label(MarkerId id) {
    static const char* names[kMarkerCount] = {"r0", "r1", "b0", "r2", "b1", "y0", "g0"};
    return names[static_cast<int>(id)];
}

std::optional<MarkerId> marker_from_label(const std::string& label) {
    for (int i = 0; i < kMarkerCount; ++i)
        if (label == marker_label(static_cast<MarkerId>(i)))
            return static_cast<MarkerId>(i);
    return std::nullopt;
}

void MarkerRig::recompute_offsets() {
    const double s = std::sin(psi), c = std::cos(psi);
    // proximal stick sphere back to the jaw frame origin plus the tip offset
    L_fcps1 = Vec3(0.0, -a_prox * s, d_fcps - a_prox * c);
    L_fcps2 = L_fcps1;  // the mirrored right-jaw construction reuses the vector
}

LabeledPointCloud synth_cloud(const Vec3& center, double radius, MarkerId label,
                              const Vec3& camera_pos, int n_points, double noise_sd,
                              double outlier_frac, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int n_outliers = static_cast<int>(std::lround(outlier_frac * n_points));
    const Vec3 to_cam = camera_pos - center;

    LabeledPointCloud cloud;
    cloud.outlier_frac = outlier_frac;
    cloud.points.reserve(n_points);

    for (int i = 0; i < n_points - n_outliers; ++i) {
        Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
        while (dir.norm() < 1e-9) dir = Vec3(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        if (dir.dot(to_cam) < 0.0) dir = -dir;  // visible hemisphere only
        const double r = radius + (noise_sd > 0.0 ? noise_sd * gauss(rng) : 0.0);
        cloud.points.push_back({center + r * dir, label});
    }

    // uniform box outliers kept clear of the sphere shell
    const double box = 2.5 * radius;
    const double clear_band = std::max(5.0 * noise_sd, 0.3 * radius);
    for (int i = 0; i < n_outliers; ++i) {
        Vec3 p;
        do {
            p = center + box * Vec3(uni(rng), uni(rng), uni(rng));
        } while (std::abs((p - center).norm() - radius) <= clear_band);
        cloud.points.push_back({p, label});
    }
    return cloud;
}

SphereFit ransac_sphere(const std::vector<Vec3>& points, double radius_known, int iters,
                        double inlier_tol, std::mt19937_64& rng, double quorum_frac) {
    const int n = static_cast<int>(points.size());
    const int quorum = std::max(4, static_cast<int>(std::ceil(quorum_frac * n)));
    if (n < 4) throw FitFailed(0, quorum);

    std::uniform_int_distribution<int> pick(0, n - 1);

    auto count_inliers = [&](const Vec3& c) {
        int k = 0;
        for (const auto& p : points)
            if (std::abs((p - c).norm() - radius_known) < inlier_tol) ++k;
        return k;
    };

    int best_count = -1;
    Vec3 best_center = Vec3::Zero();

    for (int it = 0; it < iters; ++it) {
        const int i = pick(rng), j = pick(rng), k = pick(rng);
        if (i == j || j == k || i == k) continue;
        const Vec3& p1 = points[i];
        const Vec3 a = points[j] - p1;
        const Vec3 b = points[k] - p1;
        const Vec3 nrm = a.cross(b);
        const double n2 = nrm.squaredNorm();
        if (n2 < 1e-12) continue;

        // circumcenter of the triangle in its plane
        const double aa = a.squaredNorm(), bb = b.squaredNorm(), ab = a.dot(b);
        const double det = aa * bb - ab * ab;
        if (std::abs(det) < 1e-12) continue;
        const double alpha = 0.5 * (aa * bb - ab * bb) / det;
        const double beta = 0.5 * (aa * bb - ab * aa) / det;
        const Vec3 cc = p1 + alpha * a + beta * b;

        const double rc2 = (p1 - cc).squaredNorm();
        const double h2 = radius_known * radius_known - rc2;
        if (h2 < 0.0) continue;
        const Vec3 axis = nrm / std::sqrt(n2);
        const double h = std::sqrt(h2);

        for (const Vec3& cand : {Vec3(cc + h * axis), Vec3(cc - h * axis)}) {
            const int cnt = count_inliers(cand);
            if (cnt > best_count) {
                best_count = cnt;
                best_center = cand;
            }
        }
    }
    if (best_count < quorum) throw FitFailed(std::max(best_count, 0), quorum);

    // Gauss-Newton refinement of the center over the consensus set
    Vec3 c = best_center;
    for (int gn = 0; gn < 5; ++gn) {
        Mat3 JtJ = Mat3::Zero();
        Vec3 Jtf = Vec3::Zero();
        for (const auto& p : points) {
            const Vec3 dvec = c - p;
            const double dist = dvec.norm();
            if (std::abs(dist - radius_known) >= inlier_tol || dist < 1e-9) continue;
            const Vec3 g = dvec / dist;
            JtJ += g * g.transpose();
            Jtf += g * (dist - radius_known);
        }
        const Vec3 step = (JtJ + 1e-9 * Mat3::Identity()).ldlt().solve(Jtf);
        c -= step;
        if (step.norm() < 1e-12) break;
    }

    SphereFit fit;
    fit.center = c;
    fit.radius = radius_known;
    double ss = 0.0;
    int cnt = 0;
    for (const auto& p : points) {
        const double e = (p - c).norm() - radius_known;
        if (std::abs(e) < inlier_tol) {
            ss += e * e;
            ++cnt;
        }
    }
    if (cnt < quorum) throw FitFailed(cnt, quorum);
    fit.inlier_count = cnt;
    fit.inlier_rms = std::sqrt(ss / cnt);
    return fit;
}

RigidTransform base_frame(const Vec3& p_r0, const Vec3& p_r1, const Vec3& p_b0,
                          const MarkerRig& rig) {
    const Vec3 y = unit_or_throw(p_r1 - p_r0, "base markers r0/r1 coincide");
    const Vec3 z = unit_or_throw(p_b0 - p_r1, "base markers r1/b0 coincide");
    const Vec3 x = y.cross(z);
    if (x.norm() < 1e-6) throw DegenerateMarkers("base markers collinear");

    Mat3 M;
    M.col(0) = x;
    M.col(1) = y;
    M.col(2) = z;
    RigidTransform T;
    T.R = closest_rotation(M);
    T.p = 0.5 * (p_r0 + p_r1) + T.R * rig.L_base;
    return T;
}

RigidTransform forceps_frame(const Vec3& p_distal, const Vec3& p_prox,
                             const Vec3& p_other_distal, const MarkerRig& rig,
                             ForcepsSide side) {
    const Vec3 z = unit_or_throw(p_distal - p_prox, "forceps stick markers coincide");
    const Vec3 v1 = unit_or_throw(p_prox - p_distal, "forceps stick markers coincide");
    const Vec3 v2 = unit_or_throw(p_prox - p_other_distal, "forceps markers coincide");
    Vec3 x = v1.cross(v2);
    if (x.norm() < 1e-6) throw DegenerateMarkers("forceps markers collinear");
    x.normalize();

    Mat3 M;
    M.col(0) = x;
    M.col(1) = x.cross(z);
    M.col(2) = z;
    RigidTransform T;
    T.R = closest_rotation(M);

    // stick mounting correction; the mirrored right-jaw x axis flips the
    // rotation sense automatically
    const Vec3 axis = rig.psi_about_camera_x ? Vec3::UnitX() : Vec3(T.R.col(0));
    T.R = rodrigues(axis, rig.psi) * T.R;

    const Vec3& L = (side == ForcepsSide::Left) ? rig.L_fcps1 : rig.L_fcps2;
    T.p = p_prox + T.R * L;
    return T;
}

EndEffectorEstimate end_effector_pose(const RigidTransform& T_fcps1,
                                      const RigidTransform& T_fcps2,
                                      const RigidTransform& T_base_cam,
                                      const MarkerRig& rig) {
    const Vec3 z1 = T_fcps1.R.col(2);
    const Vec3 z2 = T_fcps2.R.col(2);
    const double dot = std::clamp(z1.dot(z2), -1.0, 1.0);
    const double theta = std::acos(dot);

    RigidTransform ee_cam;
    ee_cam.R = T_fcps1.R * RigidTransform::rot_x(0.5 * theta).R;
    const Vec3 tip_axis = rig.tip_axis_jaw1 ? z1 : Vec3(ee_cam.R.col(2));
    ee_cam.p = 0.5 * (T_fcps1.p + T_fcps2.p) +
               rig.d_fcps * (1.0 - std::cos(0.5 * theta)) * tip_axis;

    EndEffectorEstimate est;
    est.pose_in_base = T_base_cam.inverse() * ee_cam;
    est.grip_deg = rad2deg(theta);
    return est;
}

JointConfig recover_joint_config(const RigidTransform& T_EE_base, double grip_deg,
                                 const ReducedJointConfig& q_prev,
                                 const ManipulatorSpec& spec, const IKOptions& ik) {
    const ReducedJointConfig q = inverse_kinematics(T_EE_base, q_prev, spec, ik);
    return q.to_full(grip_deg);
}

std::array<Vec3, kMarkerCount> marker_centers(const JointConfig& q_phy,
                                              const ManipulatorSpec& spec,
                                              const MarkerRig& rig) {
    const RigidTransform& base = rig.base_in_camera;
    std::array<Vec3, kMarkerCount> m;

    // base plate: r0/r1 straddle the construction origin along y, b0 above r1
    const Vec3 plate = -rig.L_base;
    m[static_cast<int>(MarkerId::R0)] =
        base.apply(plate - rig.base_half_spacing * Vec3::UnitY());
    m[static_cast<int>(MarkerId::R1)] =
        base.apply(plate + rig.base_half_spacing * Vec3::UnitY());
    m[static_cast<int>(MarkerId::B0)] =
        base.apply(plate + rig.base_half_spacing * Vec3::UnitY() +
                   rig.base_z_offset * Vec3::UnitZ());

    const RigidTransform wrist =
        base * wrist_transform(ReducedJointConfig::from_full(q_phy), spec);

    // marker sticks sit at the jaw angle offset by -+psi about the hinge axis
    const double s1 = deg2rad(q_phy.q4) - rig.psi;
    const double s2 = deg2rad(q_phy.q5) + rig.psi;
    const Vec3 stick1 = wrist.R * RigidTransform::rot_x(s1).R * Vec3::UnitZ();
    const Vec3 stick2 = wrist.R * RigidTransform::rot_x(s2).R * Vec3::UnitZ();

    m[static_cast<int>(MarkerId::B1)] = wrist.p + rig.a_prox * stick1;
    m[static_cast<int>(MarkerId::R2)] = wrist.p + rig.a_dist * stick1;
    m[static_cast<int>(MarkerId::G0)] = wrist.p + rig.a_prox * stick2;
    m[static_cast<int>(MarkerId::Y0)] = wrist.p + rig.a_dist * stick2;
    return m;
}

PerceptionPipeline::PerceptionPipeline(const ManipulatorSpec& spec, const MarkerRig& rig,
                                       const PerceptionNoise& noise)
    : spec_(spec), rig_(rig), noise_(noise) {}

JointConfig PerceptionPipeline::observe(const JointConfig& q_phy,
                                        const ReducedJointConfig& q_prev,
                                        std::mt19937_64& rng) const {
    const auto centers = marker_centers(q_phy, spec_, rig_);

    // one labeled cloud per marker, camera at the origin
    std::array<std::vector<Vec3>, kMarkerCount> grouped;
    for (int i = 0; i < kMarkerCount; ++i) {
        const auto id = static_cast<MarkerId>(i);
        const LabeledPointCloud cloud =
            synth_cloud(centers[i], rig_.marker_radius(id), id, Vec3::Zero(),
                        noise_.points_per_marker, noise_.noise_sd, noise_.outlier_frac,
                        rng);
        for (const auto& lp : cloud.points) grouped[i].push_back(lp.p);
    }
    if (noise_.mislabel_frac > 0.0) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_int_distribution<int> other(0, kMarkerCount - 2);
        for (int i = 0; i < kMarkerCount; ++i) {
            auto& pts = grouped[i];
            for (std::size_t k = 0; k < pts.size();) {
                if (u01(rng) < noise_.mislabel_frac) {
                    int tgt = other(rng);
                    if (tgt >= i) ++tgt;
                    grouped[tgt].push_back(pts[k]);
                    pts[k] = pts.back();
                    pts.pop_back();
                } else {
                    ++k;
                }
            }
        }
    }

    std::array<Vec3, kMarkerCount> fitted;
    for (int i = 0; i < kMarkerCount; ++i) {
        const auto id = static_cast<MarkerId>(i);
        const SphereFit fit = ransac_sphere(grouped[i], rig_.marker_radius(id),
                                            noise_.ransac_iters, noise_.inlier_tol, rng);
        fitted[i] = fit.center;
    }

    const RigidTransform T_base =
        base_frame(fitted[static_cast<int>(MarkerId::R0)],
                   fitted[static_cast<int>(MarkerId::R1)],
                   fitted[static_cast<int>(MarkerId::B0)], rig_);
    const RigidTransform T_f1 =
        forceps_frame(fitted[static_cast<int>(MarkerId::R2)],
                      fitted[static_cast<int>(MarkerId::B1)],
                      fitted[static_cast<int>(MarkerId::Y0)], rig_, ForcepsSide::Left);
    const RigidTransform T_f2 =
        forceps_frame(fitted[static_cast<int>(MarkerId::Y0)],
                      fitted[static_cast<int>(MarkerId::G0)],
                      fitted[static_cast<int>(MarkerId::R2)], rig_, ForcepsSide::Right);

    const EndEffectorEstimate est = end_effector_pose(T_f1, T_f2, T_base, rig_);
    return recover_joint_config(est.pose_in_base, est.grip_deg, q_prev, spec_);
}

void write_cloud_csv(const std::string& path, const LabeledPointCloud& cloud) {
    std::string out = "x,y,z,label\n";
    for (const auto& lp : cloud.points) {
        out += format_double(lp.p.x()) + "," + format_double(lp.p.y()) + "," +
               format_double(lp.p.z()) + "," + marker_label(lp.label) + "\n";
    }
    write_text_file(path, out);
}

LabeledPointCloud read_cloud_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::stringstream ss(text);
    std::string line;
    LabeledPointCloud cloud;
    bool header = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw std::runtime_error("bad cloud row: " + line);
        const auto id = marker_from_label(f[3]);
        if (!id) throw std::runtime_error("unknown marker label: " + f[3]);
        cloud.points.push_back(
            {Vec3(std::stod(f[0]), std::stod(f[1]), std::stod(f[2])), *id});
    }
    return cloud;
}

}  // namespace tendon

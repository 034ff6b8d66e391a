#include "tendon/trajectory.hpp"

#include <cmath>

#include "tendon/errors.hpp"

namespace tendon {

std::string to_string(TrajectoryKind k) {
    switch (k) {
        case TrajectoryKind::Random: return "random";
        case TrajectoryKind::Circle: return "circle";
        case TrajectoryKind::Zigzag: return "zigzag";
    }
    return "random";
}

TrajectoryKind trajectory_kind_from(const std::string& s) {
    if (s == "random") return TrajectoryKind::Random;
    if (s == "circle") return TrajectoryKind::Circle;
    if (s == "zigzag") return TrajectoryKind::Zigzag;
    throw std::runtime_error("unknown trajectory kind: " + s);
}

WorkspaceEnvelope workspace_envelope(const ManipulatorSpec& spec) {
    const auto& lim = spec.joint_limits;
    std::vector<ReducedJointConfig> probes;
    for (int mask = 0; mask < 16; ++mask) {
        ReducedJointConfig q;
        q.q1 = (mask & 1) ? lim.max[0] : lim.min[0];
        q.q2 = (mask & 2) ? lim.max[1] : lim.min[1];
        q.q3 = (mask & 4) ? lim.max[2] : lim.min[2];
        q.q_yaw = (mask & 8) ? 0.5 * lim.max[3] : 0.5 * lim.min[3];
        probes.push_back(q);
    }
    probes.push_back(ReducedJointConfig{});
    std::mt19937_64 rng(0x9e3779b9);  // envelope is a pure function of the spec
    for (int i = 0; i < 64; ++i) {
        ReducedJointConfig q;
        double* slot[4] = {&q.q1, &q.q2, &q.q3, &q.q_yaw};
        for (int j = 0; j < 4; ++j) {
            const int lj = (j < 3) ? j : 3;
            std::uniform_real_distribution<double> u(lim.min[lj], lim.max[lj]);
            *slot[j] = u(rng);
        }
        probes.push_back(q);
    }

    WorkspaceEnvelope env;
    for (const auto& q : probes) env.center += forward_kinematics(q, spec).p;
    env.center /= static_cast<double>(probes.size());
    for (const auto& q : probes)
        env.radius = std::max(env.radius, (forward_kinematics(q, spec).p - env.center).norm());

    env.nominal_q = ReducedJointConfig{0.35 * lim.max[0], 0.0, 0.35 * lim.max[2], 0.0};
    env.nominal = forward_kinematics(env.nominal_q, spec);
    return env;
}

namespace {

Vec3 catmull_rom(const std::vector<Vec3>& pts, double t) {
    const int n = static_cast<int>(pts.size());
    const int seg = std::min(n - 2, std::max(0, static_cast<int>(std::floor(t))));
    const double u = t - seg;
    const Vec3& p0 = pts[std::max(0, seg - 1)];
    const Vec3& p1 = pts[seg];
    const Vec3& p2 = pts[seg + 1];
    const Vec3& p3 = pts[std::min(n - 1, seg + 2)];
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

std::vector<RigidTransform> random_targets(const TrajectoryParams& params,
                                           const ManipulatorSpec& spec,
                                           std::mt19937_64& rng) {
    const auto& lim = spec.joint_limits;
    std::vector<Vec3> pos;
    std::vector<Eigen::Quaterniond> rot;
    for (int i = 0; i < params.random_waypoints; ++i) {
        ReducedJointConfig q;
        double* slot[4] = {&q.q1, &q.q2, &q.q3, &q.q_yaw};
        for (int j = 0; j < 4; ++j) {
            const int lj = (j < 3) ? j : 3;
            std::uniform_real_distribution<double> u(params.waypoint_limit_frac * lim.min[lj],
                                                     params.waypoint_limit_frac * lim.max[lj]);
            *slot[j] = u(rng);
        }
        const RigidTransform T = forward_kinematics(q, spec);
        pos.push_back(T.p);
        rot.emplace_back(T.R);
    }

    std::vector<RigidTransform> targets;
    const double tmax = static_cast<double>(params.random_waypoints - 1);
    for (int i = 0; i < params.samples; ++i) {
        const double t = tmax * i / (params.samples - 1);
        const int seg = std::min(params.random_waypoints - 2,
                                 std::max(0, static_cast<int>(std::floor(t))));
        RigidTransform T;
        T.p = catmull_rom(pos, t);
        T.R = rot[seg].slerp(t - seg, rot[seg + 1]).toRotationMatrix();
        targets.push_back(T);
    }
    return targets;
}

std::vector<RigidTransform> circle_targets(const TrajectoryParams& params,
                                           const WorkspaceEnvelope& env,
                                           std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 normal(gauss(rng), gauss(rng), gauss(rng));
    while (normal.norm() < 1e-9) normal = Vec3(gauss(rng), gauss(rng), gauss(rng));
    normal.normalize();
    Vec3 u = normal.cross(Vec3::UnitZ());
    if (u.norm() < 1e-6) u = normal.cross(Vec3::UnitX());
    u.normalize();
    const Vec3 v = normal.cross(u);

    const double radius = params.circle_radius_frac * env.radius;
    const Vec3 center = env.nominal.p;

    std::vector<RigidTransform> targets;
    for (int i = 0; i < params.samples; ++i) {
        const double ang = 2.0 * kPi * i / params.samples;
        RigidTransform T;
        T.p = center + radius * (std::cos(ang) * u + std::sin(ang) * v);
        T.R = env.nominal.R;
        targets.push_back(T);
    }
    return targets;
}

std::vector<RigidTransform> zigzag_targets(const TrajectoryParams& params,
                                           const WorkspaceEnvelope& env,
                                           std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 along(gauss(rng), gauss(rng), gauss(rng));
    while (along.norm() < 1e-9) along = Vec3(gauss(rng), gauss(rng), gauss(rng));
    along.normalize();
    Vec3 across = along.cross(Vec3(gauss(rng), gauss(rng), gauss(rng)));
    while (across.norm() < 1e-6) across = along.cross(Vec3(gauss(rng), gauss(rng), gauss(rng)));
    across.normalize();

    const double length = params.zigzag_length_frac * env.radius;
    const double amp = params.zigzag_amplitude_frac * env.radius;
    const int V = params.zigzag_vertices;

    // endpoints on the axis, interior vertices alternating across it
    std::vector<Vec3> verts;
    for (int k = 0; k <= V + 1; ++k) {
        const double lon = length * (static_cast<double>(k) / (V + 1) - 0.5);
        double lat = 0.0;
        if (k >= 1 && k <= V) lat = (k % 2 == 1) ? amp : -amp;
        verts.push_back(env.nominal.p + lon * along + lat * across);
    }

    // uniform arclength sampling of the polyline
    std::vector<double> cum{0.0};
    for (std::size_t i = 0; i + 1 < verts.size(); ++i)
        cum.push_back(cum.back() + (verts[i + 1] - verts[i]).norm());
    const double total = cum.back();

    std::vector<RigidTransform> targets;
    for (int i = 0; i < params.samples; ++i) {
        const double s = total * i / (params.samples - 1);
        std::size_t seg = 0;
        while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
        const double denom = std::max(1e-12, cum[seg + 1] - cum[seg]);
        const double u = (s - cum[seg]) / denom;
        RigidTransform T;
        T.p = (1.0 - u) * verts[seg] + u * verts[seg + 1];
        T.R = env.nominal.R;
        targets.push_back(T);
    }
    return targets;
}

bool near_training_waypoint(const JointConfig& q,
                            const std::vector<JointConfig>& waypoints, double min_dist) {
    for (const auto& w : waypoints)
        if ((q.vec() - w.vec()).norm() < min_dist) return true;
    return false;
}

}  // namespace

TaskTrajectory make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                               const ManipulatorSpec& spec, std::mt19937_64& rng,
                               const std::vector<JointConfig>* training_waypoints) {
    const WorkspaceEnvelope env = workspace_envelope(spec);

    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        std::vector<RigidTransform> targets;
        switch (kind) {
            case TrajectoryKind::Random: targets = random_targets(params, spec, rng); break;
            case TrajectoryKind::Circle: targets = circle_targets(params, env, rng); break;
            case TrajectoryKind::Zigzag: targets = zigzag_targets(params, env, rng); break;
        }

        TaskTrajectory traj;
        traj.kind = kind;
        ReducedJointConfig seed = env.nominal_q;
        bool unseen = true;
        const double pos_slack = params.unreachable_frac * env.radius;

        for (const auto& target : targets) {
            const IKResult ik = solve_ik(target, seed, spec);
            const RigidTransform reached = forward_kinematics(ik.q, spec);
            if ((reached.p - target.p).norm() > pos_slack)
                throw Unreachable("trajectory sample beyond the reachable envelope");
            seed = ik.q;

            TrajectorySample s;
            s.target = target;
            s.q_reduced = ik.q;
            s.q_desired = ik.q.to_full(params.grip_deg);
            s.desired_pose = forward_kinematics(s.q_desired, spec);
            if (training_waypoints &&
                near_training_waypoint(s.q_desired, *training_waypoints,
                                       params.min_waypoint_distance)) {
                unseen = false;
                break;
            }
            traj.samples.push_back(std::move(s));
        }
        if (unseen) return traj;
        // too close to a training waypoint: redraw from the rng stream
    }
    throw Unreachable("could not generate a trajectory clear of training waypoints");
}

}  // namespace tendon

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tendon/kinematics.hpp"
#include "tendon/types.hpp"

namespace tendon {

enum class TrajectoryKind { Random, Circle, Zigzag };
std::string to_string(TrajectoryKind k);
TrajectoryKind trajectory_kind_from(const std::string& s);

struct TrajectorySample {
    RigidTransform target;        // task-space target before IK
    ReducedJointConfig q_reduced;
    JointConfig q_desired;        // grip applied
    RigidTransform desired_pose;  // FK(q_desired), the tracking reference
};

struct TaskTrajectory {
    TrajectoryKind kind = TrajectoryKind::Random;
    std::vector<TrajectorySample> samples;
};

struct TrajectoryParams {
    int samples = 150;
    double grip_deg = 20.0;
    int random_waypoints = 6;
    double waypoint_limit_frac = 0.6;   // keep waypoints inside this fraction of limits
    double circle_radius_frac = 0.2;    // of the workspace radius
    int zigzag_vertices = 8;            // interior direction reversals
    double zigzag_amplitude_frac = 0.2;
    double zigzag_length_frac = 0.55;
    double unreachable_frac = 0.2;      // of the workspace radius; IK position slack
    double min_waypoint_distance = 6.7082039324993690892;  // 3*sqrt(5) joint-space
    int max_attempts = 8;
};

struct WorkspaceEnvelope {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    RigidTransform nominal;  // mid-bend pose used to anchor orientations
    ReducedJointConfig nominal_q;
};

/// Probe FK across the joint box (corners plus random interior samples) to
/// size trajectories to the arm.
WorkspaceEnvelope workspace_envelope(const ManipulatorSpec& spec);

/// Task-space trajectory converted to joint targets by continuity-seeded IK.
/// Throws Unreachable when a sample cannot be placed on the manipulator.
/// When training_waypoints is given, regenerates (bounded attempts) until no
/// desired configuration falls within min_waypoint_distance of any of them.
TaskTrajectory make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                               const ManipulatorSpec& spec, std::mt19937_64& rng,
                               const std::vector<JointConfig>* training_waypoints = nullptr);

}  // namespace tendon

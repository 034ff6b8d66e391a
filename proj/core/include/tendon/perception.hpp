#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tendon/errors.hpp"
#include "tendon/kinematics.hpp"
#include "tendon/types.hpp"

namespace tendon {

/// The seven fiducial markers: three large spheres on the base plate, two
/// small spheres on each forceps jaw stick.
enum class MarkerId : int { R0 = 0, R1, B0, R2, B1, Y0, G0 };
inline constexpr int kMarkerCount = 7;

const char* marker_label(MarkerId id);
std::optional<MarkerId> marker_from_label(const std::string& label);

struct MarkerRig {
    // base plate, in robot-base coordinates
    Vec3 L_base{0.0, 0.0, -25.0};     // construction-frame offset of the base origin
    double base_half_spacing = 15.0;  // r0/r1 sit at -+this along base y
    double base_z_offset = 20.0;      // b0 above r1 along base z
    double base_marker_radius = 4.0;

    // forceps sticks, in jaw coordinates
    double psi = deg2rad(10.0);   // occlusion-avoidance stick offset, rad
    double a_prox = 6.0;          // proximal sphere along the stick, mm
    double a_dist = 14.0;         // distal sphere along the stick, mm
    double forceps_marker_radius = 2.0;
    double d_fcps = 5.0;          // rotation center to jaw tip, mm
    Vec3 L_fcps1;                 // frame offset applied to the proximal marker
    Vec3 L_fcps2;

    // placement of the robot base in the camera frame
    RigidTransform base_in_camera = RigidTransform::translation({0.0, 0.0, 300.0});

    // interpretation flags
    bool psi_about_camera_x = false;  // rotate about the camera x axis instead
                                      // of the constructed hinge axis
    bool tip_axis_jaw1 = false;       // use z_f1 for the tip offset correction
                                      // instead of the end-effector z

    MarkerRig() { recompute_offsets(); }
    /// Derive L_fcps1/L_fcps2 from psi, a_prox and d_fcps.
    void recompute_offsets();

    double marker_radius(MarkerId id) const {
        return static_cast<int>(id) <= static_cast<int>(MarkerId::B0)
                   ? base_marker_radius
                   : forceps_marker_radius;
    }
};

struct LabeledPoint {
    Vec3 p;
    MarkerId label;
};

struct LabeledPointCloud {
    std::vector<LabeledPoint> points;
    double outlier_frac = 0.0;  // as configured at synthesis time
};

struct SphereFit {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    int inlier_count = 0;
    double inlier_rms = 0.0;
};

/// Sample a synthetic cloud on the camera-facing hemisphere of a sphere with
/// radial Gaussian noise plus uniform box outliers. Deterministic per rng.
LabeledPointCloud synth_cloud(const Vec3& center, double radius, MarkerId label,
                              const Vec3& camera_pos, int n_points, double noise_sd,
                              double outlier_frac, std::mt19937_64& rng);

/// RANSAC center fit with known radius: 3-point minimal samples constrained to
/// the radius, followed by Gauss-Newton refinement over the consensus set.
/// Throws FitFailed when the best consensus falls below quorum_frac of points.
SphereFit ransac_sphere(const std::vector<Vec3>& points, double radius_known, int iters,
                        double inlier_tol, std::mt19937_64& rng,
                        double quorum_frac = 0.3);

/// Base frame from the three base marker centers (camera coordinates).
RigidTransform base_frame(const Vec3& p_r0, const Vec3& p_r1, const Vec3& p_b0,
                          const MarkerRig& rig);

enum class ForcepsSide { Left, Right };

/// Jaw frame from its own distal/proximal markers plus the other jaw's distal
/// marker, with the psi stick correction applied.
RigidTransform forceps_frame(const Vec3& p_distal, const Vec3& p_prox,
                             const Vec3& p_other_distal, const MarkerRig& rig,
                             ForcepsSide side);

struct EndEffectorEstimate {
    RigidTransform pose_in_base;
    double grip_deg = 0.0;
};

/// Grip angle from the jaw z axes, end-effector frame between the jaws, and
/// re-expression in the base frame.
EndEffectorEstimate end_effector_pose(const RigidTransform& T_fcps1,
                                      const RigidTransform& T_fcps2,
                                      const RigidTransform& T_base_cam,
                                      const MarkerRig& rig);

/// IK on the estimated pose seeded from the previous estimate, then split the
/// grip across q4/q5. Propagates NoConvergence.
JointConfig recover_joint_config(const RigidTransform& T_EE_base, double grip_deg,
                                 const ReducedJointConfig& q_prev,
                                 const ManipulatorSpec& spec,
                                 const IKOptions& ik = {});

/// Ground-truth marker centers (camera frame) for a physical configuration.
std::array<Vec3, kMarkerCount> marker_centers(const JointConfig& q_phy,
                                              const ManipulatorSpec& spec,
                                              const MarkerRig& rig);

struct PerceptionNoise {
    int points_per_marker = 200;
    double noise_sd = 0.0;       // mm, radial
    double outlier_frac = 0.0;
    double mislabel_frac = 0.0;  // fraction of points assigned a wrong label
    int ransac_iters = 500;
    double inlier_tol = 1.0;     // mm
};

/// Full synthetic sensing pipeline: markers -> clouds -> RANSAC -> frames ->
/// IK. Throws FitFailed/DegenerateMarkers/NoConvergence on unusable frames.
class PerceptionPipeline {
public:
    PerceptionPipeline(const ManipulatorSpec& spec, const MarkerRig& rig,
                       const PerceptionNoise& noise);

    /// Observe a physical configuration; q_prev seeds the IK.
    JointConfig observe(const JointConfig& q_phy, const ReducedJointConfig& q_prev,
                        std::mt19937_64& rng) const;

    const MarkerRig& rig() const { return rig_; }

private:
    ManipulatorSpec spec_;
    MarkerRig rig_;
    PerceptionNoise noise_;
};

/// CSV round trip for labeled clouds: header x,y,z,label.
void write_cloud_csv(const std::string& path, const LabeledPointCloud& cloud);
LabeledPointCloud read_cloud_csv(const std::string& path);

}  // namespace tendon

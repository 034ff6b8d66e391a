#pragma once

#include <array>
#include <vector>

#include "tendon/kinematics.hpp"
#include "tendon/types.hpp"

namespace tendon {

/// Which joint a cable pair drives. Segment pairs bend either in the pitch
/// plane or the yaw plane; a cable only sees proximal bending of its own plane
/// at full offset, orthogonal-plane bending contributes the even part only.
enum class CablePlane { Pitch, Yaw };

struct CableSpec {
    int cable_id = 1;       // 1..10
    double d = 4.0;         // diametric offset from the neutral axis, mm
    int joint = 0;          // 0-based driven joint index (q1..q5)
    int sign = +1;          // side within the differential pair
};

struct CableCommand {
    std::array<double, 10> delta_w{};  // mm, indexed by cable_id-1
};

/// Per-hinge cable chord for a joint bent by theta (rad) over n uniform
/// hinges: (H*n/theta - d/2) * 2 * sin(theta/2n). Continuous at theta=0 with
/// limit H.
double cable_delta(double theta, double d, double H, int n);

/// Default routing: w1-w4 drive segment 1 (two differential pairs), w5/w6
/// drive segment 2, w7-w10 the two forceps jaws.
std::vector<CableSpec> default_cable_routing(double pitch_circle_diameter = 4.0);

struct DecouplingOptions {
    bool enabled = true;
    bool forceps_seg2 = true;  // also correct forceps cables for wrist bending
};

/// Commanded cable length changes (relative to the straight pose) for a joint
/// configuration, with additive decoupling of distal cables against proximal
/// bending. Throws JointLimit if q violates spec limits.
CableCommand joints_to_cables(const JointConfig& q, const ManipulatorSpec& spec,
                              const std::vector<CableSpec>& cables,
                              const DecouplingOptions& dec = {});

}  // namespace tendon

#include "tendon/cable.hpp"

#include <cmath>

namespace tendon {
namespace {

CablePlane joint_plane(int joint) {
    // q1 and q3 bend in the pitch plane; q2 and both forceps in the yaw plane
    return (joint == 0 || joint == 2) ? CablePlane::Pitch : CablePlane::Yaw;
}

int joint_hinge_count(int joint, const ManipulatorSpec& spec) {
    if (joint <= 1) return spec.n1;
    if (joint == 2) return spec.n2;
    return 1;  // each jaw pivots on a single hinge
}

// Total commanded length change (relative to straight) accumulated over the
// n hinges of one joint, for a cable routed at diametric offset d.
double joint_contribution(double theta, double d, double H, int n) {
    return n * (cable_delta(theta, d, H, n) - H);
}

}  // namespace

double cable_delta(double theta, double d, double H, int n) {
    const double u = theta / (2.0 * n);
    double even;  // (H*n/theta) * 2*sin(u) == H * sin(u)/u
    if (std::abs(theta) < 1e-4) {
        const double u2 = u * u;
        even = H * (1.0 - u2 / 6.0 + u2 * u2 / 120.0);
    } else {
        even = H * std::sin(u) / u;
    }
    return even - d * std::sin(u);
}

std::vector<CableSpec> default_cable_routing(double pitch_circle_diameter) {
    const double d = pitch_circle_diameter;
    return {
        {1, d, 0, +1}, {2, d, 0, -1},   // segment-1 pitch
        {3, d, 1, +1}, {4, d, 1, -1},   // segment-1 yaw
        {5, d, 2, +1}, {6, d, 2, -1},   // segment-2 pitch
        {7, d, 3, +1}, {8, d, 3, -1},   // left jaw
        {9, d, 4, +1}, {10, d, 4, -1},  // right jaw
    };
}

CableCommand joints_to_cables(const JointConfig& q, const ManipulatorSpec& spec,
                              const std::vector<CableSpec>& cables,
                              const DecouplingOptions& dec) {
    if (!spec.joint_limits.contains(q)) {
        throw JointLimit("joint command outside configured limits");
    }
    const double H = spec.hinge.h;
    const double th[5] = {deg2rad(q.q1), deg2rad(q.q2), deg2rad(q.q3),
                          deg2rad(q.q4), deg2rad(q.q5)};

    CableCommand cmd;
    for (const auto& c : cables) {
        const int j = c.joint;
        const int n = joint_hinge_count(j, spec);
        double dw = joint_contribution(th[j], c.sign * c.d, H, n);

        if (dec.enabled && j >= 2) {
            // proximal segment-1 bending: full offset in the cable's own
            // plane, even part only in the orthogonal plane
            const CablePlane plane = joint_plane(j);
            const double d_pitch = (plane == CablePlane::Pitch) ? c.sign * c.d : 0.0;
            const double d_yaw = (plane == CablePlane::Yaw) ? c.sign * c.d : 0.0;
            dw += joint_contribution(th[0], d_pitch, H, spec.n1);
            dw += joint_contribution(th[1], d_yaw, H, spec.n1);
            if (j >= 3 && dec.forceps_seg2) {
                dw += joint_contribution(th[2], 0.0, H, spec.n2);
            }
        }
        cmd.delta_w[c.cable_id - 1] = dw;
    }
    return cmd;
}

}  // namespace tendon

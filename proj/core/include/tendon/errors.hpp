#pragma once

#include <stdexcept>
#include <string>

namespace tendon {

/// Newton-Raphson IK failed to reach tolerance within the iteration budget.
struct NoConvergence : std::runtime_error {
    NoConvergence(int iterations_, double residual_)
        : std::runtime_error("IK did not converge after " + std::to_string(iterations_) +
                             " iterations (residual " + std::to_string(residual_) + ")"),
          iterations(iterations_),
          residual(residual_) {}
    int iterations;
    double residual;
};

/// RANSAC consensus fell below the inlier quorum.
struct FitFailed : std::runtime_error {
    FitFailed(int best_inliers_, int quorum_)
        : std::runtime_error("sphere fit failed: best inlier count " +
                             std::to_string(best_inliers_) + " below quorum " +
                             std::to_string(quorum_)),
          best_inliers(best_inliers_),
          quorum(quorum_) {}
    int best_inliers;
    int quorum;
};

/// Marker centers are collinear or otherwise unusable for frame construction.
struct DegenerateMarkers : std::runtime_error {
    explicit DegenerateMarkers(const std::string& what) : std::runtime_error(what) {}
};

/// A joint command violates the configured joint limits.
struct JointLimit : std::runtime_error {
    explicit JointLimit(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss became non-finite.
struct Diverged : std::runtime_error {
    explicit Diverged(const std::string& what) : std::runtime_error(what) {}
};

/// A trajectory sample could not be reached by IK.
struct Unreachable : std::runtime_error {
    explicit Unreachable(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tendon

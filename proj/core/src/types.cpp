#include "tendon/types.hpp"

#include <Eigen/SVD>

namespace tendon {

Vec3 rotation_log(const Mat3& R) {
    const double tr = R.trace();
    const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
    const double angle = std::acos(c);

    Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    if (angle < 1e-7) {
        // log(R) ~ skew part for small angles
        return 0.5 * w;
    }
    if (kPi - angle < 1e-5) {
        // near pi the skew part vanishes; recover the axis from R + I
        Mat3 S = 0.5 * (R + Mat3::Identity());
        int k;
        S.diagonal().maxCoeff(&k);
        Vec3 axis = S.col(k) / std::sqrt(std::max(S(k, k), 1e-12));
        axis.normalize();
        // fix the sign using the skew part when it is not fully degenerate
        if (axis.dot(w) < 0.0) axis = -axis;
        return angle * axis;
    }
    return (angle / (2.0 * std::sin(angle))) * w;
}

double rotation_angle_deg(const Mat3& Ra, const Mat3& Rb) {
    return rad2deg(rotation_log(Ra.transpose() * Rb).norm());
}

Mat3 closest_rotation(const Mat3& M, double* deviation) {
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0.0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    if (deviation) *deviation = (M - R).norm();
    return R;
}

}  // namespace tendon

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace octarm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Errors carry enough context to name the offending rod/element/field.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rotation by angle |phi| about axis phi/|phi| (Rodrigues). Exact for any angle;
// returns identity for |phi| ~ 0.
inline Mat3 rotation_exp(const Vec3& phi) {
    const double theta = phi.norm();
    if (theta < 1e-14) return Mat3::Identity();
    const Vec3 axis = phi / theta;
    return Eigen::AngleAxisd(theta, axis).toRotationMatrix();
}

// Rotation-vector logarithm of R: the vector phi with rotation_exp(phi) == R.
// Stable near the identity via the quaternion form.
inline Vec3 rotation_log(const Mat3& r) {
    Eigen::AngleAxisd aa(r);
    return aa.angle() * aa.axis();
}

// Gram-Schmidt re-orthonormalization, used to keep directors orthonormal
// against accumulated roundoff.
inline Mat3 orthonormalize(const Mat3& q) {
    Eigen::JacobiSVD<Mat3> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace octarm

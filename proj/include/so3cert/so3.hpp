#pragma once

#include <Eigen/Dense>

#include "so3cert/errors.hpp"

namespace so3cert {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Rotation matrix with validated orthonormality.
///
/// Wraps a 3x3 matrix known to satisfy R'R = I and det R = 1 within 1e-9.
/// Construct through from_matrix() (validating), identity(), or the SO(3)
/// maps below, which preserve the invariant.
class Rotation {
  public:
    Rotation() : m_(Mat3::Identity()) {}

    static Rotation identity() { return Rotation(); }

    /// Validating constructor. Throws Degenerate if M is not a rotation
    /// within tolerance.
    static Rotation from_matrix(const Mat3& M, double tol = 1e-9);

    /// Internal constructor for callers that guarantee the invariant
    /// analytically (exponential map, polar projection, products).
    static Rotation trusted(const Mat3& M) { return Rotation(M); }

    const Mat3& matrix() const { return m_; }

    Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
    Rotation transpose() const { return Rotation(m_.transpose()); }

    /// Frobenius norm of R'R - I, for drift monitoring.
    double orthonormality_residual() const {
        return (m_.transpose() * m_ - Mat3::Identity()).norm();
    }

  private:
    explicit Rotation(const Mat3& M) : m_(M) {}
    Mat3 m_;
};

/// Axis-angle pair in canonical form: unit axis, angle in [0, pi].
struct AxisAngle {
    Vec3 axis;
    double angle;
};

/// Skew-symmetric matrix such that hat(v) * w = v x w.
inline Mat3 hat(const Vec3& v) {
    Mat3 M;
    M << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return M;
}

/// Inverse of hat(). Throws NotSkew when the symmetric part of M exceeds tol.
Vec3 vee(const Mat3& M, double tol = 1e-9);

/// Skew part extraction (M - M')^vee / 2 without the skewness precondition.
inline Vec3 vee_skew_part(const Mat3& M) {
    return 0.5 * Vec3(M(2, 1) - M(1, 2), M(0, 2) - M(2, 0), M(1, 0) - M(0, 1));
}

/// Rodrigues formula R = I + sin(th) a^ + (1 - cos(th)) a^ a^.
Rotation exp_so3(const AxisAngle& aa);

/// Exponential of an unnormalized rotation vector (angle = |v|).
Rotation exp_so3(const Vec3& rotvec);

/// Principal logarithm with canonical angle in [0, pi].
///
/// Near angle 0 a series branch avoids sin(th)/th cancellation; near angle pi
/// the axis is recovered from the symmetric part of R, with the sign of any
/// nonzero skew part, and ties at exactly pi resolved by making the
/// largest-magnitude axis component positive. log_so3(identity) returns
/// angle 0 with axis e1 by convention.
AxisAngle log_so3(const Rotation& R);

/// Rotation vector form of the logarithm (axis * angle).
inline Vec3 log_so3_vec(const Rotation& R) {
    const AxisAngle aa = log_so3(R);
    return aa.axis * aa.angle;
}

/// Right-trivialized inverse differential of the exponential map:
/// for R(t) = R0 exp(theta(t)^) with body angular velocity w (so that
/// dR/dt = R w^), the chart coordinate evolves as dtheta/dt =
/// dexpinv(theta, w) = w + (theta x w)/2 + c(|theta|) theta x (theta x w),
/// c(th) = (1 - (th/2) cot(th/2)) / th^2, with the series c -> 1/12 used for
/// tiny angles. Valid for |theta| < 2 pi; integrators renormalize the chart
/// long before that.
Vec3 dexpinv_so3(const Vec3& theta, const Vec3& w);

/// Nearest rotation in Frobenius norm (polar factor of M).
/// Throws Degenerate when M is singular or has nonpositive determinant.
Rotation project_so3(const Mat3& M);

/// Rotation angle of R, i.e. the canonical log angle, in [0, pi].
double rotation_angle(const Rotation& R);

}  // namespace so3cert

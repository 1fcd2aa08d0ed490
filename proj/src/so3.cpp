#include "so3cert/so3.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace so3cert {

Rotation Rotation::from_matrix(const Mat3& M, double tol) {
    const double ortho = (M.transpose() * M - Mat3::Identity()).norm();
    const double det = M.determinant();
    if (ortho > tol || std::abs(det - 1.0) > tol) {
        throw Degenerate("matrix is not a rotation: |R'R - I| = " + std::to_string(ortho) +
                         ", det = " + std::to_string(det));
    }
    return Rotation(M);
}

Vec3 vee(const Mat3& M, double tol) {
    const double sym = (M + M.transpose()).norm();
    if (sym > tol) {
        throw NotSkew("vee: |M + M'| = " + std::to_string(sym) + " exceeds " + std::to_string(tol));
    }
    return vee_skew_part(M);
}

Rotation exp_so3(const AxisAngle& aa) {
    const Mat3 K = hat(aa.axis);
    const Mat3 R = Mat3::Identity() + std::sin(aa.angle) * K + (1.0 - std::cos(aa.angle)) * K * K;
    return Rotation::trusted(R);
}

Rotation exp_so3(const Vec3& rotvec) {
    const double th = rotvec.norm();
    if (th < 1e-12) {
        // second-order series keeps the result orthonormal to machine precision
        const Mat3 K = hat(rotvec);
        return Rotation::trusted(Mat3::Identity() + K + 0.5 * K * K);
    }
    return exp_so3(AxisAngle{rotvec / th, th});
}

AxisAngle log_so3(const Rotation& Rot) {
    const Mat3& R = Rot.matrix();
    const Vec3 w = vee_skew_part(R);  // sin(th) * axis
    const double s = w.norm();
    const double c = 0.5 * (R.trace() - 1.0);
    const double th = std::atan2(s, c);

    if (th < 1e-4) {
        if (s < 1e-300) {
            return AxisAngle{Vec3::UnitX(), 0.0};
        }
        // w = sin(th) a, th/sin(th) = 1 + th^2/6 + 7 th^4/360 + ...
        const double corr = 1.0 + th * th / 6.0 + 7.0 * th * th * th * th / 360.0;
        const Vec3 v = corr * w;
        const double angle = v.norm();
        return AxisAngle{v / angle, angle};
    }

    if (th > M_PI - 1e-4) {
        // sin(th) ~ 0, axis from the symmetric part: R + R' = 2(cos(th) I + (1-cos(th)) a a')
        const Mat3 S = 0.5 * (R + R.transpose()) - c * Mat3::Identity();
        const double scale = 1.0 - c;  // close to 2
        Vec3 a;
        int imax = 0;
        S.diagonal().maxCoeff(&imax);
        const double d = S(imax, imax) / scale;
        a[imax] = std::sqrt(std::max(d, 0.0));
        for (int k = 0; k < 3; ++k) {
            if (k != imax) a[k] = S(imax, k) / (scale * a[imax]);
        }
        a.normalize();
        if (s > 1e-12) {
            // align with the skew part when it still carries sign information
            if (w.dot(a) < 0.0) a = -a;
        } else {
            // tie at exactly pi: make the largest-magnitude component positive
            int jmax = 0;
            a.cwiseAbs().maxCoeff(&jmax);
            if (a[jmax] < 0.0) a = -a;
        }
        return AxisAngle{a, th};
    }

    return AxisAngle{w / s, th};
}

Vec3 dexpinv_so3(const Vec3& theta, const Vec3& w) {
    const Vec3 cross = theta.cross(w);
    const Vec3 cross2 = theta.cross(cross);
    const double th2 = theta.squaredNorm();
    if (th2 < 1e-10) {
        return w + 0.5 * cross + cross2 / 12.0;
    }
    const double th = std::sqrt(th2);
    const double half = 0.5 * th;
    const double c = (1.0 - half * std::cos(half) / std::sin(half)) / th2;
    return w + 0.5 * cross + c * cross2;
}

Rotation project_so3(const Mat3& M) {
    if (std::abs(M.determinant()) < 1e-12) {
        throw Degenerate("project_so3: singular input");
    }
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0.0) {
        // closest special-orthogonal factor flips the weakest singular direction
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    if (M.determinant() < 0.0) {
        throw Degenerate("project_so3: input has negative determinant");
    }
    return Rotation::trusted(R);
}

double rotation_angle(const Rotation& Rot) {
    const Mat3& R = Rot.matrix();
    const double s = vee_skew_part(R).norm();
    const double c = 0.5 * (R.trace() - 1.0);
    return std::atan2(s, c);
}

}  // namespace so3cert

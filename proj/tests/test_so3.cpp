#include <doctest.h>

#include <cmath>

#include "so3cert/rng.hpp"
#include "so3cert/so3.hpp"

using namespace so3cert;

namespace {
const Vec3 e1(1, 0, 0);
const Vec3 e2(0, 1, 0);
const Vec3 e3(0, 0, 1);
}  // namespace

TEST_CASE("hat and vee invert each other") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v = rng.normal_vec3();
        CHECK((vee(hat(v)) - v).norm() == 0.0);  // component copies, bitwise exact
    }
    const Mat3 not_skew = Mat3::Identity();
    CHECK_THROWS_AS(vee(not_skew), NotSkew);
}

TEST_CASE("cross and vee operator identities on random inputs") {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        const Vec3 x = rng.normal_vec3();
        const Vec3 y = rng.normal_vec3();
        Mat3 A;
        A << rng.normal_vec3(), rng.normal_vec3(), rng.normal_vec3();
        const Rotation R = rng.uniform_rotation();

        // x^ y = x cross y = -y^ x
        const double scale_xy = 1.0 + x.norm() * y.norm();
        CHECK((hat(x) * y - x.cross(y)).norm() <= 1e-12 * scale_xy);
        CHECK((hat(x) * y + hat(y) * x).norm() <= 1e-12 * scale_xy);

        // tr[A x^] = -x . (A - A')^vee
        const double lhs3 = (A * hat(x)).trace();
        const double rhs3 = -x.dot(2.0 * vee_skew_part(A));
        CHECK(lhs3 == doctest::Approx(rhs3).epsilon(1e-12));

        // x^ A + A' x^ = ({tr[A] I - A} x)^
        const Mat3 lhs4 = hat(x) * A + A.transpose() * hat(x);
        const Mat3 rhs4 = hat((A.trace() * Mat3::Identity() - A) * x);
        CHECK((lhs4 - rhs4).norm() <= 1e-12 * (1.0 + A.norm() * x.norm()));

        // R x^ R' = (R x)^
        const Mat3 lhs5 = R.matrix() * hat(x) * R.matrix().transpose();
        CHECK((lhs5 - hat(R.matrix() * x)).norm() <= 1e-12 * (1.0 + x.norm()));
    }
}

TEST_CASE("exponential map matches Rodrigues examples") {
    // Quarter turn about e3 sends e1 to e2.
    const Rotation R = exp_so3(AxisAngle{e3, M_PI / 2});
    CHECK((R.matrix() * e1 - e2).norm() <= 1e-15);

    // trace(exp) = 1 + 2 cos(theta)
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const double th = rng.uniform(0.0, M_PI);
        const Rotation Rr = exp_so3(AxisAngle{rng.unit_vec3(), th});
        CHECK(Rr.matrix().trace() == doctest::Approx(1.0 + 2.0 * std::cos(th)).epsilon(1e-12));
        CHECK(Rr.orthonormality_residual() <= 1e-14);
    }
}

TEST_CASE("log inverts exp across the angle range") {
    Rng rng(14);
    for (int i = 0; i < 500; ++i) {
        // Sweep deliberately into both series branches and the near-pi branch.
        double th;
        switch (i % 4) {
            case 0: th = rng.uniform(1e-12, 1e-4); break;
            case 1: th = rng.uniform(1e-4, 3.0); break;
            case 2: th = rng.uniform(3.0, M_PI - 1e-6); break;
            default: th = rng.uniform(0.0, M_PI - 1e-6); break;
        }
        const Vec3 a = rng.unit_vec3();
        const Rotation R = exp_so3(AxisAngle{a, th});
        const AxisAngle back = log_so3(R);
        CHECK((exp_so3(back).matrix() - R.matrix()).norm() <= 1e-8);
        CHECK(back.angle >= 0.0);
        CHECK(back.angle <= M_PI);
    }
}

TEST_CASE("log conventions at the identity and at half turns") {
    const AxisAngle at_id = log_so3(Rotation::identity());
    CHECK(at_id.angle == 0.0);
    CHECK((at_id.axis - e1).norm() == 0.0);

    // Exactly pi: axis recovered up to sign, canonical angle pi.
    const Rotation Rpi = exp_so3(AxisAngle{e1, M_PI});
    const AxisAngle aa = log_so3(Rpi);
    CHECK(aa.angle == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(std::abs(aa.axis.dot(e1)) == doctest::Approx(1.0).epsilon(1e-9));
    // Documented tie-break: the dominant component comes out positive.
    CHECK(aa.axis(0) > 0.0);

    // Just below pi the sign must follow the skew part, not the tie-break.
    const Vec3 a(-0.6, 0.64, -0.48);
    const Vec3 an = a.normalized();
    const AxisAngle near_pi = log_so3(exp_so3(AxisAngle{an, M_PI - 1e-7}));
    CHECK(near_pi.axis.dot(an) > 0.999);
}

TEST_CASE("rotation_angle equals the log angle") {
    Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        const double th = rng.uniform(0.0, M_PI);
        const Rotation R = exp_so3(AxisAngle{rng.unit_vec3(), th});
        CHECK(rotation_angle(R) == doctest::Approx(th).epsilon(1e-9));
    }
}

TEST_CASE("dexpinv reproduces the chart derivative of the exponential") {
    // For R(t) = R0 exp(theta(t)^) with body rate w, theta' = dexpinv(theta, w).
    // Check against a central difference of the chart coordinate.
    Rng rng(16);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const Vec3 theta = rng.ball_vec3(2.5);
        const Vec3 w = rng.normal_vec3();
        const Vec3 der = dexpinv_so3(theta, w);

        // Advance the rotation by the body velocity and re-extract the chart.
        const Rotation R0 = exp_so3(theta);
        const Rotation Rp = Rotation::trusted(R0.matrix() * exp_so3(Vec3(h * w)).matrix());
        const Rotation Rm = Rotation::trusted(R0.matrix() * exp_so3(Vec3(-h * w)).matrix());
        const Vec3 fd = (log_so3_vec(Rp) - log_so3_vec(Rm)) / (2.0 * h);
        CHECK((der - fd).norm() <= 1e-6 * (1.0 + w.norm()));
    }

    // Continuity across the series/closed-form switch of the curvature
    // coefficient: two angles straddling the threshold magnitude 1e-5
    // differ by O(theta * delta), far below the tolerance.
    const Vec3 w(0.3, -0.2, 0.9);
    const Vec3 axis = Vec3(1, 1, 1).normalized();
    const Vec3 d_below = dexpinv_so3(1e-5 * (1.0 - 1e-6) * axis, w);
    const Vec3 d_above = dexpinv_so3(1e-5 * (1.0 + 1e-6) * axis, w);
    CHECK((d_below - d_above).norm() <= 1e-9);
}

TEST_CASE("project_so3 restores orthonormality and rejects degenerate input") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        const Rotation R = rng.uniform_rotation();
        Mat3 noisy = R.matrix();
        noisy += 1e-6 * Mat3::Random();
        const Rotation P = project_so3(noisy);
        CHECK(P.orthonormality_residual() <= 1e-12);
        CHECK((P.matrix() - R.matrix()).norm() <= 1e-5);
    }
    CHECK_THROWS_AS(project_so3(Mat3::Zero()), Degenerate);
    Mat3 reflected = Mat3::Identity();
    reflected(2, 2) = -1.0;
    CHECK_THROWS_AS(project_so3(reflected), Degenerate);
}

TEST_CASE("Rotation::from_matrix validates the invariants") {
    CHECK_NOTHROW(Rotation::from_matrix(Mat3::Identity()));
    Mat3 bad = Mat3::Identity();
    bad(0, 1) = 1e-3;
    CHECK_THROWS_AS(Rotation::from_matrix(bad), Degenerate);
}

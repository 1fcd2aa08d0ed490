#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "so3cert/error_maps.hpp"
#include "so3cert/jacobi.hpp"
#include "so3cert/rng.hpp"

using namespace so3cert;

TEST_CASE("chordal error function and vector basics") {
    CHECK(chordal_psi(Rotation::identity()) == 0.0);
    CHECK(err_vec_chordal(Rotation::identity()).norm() == 0.0);

    Rng rng(21);
    for (int i = 0; i < 300; ++i) {
        const double th = rng.uniform(0.0, M_PI);
        const Vec3 a = rng.unit_vec3();
        const Rotation Re = exp_so3(AxisAngle{a, th});

        // Psi = 1 - cos(theta), e_R = sin(theta) a
        CHECK(chordal_psi(Re) == doctest::Approx(1.0 - std::cos(th)).epsilon(1e-12));
        CHECK((err_vec_chordal(Re) - std::sin(th) * a).norm() <= 1e-12);

        // |e_R|^2 <= 2 Psi, the quadratic bound used by the P block
        CHECK(err_vec_chordal(Re).squaredNorm() <= 2.0 * chordal_psi(Re) + 1e-12);
    }
}

TEST_CASE("quaternionic error function and vector basics") {
    CHECK(psi_q(Rotation::identity()) == 0.0);

    Rng rng(22);
    for (int i = 0; i < 300; ++i) {
        const double th = rng.uniform(0.0, M_PI - 1e-3);
        const Vec3 a = rng.unit_vec3();
        const Rotation Re = exp_so3(AxisAngle{a, th});

        // psi_q = 2 - 2 cos(theta/2), e_q = sin(theta/2) a
        CHECK(psi_q(Re) == doctest::Approx(2.0 - 2.0 * std::cos(th / 2)).epsilon(1e-12));
        CHECK((err_vec_q(Re) - std::sin(th / 2) * a).norm() <= 1e-10);

        // |e_q|^2 <= psi_q
        CHECK(err_vec_q(Re).squaredNorm() <= psi_q(Re) + 1e-12);
    }

    const Rotation antipode = exp_so3(AxisAngle{Vec3(0, 0, 1), M_PI});
    CHECK_THROWS_AS(err_vec_q(antipode), NearAntipodal);
    bool clamped = false;
    const Vec3 guarded = err_vec_clamped(Metric::PsiQ, antipode, &clamped);
    CHECK(clamped);
    CHECK(std::isfinite(guarded.norm()));
}

TEST_CASE("transport map eigenvalue spectra") {
    // E(R)'E(R) has eigenvalues {(1+cos)/2, (1+cos)/2, cos^2};
    // E_q'E_q has {1, 1, (1+cos)/2}. 1000 random draws, 1e-10 absolute.
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
        const double th = rng.uniform(0.0, M_PI - 1e-6);
        const Vec3 a = rng.unit_vec3();
        const AxisAngle aa{a, th};
        const Rotation Re = exp_so3(aa);
        const double c = std::cos(th);

        const Mat3 E = E_map(Re.matrix());
        Eigen::VectorXd ev = jacobi_eigenvalues(E.transpose() * E);
        Eigen::Vector3d expect(c * c, 0.5 * (1 + c), 0.5 * (1 + c));
        std::sort(expect.data(), expect.data() + 3);
        CHECK((ev - expect).cwiseAbs().maxCoeff() <= 1e-10);

        const Mat3 Eq = E_q_map(aa);
        Eigen::VectorXd evq = jacobi_eigenvalues(Eq.transpose() * Eq);
        Eigen::Vector3d expect_q(0.5 * (1 + c), 1.0, 1.0);
        std::sort(expect_q.data(), expect_q.data() + 3);
        CHECK((evq - expect_q).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("error rates match finite differences of the error vectors") {
    // d/dt e_R = E(R_e) w_e and d/dt e_q = E_q w_e / 2 along R_e' = R_e w_e^.
    Rng rng(24);
    const double h = 1e-7;
    for (int i = 0; i < 100; ++i) {
        const double th = rng.uniform(1e-3, M_PI - 0.2);
        const AxisAngle aa{rng.unit_vec3(), th};
        const Rotation Re = exp_so3(aa);
        const Vec3 we = rng.normal_vec3();

        const Rotation Rp = Rotation::trusted(Re.matrix() * exp_so3(Vec3(h * we)).matrix());
        const Rotation Rm = Rotation::trusted(Re.matrix() * exp_so3(Vec3(-h * we)).matrix());

        const Vec3 analytic_R = E_map(Re.matrix()) * we;
        const Vec3 fd_R = (err_vec_chordal(Rp) - err_vec_chordal(Rm)) / (2 * h);
        CHECK((analytic_R - fd_R).norm() <= 1e-6 * (1 + we.norm()));

        const Vec3 analytic_q = 0.5 * E_q_map(aa) * we;
        const Vec3 fd_q = (err_vec_q(Rp) - err_vec_q(Rm)) / (2 * h);
        CHECK((analytic_q - fd_q).norm() <= 1e-6 * (1 + we.norm()));
    }
}

TEST_CASE("error function rates reduce to e . w_e for both metrics") {
    // d/dt Psi = e_R . w_e and d/dt psi_q = e_q . w_e.
    Rng rng(25);
    const double h = 1e-7;
    for (int i = 0; i < 100; ++i) {
        const double th = rng.uniform(1e-3, M_PI - 0.2);
        const Rotation Re = exp_so3(AxisAngle{rng.unit_vec3(), th});
        const Vec3 we = rng.normal_vec3();
        const Rotation Rp = Rotation::trusted(Re.matrix() * exp_so3(Vec3(h * we)).matrix());
        const Rotation Rm = Rotation::trusted(Re.matrix() * exp_so3(Vec3(-h * we)).matrix());

        const double fd_psi = (chordal_psi(Rp) - chordal_psi(Rm)) / (2 * h);
        CHECK(fd_psi == doctest::Approx(err_vec_chordal(Re).dot(we)).epsilon(1e-6));

        const double fd_q = (psi_q(Rp) - psi_q(Rm)) / (2 * h);
        CHECK(fd_q == doctest::Approx(err_vec_q(Re).dot(we)).epsilon(1e-6));
    }
}

TEST_CASE("metric dispatch and string round trip") {
    CHECK(metric_from_string("chordal") == Metric::Chordal);
    CHECK(metric_from_string("psi_q") == Metric::PsiQ);
    CHECK(to_string(Metric::Chordal) == "chordal");
    CHECK(to_string(Metric::PsiQ) == "psi_q");
    CHECK_THROWS_AS(metric_from_string("euler"), InputError);

    const Rotation Re = exp_so3(AxisAngle{Vec3(0, 1, 0), 0.7});
    CHECK(psi_of(Metric::Chordal, Re) == chordal_psi(Re));
    CHECK(psi_of(Metric::PsiQ, Re) == psi_q(Re));
    CHECK((err_vec(Metric::Chordal, Re) - err_vec_chordal(Re)).norm() == 0.0);
    CHECK((err_vec(Metric::PsiQ, Re) - err_vec_q(Re)).norm() == 0.0);
}

TEST_CASE("jacobi eigensolver on gram matrices and known spectra") {
    Rng rng(26);
    for (int i = 0; i < 100; ++i) {
        Eigen::MatrixXd A(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) A(r, c) = rng.normal();
        const Eigen::MatrixXd G = A.transpose() * A;
        CHECK(min_eig_sym(G) >= -1e-10 * (1.0 + G.norm()));
    }

    Eigen::MatrixXd D = Eigen::Vector3d(3.0, -1.0, 7.0).asDiagonal();
    const Eigen::VectorXd ev = jacobi_eigenvalues(D);
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(3.0));
    CHECK(ev(2) == doctest::Approx(7.0));

    Eigen::MatrixXd asym(2, 2);
    asym << 0, 1, 0, 0;
    CHECK_THROWS_AS(min_eig_sym(asym), NotSymmetric);
}

#include <doctest.h>

#include <complex>

#include "so3cert/case_study.hpp"
#include "so3cert/compensator.hpp"
#include "so3cert/rng.hpp"

using namespace so3cert;

namespace {

// Frequency-response distance between a transfer function and a realization,
// sampled on the imaginary axis.
double tf_ss_mismatch(const TransferFunction& tf, const SisoSS& ss) {
    double worst = 0.0;
    for (double w : {0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
        const std::complex<double> s(0.0, w);
        worst = std::max(worst, std::abs(tf.eval(s) - ss.eval(s)));
    }
    return worst;
}

}  // namespace

TEST_CASE("transfer function validation") {
    CHECK_NOTHROW(TransferFunction({1.0}, {1.0, 2.0}));
    CHECK_NOTHROW(TransferFunction({2.0, 1.0}, {1.0, 2.0}));          // biproper
    CHECK_THROWS_AS(TransferFunction({1.0, 0.0, 0.0}, {1.0, 2.0}), ImproperTF);
    CHECK_THROWS_AS(TransferFunction({1.0}, {}), ImproperTF);
    CHECK_THROWS_AS(TransferFunction({1.0}, {0.0, 1.0}), ImproperTF);  // zero leading coeff
}

TEST_CASE("controllable canonical realization of a lead filter") {
    // 5 (s + 2) / (s + 2.5) = 5 - 2.5 / (s + 2.5)
    const TransferFunction tf({5.0, 10.0}, {1.0, 2.5});
    const SisoSS ss = tf_to_ss(tf);
    REQUIRE(ss.order() == 1);
    CHECK(ss.A(0, 0) == doctest::Approx(-2.5));
    CHECK(ss.D == doctest::Approx(5.0));
    CHECK(ss.B(0, 0) * ss.C(0, 0) == doctest::Approx(-2.5));
    CHECK(tf_ss_mismatch(tf, ss) <= 1e-12);
}

TEST_CASE("realizations reproduce random proper transfer functions") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + static_cast<int>(rng.uniform01() * 3);
        std::vector<double> den(k + 1), num(k + 1);
        den[0] = 1.0;
        for (int i = 1; i <= k; ++i) den[i] = rng.uniform(0.5, 3.0);
        for (int i = 0; i <= k; ++i) num[i] = rng.uniform(-2.0, 2.0);
        const TransferFunction tf(num, den);
        CHECK(tf_ss_mismatch(tf, tf_to_ss(tf)) <= 1e-9);
    }
}

TEST_CASE("series interconnection multiplies responses") {
    const TransferFunction g1({5.0, 10.0}, {1.0, 2.5});
    const TransferFunction g2({1.0, 0.3}, {1.0, 4.0, 1.0});
    const SisoSS cascade = series(tf_to_ss(g1), tf_to_ss(g2));
    REQUIRE(cascade.order() == 3);
    for (double w : {0.05, 0.7, 5.0, 60.0}) {
        const std::complex<double> s(0.0, w);
        const std::complex<double> want = g1.eval(s) * g2.eval(s);
        CHECK(std::abs(cascade.eval(s) - want) <= 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("baseline pid realization and validation") {
    const CompensatorRealization K = build_baseline_pid(7.3878, 1.7238, 0.9358, 5.0);
    REQUIRE(K.n == 3);
    CHECK((K.A_K).norm() == 0.0);
    CHECK((K.B_theta - 5.0 * Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK((K.B_omega - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK((K.C_K + 0.9358 * Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK((K.D_theta + 7.3878 * Mat3::Identity()).norm() == 0.0);
    CHECK((K.D_omega + 1.7238 * Mat3::Identity()).norm() == 0.0);
    CHECK_FALSE(K.regulation_only);
    CHECK(K.axis_map == std::vector<int>({0, 1, 2}));
    CHECK_NOTHROW(K.validate());

    CHECK_THROWS_AS(build_baseline_pid(-1.0, 1.0, 1.0, 1.0), NonPositiveGain);
    CHECK_THROWS_AS(build_baseline_pid(1.0, 1.0, 1.0, 0.0), NonPositiveGain);
}

TEST_CASE("cascade ppi matches its defining feedback law") {
    const Mat3 J = benchmark_inertia();
    const Mat3 K_R = 4.383 * Mat3::Identity();
    const Mat3 K_w = 30.0 * J;
    const Mat3 K_I = 225.0 * J;
    const CompensatorRealization K = build_cascade_ppi(K_R, K_w, K_I);
    REQUIRE(K.n == 3);

    // u = -K_I x - K_w (K_R e + w); the realization stores the expansion.
    Rng rng(32);
    const Vec3 e = rng.normal_vec3(), w = rng.normal_vec3(), x = rng.normal_vec3();
    const Vec3 u_law = -K_I * x - K_w * (K_R * e + w);
    const Vec3 u_real = K.C_K * x + K.D_theta * e + K.D_omega * w;
    CHECK((u_law - u_real).norm() <= 1e-12 * (1.0 + u_law.norm()));

    // Gains coupled through J are not axis-decoupled.
    CHECK(K.axis_map.empty());

    Mat3 asym = K_R;
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(build_cascade_ppi(asym, K_w, K_I), NotSPD);
    CHECK_THROWS_AS(build_cascade_ppi(-K_R, K_w, K_I), NotSPD);
}

TEST_CASE("cascade ppid adds a washout derivative channel") {
    const Mat3 J = benchmark_inertia();
    const CompensatorRealization K =
        build_cascade_ppid(4.383 * Mat3::Identity(), 30.0 * J, 225.0 * J,
                           0.00263 * Mat3::Identity(), 75.0 * Mat3::Identity());
    REQUIRE(K.n == 6);
    CHECK(K.regulation_only);

    // The washout q' = -N q - N w settles to q = -w for constant w, so the
    // derivative output K_A N (q + w) of the filter dies out.
    const Vec3 w(0.4, -0.2, 0.7);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
    const double dt = 1e-3;
    for (int i = 0; i < 20000; ++i) {
        const Eigen::VectorXd xdot = K.A_K * x + K.B_omega * w;  // e = 0
        x += dt * xdot;
    }
    const Vec3 q = x.tail<3>();
    CHECK((q + w).norm() <= 1e-9);
}

TEST_CASE("geometrized cascade replicates the scalar chain on each axis") {
    const TransferFunction att = benchmark_leadlag_attitude_tf();
    const TransferFunction rate = benchmark_leadlag_rate_tf();
    const CompensatorRealization K = geometrize_cascade(att, rate);
    REQUIRE(K.n == 9);
    REQUIRE(K.axis_map.size() == 9);
    for (int s = 0; s < 9; ++s) CHECK(K.axis_map[s] == s / 3);

    // Per-axis attitude channel is K_w(s) K_R(s) with a sign flip: feed e on
    // one axis, compare against the product response.
    for (double w : {0.02, 0.5, 2.0, 30.0}) {
        const std::complex<double> s(0.0, w);
        const std::complex<double> want = -att.eval(s) * rate.eval(s);

        // Response of the axis-0 block of (A_K, B_theta, C_K, D_theta).
        const Eigen::MatrixXcd sI =
            s * Eigen::MatrixXcd::Identity(K.n, K.n) - K.A_K.cast<std::complex<double>>();
        const Eigen::MatrixXcd H = K.C_K.cast<std::complex<double>>() * sI.inverse() *
                                       K.B_theta.cast<std::complex<double>>() +
                                   K.D_theta.cast<std::complex<double>>();
        CHECK(std::abs(H(0, 0) - want) <= 1e-9 * (1.0 + std::abs(want)));
        CHECK(std::abs(H(1, 0)) <= 1e-12);
        CHECK(std::abs(H(2, 0)) <= 1e-12);
    }
}

TEST_CASE("first order over first order cascade stays static when orders cancel") {
    // Pure gains: K_R(s) = 2, K_w(s) = 3 gives the PD law u = -3(2 e + w).
    const CompensatorRealization K =
        geometrize_cascade(TransferFunction({2.0}, {1.0}), TransferFunction({3.0}, {1.0}));
    CHECK(K.n == 0);
    CHECK((K.D_theta + 6.0 * Mat3::Identity()).norm() == 0.0);
    CHECK((K.D_omega + 3.0 * Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("minimality report on the benchmark family") {
    for (const std::string& name : benchmark_controller_names()) {
        const ControllerSpec spec = benchmark_controller(name);
        const MinimalityReport rep = minimality_report(spec.K);
        CHECK(rep.n == spec.K.n);
        CHECK(rep.controllability_rank == spec.K.n);
        CHECK(rep.observability_rank == spec.K.n);
        CHECK(rep.minimal);
    }
    CHECK_THROWS_AS(benchmark_controller("lqr"), UnknownController);
}

TEST_CASE("validate rejects inconsistent shapes") {
    CompensatorRealization K = build_baseline_pid(1.0, 1.0, 1.0, 1.0);
    K.B_theta = Eigen::MatrixXd::Zero(2, 3);
    CHECK_THROWS_AS(K.validate(), DimensionMismatch);

    CompensatorRealization K2 = build_baseline_pid(1.0, 1.0, 1.0, 1.0);
    K2.Gamma << 0, 1, 0, 0, 0, 0, 0, 0, 0;
    CHECK_THROWS_AS(K2.validate(), NotSPD);
}

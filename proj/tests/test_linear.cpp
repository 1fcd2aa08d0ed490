#include <doctest.h>

#include <cmath>

#include "so3cert/case_study.hpp"
#include "so3cert/linear.hpp"

using namespace so3cert;

TEST_CASE("linearized closed loop dimensions and stability") {
    const Mat3 J = benchmark_inertia();
    for (const std::string& name : benchmark_controller_names()) {
        const ControllerSpec spec = benchmark_controller(name);
        const LinearClosedLoop lin = linearize_closed_loop(spec.K, J, spec.metric);
        CHECK(lin.A.rows() == 6 + spec.K.n);
        CHECK(spectral_abscissa(lin.A) < 0.0);
    }
}

TEST_CASE("linearization structure for the baseline pid") {
    // Top block rows are the attitude kinematics xi' = w_e; the velocity rows
    // carry J^-1 times the gain matrices.
    const ControllerSpec spec = benchmark_controller("pid");
    const Mat3 J = benchmark_inertia();
    const LinearClosedLoop lin = linearize_closed_loop(spec.K, J);

    CHECK((lin.A.block(0, 0, 3, 3)).norm() == 0.0);
    CHECK((lin.A.block(0, 3, 3, 3) - Mat3::Identity()).norm() == 0.0);
    CHECK((lin.A.block(3, 0, 3, 3) - J.inverse() * spec.K.D_theta).norm() <= 1e-12);
    CHECK((lin.A.block(3, 6, 3, 3) - J.inverse() * spec.K.C_K).norm() <= 1e-12);

    // The quaternionic error vector has slope one half at the origin, which
    // scales the attitude couplings.
    const LinearClosedLoop lin_q = linearize_closed_loop(spec.K, J, Metric::PsiQ);
    CHECK((lin_q.A.block(3, 0, 3, 3) - 0.5 * (J.inverse() * spec.K.D_theta)).norm() <= 1e-12);
}

TEST_CASE("spectral abscissa of known matrices") {
    Eigen::MatrixXd A(2, 2);
    A << -3, 0, 0, -0.5;
    CHECK(spectral_abscissa(A) == doctest::Approx(-0.5).epsilon(1e-12));

    // Complex pair at -1 +- 2i.
    Eigen::MatrixXd B(2, 2);
    B << -1, 2, -2, -1;
    CHECK(spectral_abscissa(B) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("second order loop step metrics match closed forms") {
    // PD law u = -kP xi - kD xi' on a unit inertia gives the textbook
    // second-order response with wn = sqrt(kP), zeta = kD / (2 sqrt(kP)).
    const double kP = 4.0, kD = 2.0;  // wn = 2, zeta = 0.5
    const CompensatorRealization K =
        geometrize_cascade(TransferFunction({kP / kD}, {1.0}), TransferFunction({kD}, {1.0}));

    StepOptions opts;
    opts.horizon = 8.0;
    const StepMetrics m = step_metrics_axis(K, 0, 1.0, opts);

    // Overshoot exp(-zeta pi / sqrt(1 - zeta^2)) = 16.3 percent.
    CHECK(m.overshoot_pct == doctest::Approx(16.3).epsilon(0.01));
    // Peak time pi / (wn sqrt(1 - zeta^2)) = 1.814 s bounds the rise time.
    CHECK(m.rise_time > 0.3);
    CHECK(m.rise_time < 1.814);
    CHECK(m.settling_time > m.rise_time);
}

TEST_CASE("lead lag cascade reproduces its design step metrics") {
    const ControllerSpec spec = benchmark_controller("leadlag");
    const double Jaxes[3] = {0.0411, 0.0478, 0.0599};
    const double rise_want[3] = {45.0, 43.6, 42.3};     // ms
    const double settle_want[3] = {88.4, 73.7, 64.7};   // ms
    const double over_want[3] = {0.0, 0.0, 0.9};        // percent

    for (int axis = 0; axis < 3; ++axis) {
        const StepMetrics m = step_metrics_axis(spec.K, axis, Jaxes[axis]);
        CHECK(std::abs(m.rise_time * 1e3 - rise_want[axis]) <= 0.15 * rise_want[axis]);
        CHECK(std::abs(m.settling_time * 1e3 - settle_want[axis]) <= 0.15 * settle_want[axis]);
        if (over_want[axis] == 0.0) {
            CHECK(m.overshoot_pct <= 0.1);
        } else {
            CHECK(std::abs(m.overshoot_pct - over_want[axis]) <= 0.15 * over_want[axis]);
        }
    }
}

TEST_CASE("unstable axis loop is reported") {
    // Positive feedback: u = +kP xi.
    CompensatorRealization K;
    K.n = 0;
    K.A_K.resize(0, 0);
    K.B_theta.resize(0, 3);
    K.B_omega.resize(0, 3);
    K.C_K.resize(3, 0);
    K.D_theta = 5.0 * Mat3::Identity();  // wrong sign: pushes away
    K.D_omega = -1.0 * Mat3::Identity();
    StepOptions opts;
    opts.horizon = 10.0;  // give the divergence room to trip the guard
    CHECK_THROWS_AS(step_metrics_axis(K, 0, 1.0, opts), UnstableLoop);
}

TEST_CASE("crossover of an ideal pd loop has a closed form") {
    // Loop gain |kP + j w kD| / w^2 = 1. With kP = 1, kD = 0 the crossover
    // is exactly 1 rad/s; with kD large it approaches kD / w^2 ... = 1.
    const double cross = loop_crossover({1.0}, {1.0}, 1.0);
    CHECK(cross == doctest::Approx(1.0).epsilon(1e-6));

    // Pure rate feedback kD s: |kD w| / w^2 = 1 at w = kD.
    const double cross_d = loop_crossover({3.0, 0.0}, {1.0}, 1.0);
    CHECK(cross_d == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("compensator chain evaluates the pid frequency response") {
    const ControllerSpec spec = benchmark_controller("pid");
    auto chain = compensator_chain(spec.K, 0);

    // For the filtered-integral law u = -kI x - kP e - kD w with x' = c e + w
    // and the rate channel folded in as w = s e, the torque-per-attitude
    // response is C_eq(s) = -(kP + kD s + kI (c + s) / s).
    for (double w : {0.1, 1.0, 10.0, 100.0}) {
        const std::complex<double> s(0.0, w);
        const std::complex<double> want =
            -(7.3878 + 1.7238 * s + 0.9358 * (5.0 + s) / s);
        const std::complex<double> got = chain(w);
        CHECK(std::abs(got - want) <= 1e-9 * std::abs(want));
    }
}

TEST_CASE("benchmark crossovers sit in the design band") {
    // The three static-gain designs were tuned for crossovers between 29 and
    // 42 rad/s (stated to whole rad/s, so the check allows half a unit).
    const Mat3 J = benchmark_inertia();
    for (const std::string& name : {"pid", "ppi", "ppid"}) {
        const ControllerSpec spec = benchmark_controller(name);
        for (int axis = 0; axis < 3; ++axis) {
            const double w = loop_crossover(compensator_chain(spec.K, axis), J(axis, axis));
            CHECK(w >= 28.5);
            CHECK(w <= 42.5);
        }
    }
}

TEST_CASE("no crossover is reported when the loop gain stays below one") {
    // A tiny pure gain never reaches unity against the double integrator
    // roll-off inside the scan window.
    CHECK_THROWS_AS(loop_crossover({1e-9}, {1.0}, 1.0, 1.0, 1e4), NoCrossover);
}

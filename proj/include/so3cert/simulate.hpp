#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "so3cert/compensator.hpp"
#include "so3cert/error_maps.hpp"
#include "so3cert/lyapunov.hpp"
#include "so3cert/so3.hpp"

namespace so3cert {

struct RigidBodyState {
    Rotation R;
    Vec3 omega = Vec3::Zero();
};

struct ReferenceState {
    Rotation R_d;
    Vec3 omega_d = Vec3::Zero();
    Vec3 omega_dot_d = Vec3::Zero();
};

/// Reference attitude source. Either a fixed setpoint (omega_d = 0) or a raw
/// target R_bar(t) smoothed by a second-order geometric filter
///   d w_d / dt = wn^2 log(R_d' R_bar(t)) - 2 zeta wn w_d,
/// which supplies the continuous (R_d, w_d, dw_d/dt) the cancellation torque
/// needs even when the raw target's velocity jumps.
struct ReferenceProgram {
    enum class Kind { Setpoint, FilteredTarget };
    Kind kind = Kind::Setpoint;
    Rotation setpoint_R;
    std::function<Rotation(double)> target;
    double omega_n = 15.0;
    double zeta = 0.707;

    static ReferenceProgram setpoint(const Rotation& R_d);
    static ReferenceProgram filtered(std::function<Rotation(double)> target, double omega_n = 15.0,
                                     double zeta = 0.707);
    /// The benchmark maneuver: a full turn about the first body axis over
    /// [0, 2] s, rest, a full turn about the second axis over (2.5, 4.5] s,
    /// identity afterwards; continuous in R with velocity jumps.
    static ReferenceProgram flip(double omega_n = 15.0, double zeta = 0.707);
};

/// Raw flip maneuver attitude at time t (see ReferenceProgram::flip).
Rotation flip_reference(double t);

/// Desired angular velocity transported to the body frame, R_e' w_d.
Vec3 transported_omega_d(const Rotation& R_e, const Vec3& omega_d);

/// Feedforward torque canceling the gyroscopic term, the transported
/// reference acceleration, and the damping of the reference motion:
///   u_C = w x J w + J (dw_v/dt) + Gamma R_e' w_d,
/// with w_v = R_e' w_d and dw_v/dt = -w_e x R_e' w_d + R_e' dw_d/dt.
/// With this torque the tracking errors obey the autonomous error dynamics.
Vec3 cancellation_torque(const Mat3& J, const Mat3& Gamma, const Rotation& R_e, const Vec3& omega,
                         const Vec3& omega_d, const Vec3& omega_dot_d);

/// One 4th-order Runge-Kutta step of the coupled body + compensator +
/// reference kinematics in exponential chart coordinates, holding the given
/// reference acceleration constant over the step. Rotations are advanced by
/// the exponential map, so they stay on the manifold by construction.
struct ClosedLoopState {
    RigidBodyState body;
    Eigen::VectorXd x_K;
    ReferenceState ref;
};

ClosedLoopState step_closed_loop(const ClosedLoopState& state, const CompensatorRealization& K,
                                 const Mat3& J, Metric metric, double dt);

/// One chart step of the reference subsystem alone under the program's law.
ReferenceState advance_reference(const ReferenceState& ref, const ReferenceProgram& prog,
                                 double t, double dt);

struct TrajectoryRecord {
    double t = 0.0;
    Rotation R, R_d;
    Vec3 omega = Vec3::Zero(), omega_d = Vec3::Zero();
    Vec3 e = Vec3::Zero(), omega_e = Vec3::Zero();
    double theta_e = 0.0;
    Vec3 u = Vec3::Zero(), u_C = Vec3::Zero();
    Eigen::VectorXd x_K;
    double V = 0.0, Vdot = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    double dt = 0.0;
    /// Number of steps where the quaternionic error map had to be clamped
    /// near the antipode (diagnostic; the chordal metric never clamps).
    int clamp_count = 0;
    /// Lyapunov monitoring (only when coefficients were supplied): steps
    /// where V increased beyond tolerance, and the largest increase seen.
    int v_violations = 0;
    double max_v_increase = 0.0;
    bool v_checked = false;

    const TrajectoryRecord& back() const { return records.back(); }
};

struct SimOptions {
    double dt = 1e-3;
    double T = 6.0;
    /// Record every record_stride steps (first and last always). 0 records
    /// only the first and last step.
    int record_stride = 1;
    /// Re-project the base rotations onto SO(3) every this many steps.
    int project_every = 1000;
    /// Tolerance for the V-monotonicity monitor: a step counts as a
    /// violation when V_next > V + v_tol * max(1, |V|).
    double v_tol = 1e-9;
    /// When set, V and dV/dt are evaluated along the trajectory.
    const LyapCoeffs* coeffs = nullptr;
};

/// Integrates the closed loop (body under feedback + cancellation torque,
/// compensator, reference program) from the given initial state with
/// x_K(0) = 0. Emits a warning to stderr when a regulation-only controller
/// is driven by a moving reference.
Trajectory simulate(const RigidBodyState& initial, const ReferenceProgram& program,
                    const CompensatorRealization& K, const Mat3& J, Metric metric,
                    const SimOptions& opts = {});

/// Integrates the autonomous error dynamics (R_e, w_e, x_K) directly. Under
/// exact cancellation these coincide with the tracking errors of the full
/// closed loop for any reference, which makes the pair a consistency check
/// of the simulator.
struct ErrorRecord {
    double t = 0.0;
    Rotation R_e;
    Vec3 omega_e = Vec3::Zero();
    Eigen::VectorXd x_K;
};

std::vector<ErrorRecord> simulate_error_autonomous(const Rotation& Re0, const Vec3& we0,
                                                   const CompensatorRealization& K, const Mat3& J,
                                                   Metric metric, const SimOptions& opts = {});

/// Writes t, theta_e in degrees, error vector, velocity error, torque, V and
/// dV/dt as CSV with full double precision (%.17g), one row per record.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

struct McOptions {
    int samples = 100;
    uint64_t seed = 2026;
    double T = 20.0;
    double dt = 1e-3;
    double omega_ball = 0.5;      ///< radius of the initial angular velocity ball
    double theta_tol = 1e-4;      ///< convergence threshold on the final angle
    double omega_tol = 1e-4;      ///< convergence threshold on |w_e| at the end
    const LyapCoeffs* coeffs = nullptr;
};

/// Randomized regulation study: initial attitudes drawn uniformly on SO(3),
/// with every fourth sample forced near the antipode (angle in
/// [3.0, pi - 1e-3]), initial rates in a ball, compensator at rest. Each
/// sample is integrated to T and checked for convergence; when Lyapunov
/// coefficients are supplied, monotonicity of V is monitored on every step.
struct McReport {
    int samples = 0;
    int converged = 0;
    int near_antipodal_samples = 0;
    double max_final_theta = 0.0;
    double max_final_omega = 0.0;
    bool v_checked = false;
    int v_violations = 0;
    double max_v_increase = 0.0;
};

McReport monte_carlo_agas(const CompensatorRealization& K, const Mat3& J, Metric metric,
                          const McOptions& opts = {});

void save_mc_report(const McReport& rep, const std::string& path);

}  // namespace so3cert

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "so3cert/error_maps.hpp"
#include "so3cert/so3.hpp"

namespace so3cert {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dynamic attitude compensator
///
///   x_K' = A_K x_K + B_theta e + B_omega w_e
///   u    = C_K x_K + D_theta e + D_omega w_e
///
/// where e is the metric's attitude error vector and w_e the angular velocity
/// error. Gamma is a known plant damping matrix (torque -Gamma*w acting on the
/// body); it shifts the closed-loop damping to D_omega - Gamma and is zero by
/// default.
struct CompensatorRealization {
    int n = 0;
    MatrixXd A_K;      // n x n
    MatrixXd B_theta;  // n x 3
    MatrixXd B_omega;  // n x 3
    MatrixXd C_K;      // 3 x n
    Mat3 D_theta = Mat3::Zero();
    Mat3 D_omega = Mat3::Zero();
    Mat3 Gamma = Mat3::Zero();

    /// Set when the realization is only valid for setpoint regulation
    /// (derivation assumed w_e = w, i.e. a constant attitude command).
    bool regulation_only = false;

    /// When the realization is axis-decoupled, axis_map[s] gives the body
    /// axis driven by compensator state s; empty otherwise. Enables the
    /// optional per-axis structural restriction of the certification problem.
    std::vector<int> axis_map;

    /// Throws DimensionMismatch / NotSPD on inconsistent shapes or an
    /// asymmetric / indefinite Gamma.
    void validate() const;

    /// Closed-loop damping matrix D_omega - Gamma.
    Mat3 effective_D_omega() const { return D_omega - Gamma; }
};

/// Rational transfer function with real coefficients in descending powers
/// of s. Must be proper: deg(num) <= deg(den), den leading coefficient != 0.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;

    TransferFunction(std::vector<double> numerator, std::vector<double> denominator);

    std::complex<double> eval(std::complex<double> s) const;
    int degree() const { return static_cast<int>(den.size()) - 1; }
};

/// Minimal SISO state-space quadruple.
struct SisoSS {
    MatrixXd A;  // k x k
    MatrixXd B;  // k x 1
    MatrixXd C;  // 1 x k
    double D = 0.0;

    int order() const { return static_cast<int>(A.rows()); }
    std::complex<double> eval(std::complex<double> s) const;
};

/// Multi-input/multi-output quadruple used for per-axis block assembly.
struct MimoSS {
    MatrixXd A, B, C, D;
};

/// Controllable-canonical realization of a proper transfer function.
/// Throws ImproperTF when deg(num) > deg(den).
SisoSS tf_to_ss(const TransferFunction& tf);

/// Series interconnection u -> g1 -> g2 -> y.
SisoSS series(const SisoSS& g1, const SisoSS& g2);

/// Block-diagonal MIMO system from three per-axis SISO systems, states
/// grouped per axis: [axis-0 states | axis-1 states | axis-2 states].
MimoSS blockdiag_axes(const SisoSS& gx, const SisoSS& gy, const SisoSS& gz);

/// Proportional-derivative-integral attitude law with filtered integral state
///   x_K' = c e + w_e,  u = -kI x_K - kP e - kD w_e.
/// All gains must be positive.
CompensatorRealization build_baseline_pid(double kP, double kD, double kI, double c);

/// Rate/attitude cascade with proportional attitude loop K_R and PI rate loop
/// (K_w, K_I), realized as
///   x_K' = K_R e + w_e,  u = -K_I x_K - K_w K_R e - K_w w_e.
/// Gains must be symmetric positive definite.
CompensatorRealization build_cascade_ppi(const Mat3& K_R, const Mat3& K_w, const Mat3& K_I);

/// Rate/attitude cascade with PID rate loop: adds a filtered-derivative
/// (washout) state q' = -N q - N w with acceleration gain K_A,
///   u = -K_I e_I - K_A N q - K_w K_R e - (K_w + K_A N) w_e.
/// N must be diagonal positive definite; the result is flagged
/// regulation_only because the derivative channel assumes w_e = w.
CompensatorRealization build_cascade_ppid(const Mat3& K_R, const Mat3& K_w, const Mat3& K_I,
                                          const Mat3& K_A, const Mat3& N);

/// Per-axis dynamic cascade u = -K_w(s) [K_R(s) e + w_e], replicated on the
/// three body axes. With first-order-over-first-order filters this reduces to
/// the static PD case (n = 0).
CompensatorRealization geometrize_cascade(const TransferFunction& K_R_tf,
                                          const TransferFunction& K_w_tf);

/// Numerical minimality check of (A_K, [B_theta B_omega], C_K).
struct MinimalityReport {
    int n = 0;
    int controllability_rank = 0;
    int observability_rank = 0;
    bool minimal = true;
};

MinimalityReport minimality_report(const CompensatorRealization& K);

/// Controller spec as stored on disk: realization plus the attitude error
/// metric it was designed for.
struct ControllerSpec {
    CompensatorRealization K;
    Metric metric = Metric::Chordal;
};

/// JSON round trip for controller spec files. Field names: n, A_K, B_theta,
/// B_omega, C_K, D_theta, D_omega, optional Gamma, optional axis_map,
/// optional regulation_only, metric; matrices as row-major arrays of arrays.
/// Load validates every dimension and throws InputError on any mismatch.
void save_controller_spec(const ControllerSpec& spec, const std::string& path);
ControllerSpec load_controller_spec(const std::string& path);

}  // namespace so3cert

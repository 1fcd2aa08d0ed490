#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "so3cert/compensator.hpp"
#include "so3cert/error_maps.hpp"
#include "so3cert/so3.hpp"

namespace so3cert {

/// Coefficients of the composite Lyapunov candidate
///
///   V = 2 p11 Psi(R_e) + w_e' P22 J w_e + 2 e' P21' J w_e
///       + x_K' P33 x_K + 2 x_K' P31 e + 2 x_K' P32 J w_e
///
/// P33 is symmetric; P22 J must be symmetric, which the assembled problem
/// enforces with equality constraints. The quadratic lower bound on the Psi
/// term differs per metric: 2 Psi >= |e|^2 for the chordal error and
/// Psi_q >= |e_q|^2 for the quaternion-consistent one.
struct LyapCoeffs {
    double p11 = 0.0;
    Mat3 P21 = Mat3::Zero();
    Mat3 P22 = Mat3::Zero();
    Eigen::MatrixXd P31;  // n x 3
    Eigen::MatrixXd P32;  // n x 3
    Eigen::MatrixXd P33;  // n x n symmetric
};

/// Slack variables splitting the state-dependent part of dV/dt from the
/// constant part: tau1, tau2 bound the norms of P31 and J P21 through the two
/// Schur-complement blocks, N2 and N3 absorb the bounds into the main matrix.
struct SlackVars {
    double tau1 = 0.0;
    double tau2 = 0.0;
    Mat3 N2 = Mat3::Zero();
    Eigen::MatrixXd N3;  // n x n symmetric
};

enum class BlockSense {
    PSD,          // must be >= epsilon * I
    NSD,          // must be <= -epsilon * I
    PSDNonstrict  // must be >= 0
};

/// One symmetric matrix constraint, affine in the decision vector x:
///   B(x) = F0 + sum_i x[coeffs[i].first] * coeffs[i].second.
struct AffineSymBlock {
    std::string name;
    BlockSense sense = BlockSense::PSD;
    int dim = 0;
    Eigen::MatrixXd F0;
    std::vector<std::pair<int, Eigen::MatrixXd>> coeffs;

    Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
    /// eval() negated for NSD blocks, so that every sense reads "PSD enough".
    Eigen::MatrixXd eval_normalized(const Eigen::VectorXd& x) const;
};

/// Offsets of the packed decision vector
/// [p11 | P21 row-major | P22 row-major | P31 | P32 | P33 packed | tau1 |
///  tau2 | N2 packed | N3 packed], symmetric blocks packed as the upper
/// triangle row by row. Total 27 + 6n + n(n+1) entries.
struct Layout {
    int n = 0;
    int p11 = 0, P21 = 0, P22 = 0, P31 = 0, P32 = 0, P33 = 0;
    int tau1 = 0, tau2 = 0, N2 = 0, N3 = 0;
    int dim = 0;

    explicit Layout(int n_states);
};

Eigen::VectorXd pack(const Layout& L, const LyapCoeffs& P, const SlackVars& S);
void unpack(const Layout& L, const Eigen::VectorXd& x, LyapCoeffs& P, SlackVars& S);

/// Full feasibility problem: blocks affine in x, linear equalities
/// Aeq x = beq, target margin epsilon for the strict blocks.
struct LmiProblem {
    int dim = 0;
    std::vector<AffineSymBlock> blocks;
    Eigen::MatrixXd Aeq;  // may have zero rows
    Eigen::VectorXd beq;
    double epsilon = 0.0;
    /// Optional per-variable scaling applied inside the solver to even out
    /// the conditioning (ones when empty).
    Eigen::VectorXd var_scale;
};

/// Default strictness margin, scaled to the inertia: 1e-6 * (1 + ||J||_2).
double default_epsilon(const Mat3& J);

/// Quadratic-form matrix of V in the coordinates (e, w_e, x_K), i.e. the
/// (6+n) x (6+n) symmetric matrix P with
///   V = z' P z + 2 p11 (Psi - |e|^2 / 2) correction absorbed:
/// V >= z' P z exactly when Psi >= |e|^2 / (2) holds for the metric, so P
/// being positive definite certifies positivity of V. Evaluated at the given
/// coefficients.
Eigen::MatrixXd assemble_P_matrix(const LyapCoeffs& P, const Mat3& J, Metric metric);
AffineSymBlock assemble_P(const LyapCoeffs& P, const Mat3& J, Metric metric);

/// Quadratic-form matrix M0 of dV/dt along the closed loop, before the
/// state-dependent terms are bounded: dV/dt = z' M0 z + remainder, with the
/// remainder handled by the slack blocks. Evaluated at the given
/// coefficients.
Eigen::MatrixXd assemble_M0_matrix(const LyapCoeffs& P, const CompensatorRealization& K,
                                   const Mat3& J);
AffineSymBlock assemble_M0(const LyapCoeffs& P, const CompensatorRealization& K, const Mat3& J);

/// Main certification matrix: M0 plus the slack contributions
/// (tau1 + tau2) I + N2 in the velocity block and N3 in the compensator
/// block. Must be <= -epsilon I. Metric-independent; the metric only sets
/// the factor on tau inside the Schur blocks and the P bound.
Eigen::MatrixXd assemble_M_matrix(const LyapCoeffs& P, const SlackVars& S,
                                  const CompensatorRealization& K, const Mat3& J);

/// Assembles the complete list of LMI blocks and equality constraints whose
/// joint feasibility certifies almost global asymptotic stability:
///   "P"          (6+n)  PSD      composite Lyapunov matrix
///   "M"          (6+n)  NSD      dV/dt bound with slacks
///   "schur_w"    (6)    PSD>=0   [[N2, J P21], [P21' J, f tau2 I]]
///   "schur_x"    (3+n)  PSD>=0   [[N3, P31], [P31', f tau1 I]]
///   "tau1","tau2"(1)    PSD      slack positivity
/// with f = 1 for the chordal metric and f = 4 for the quaternion-consistent
/// one (its error-map derivative carries a factor 1/2). Equalities enforce
/// symmetry of P22 J and of P22. With decoupled = true the problem is
/// restricted to per-axis structure using the controller's axis_map
/// (throws IllPosed when the controller has none or is not axis-decoupled).
LmiProblem assemble_certification_lmis(const CompensatorRealization& K, const Mat3& J,
                                       Metric metric, double epsilon, bool decoupled = false);

/// Lyapunov function value at a state of the error system.
double eval_V(const LyapCoeffs& P, const Mat3& J, Metric metric, const Rotation& R_e,
              const Vec3& w_e, const Eigen::VectorXd& x_K);

/// Exact time derivative of V along the closed-loop error dynamics, computed
/// from the differentials of every term (no symmetry assumptions). For the
/// quaternion metric the error-map derivative is clamped near the antipode,
/// where the map itself is singular; values there are diagnostic only.
double eval_Vdot(const LyapCoeffs& P, const CompensatorRealization& K, const Mat3& J,
                 Metric metric, const Rotation& R_e, const Vec3& w_e, const Eigen::VectorXd& x_K);

/// Independent a-posteriori check of a candidate certificate: reassembles
/// every block at the point and measures its eigenvalue margin with the
/// built-in Jacobi solver. margin = min eig of the sign-normalized block;
/// pass requires margin >= epsilon for strict blocks and >= 0 for the Schur
/// blocks.
struct VerifyReport {
    bool pass = false;
    std::map<std::string, double> margins;
    double epsilon = 0.0;
};

VerifyReport verify_certificate(const LyapCoeffs& P, const SlackVars& S,
                                const CompensatorRealization& K, const Mat3& J, Metric metric,
                                double epsilon);

}  // namespace so3cert

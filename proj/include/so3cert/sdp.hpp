#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "so3cert/lyapunov.hpp"

namespace so3cert {

enum class FeasibilityStatus {
    Feasible,             ///< strictly feasible point with margin >= epsilon found
    CertificateNotFound,  ///< search stalled with no sign of a feasible point
    MaxIterations         ///< iteration budget exhausted before a decision
};

std::string to_string(FeasibilityStatus s);

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::CertificateNotFound;
    Eigen::VectorXd x;     ///< decision vector, normalized to |x|_inf = 100 when homogeneous
    double t_star = 0.0;   ///< achieved uniform eigenvalue margin at x
    int outer_iterations = 0;
    int newton_iterations = 0;
    /// Minimum eigenvalue of every sign-normalized block at x.
    std::map<std::string, double> block_min_eigs;

    bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

struct SolveOptions {
    double eta0 = 1.0;          ///< initial barrier weight on the margin objective
    double eta_growth = 5.0;    ///< multiplicative weight increase per outer iteration
    double newton_tol = 1e-8;   ///< stop inner loop when lambda^2 / 2 falls below
    int outer_cap = 60;
    int inner_cap = 50;
    double ball_radius = 1e4;   ///< compactifies the homogeneous feasible cone
    double t_cap = 1e3;         ///< upper barrier on the margin variable
    double norm_target = 100.0; ///< post-solve |x|_inf normalization (homogeneous only)
    /// Early exit once the margin clears max(100 epsilon, early_exit_abs).
    double early_exit_abs = 1e-3;
    bool verbose = false;
};

/// Interior-point search for a strictly feasible point of the LMI problem:
/// maximizes the uniform margin t subject to every sign-normalized block
/// satisfying B_k(x) - t I >= 0 and Aeq x = beq, by following the central
/// path of a log-det barrier with a ball compactification (the certification
/// problem is homogeneous, so feasible rays must be pinned to a bounded
/// region and rescaled afterwards).
///
/// Returns Feasible iff the final margin reaches problem.epsilon. Throws
/// IllPosed when the equality rows are linearly dependent or inconsistent.
FeasibilityResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts = {});

}  // namespace so3cert

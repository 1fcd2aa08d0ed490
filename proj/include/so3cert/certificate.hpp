#pragma once

#include <map>
#include <string>

#include "so3cert/lyapunov.hpp"

namespace so3cert {

/// Serializable stability certificate: the Lyapunov coefficients and slack
/// variables found by the feasibility search, the margin they were checked
/// against, and the per-block eigenvalue margins measured at verification.
struct Certificate {
    Metric metric = Metric::Chordal;
    double epsilon = 0.0;
    LyapCoeffs P;
    SlackVars S;
    std::map<std::string, double> margins;

    int n() const { return static_cast<int>(P.P31.rows()); }
};

/// Builds a certificate from a packed decision vector: unpacks per the layout
/// for the controller order and fills the margins from an independent
/// verification pass.
Certificate make_certificate(const Eigen::VectorXd& x, const CompensatorRealization& K,
                             const Mat3& J, Metric metric, double epsilon);

/// JSON round trip. Fields: metric, epsilon, p11, P21, P22, P31, P32, P33,
/// tau1, tau2, N2, N3, margins; matrices as row-major arrays of arrays.
void save_certificate(const Certificate& cert, const std::string& path);
Certificate load_certificate(const std::string& path);

}  // namespace so3cert

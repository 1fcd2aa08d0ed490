#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "so3cert/compensator.hpp"
#include "so3cert/error_maps.hpp"

namespace so3cert {

/// Closed-loop error dynamics linearized about the zero-error equilibrium,
/// states (attitude error xi, rate error, compensator state), dimension
/// 6 + n. The metric sets the small-angle slope of the error vector
/// (1 for chordal, 1/2 for the quaternion-consistent one), which scales the
/// attitude coupling columns.
struct LinearClosedLoop {
    Eigen::MatrixXd A;
    int n = 0;
};

LinearClosedLoop linearize_closed_loop(const CompensatorRealization& K, const Mat3& J,
                                       Metric metric = Metric::Chordal);

/// Largest real part of the eigenvalues of A. Throws NoConvergence when the
/// eigenvalue iteration fails.
double spectral_abscissa(const Eigen::MatrixXd& A);

struct StepMetrics {
    double rise_time = 0.0;      ///< 10% to 90% of the final value, seconds
    double settling_time = 0.0;  ///< last exit from the 2% band, seconds
    double overshoot_pct = 0.0;  ///< peak above the final value, percent
};

struct StepOptions {
    double dt = 1e-5;
    double horizon = 1.0;
    Metric metric = Metric::Chordal;
};

/// Unit attitude step response of one axis: the full compensator driving a
/// scalar double-integrator plant with inertia J_axis (exact for per-axis
/// decoupled controllers). Throws UnstableLoop when the axis loop is
/// unstable and NoConvergence when the metrics are not resolved within the
/// horizon.
StepMetrics step_metrics_axis(const CompensatorRealization& K, int axis, double J_axis,
                              const StepOptions& opts = {});

/// Equivalent single-axis compensator frequency response: the transfer from
/// an attitude perturbation of the axis to the torque it commands, with the
/// rate channel folded in as s times the attitude,
///   C_eq(s) = [C (sI - A)^-1 (B_theta + s B_omega) + D_theta + s D_omega]
/// restricted to the axis.
std::function<std::complex<double>(double)> compensator_chain(const CompensatorRealization& K,
                                                              int axis,
                                                              Metric metric = Metric::Chordal);

/// Gain crossover frequency of the axis loop |C_eq(j w)| / (J_axis w^2) = 1:
/// scans a logarithmic grid for the first downward unity crossing and
/// bisects it. Throws NoCrossover when the loop gain never crosses unity.
double loop_crossover(const std::function<std::complex<double>(double)>& chain, double J_axis,
                      double w_lo = 1e-2, double w_hi = 1e4);

/// Same, for a compensator chain given as a rational function num/den in
/// descending powers of s. The chain may be improper (the plant roll-off
/// dominates), so this takes raw polynomials rather than a TransferFunction.
double loop_crossover(const std::vector<double>& num, const std::vector<double>& den,
                      double J_axis, double w_lo = 1e-2, double w_hi = 1e4);

}  // namespace so3cert

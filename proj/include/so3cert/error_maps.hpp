#pragma once

#include "so3cert/so3.hpp"

namespace so3cert {

/// Attitude error metric selecting which error function drives the controller
/// and the Lyapunov analysis.
enum class Metric {
    Chordal,  ///< Psi = tr(I - R_e)/2, error vector e_R = (R_e - R_e')^vee / 2
    PsiQ,     ///< Psi_q = 2 - sqrt(1 + tr R_e), quaternionic error vector e_q
};

Metric metric_from_string(const std::string& s);
std::string to_string(Metric m);

/// Chordal attitude error function, tr(I - R_e)/2, in [0, 2].
double chordal_psi(const Rotation& R_e);

/// Chordal error vector (R_e - R_e')^vee / 2 = sin(theta) * axis.
Vec3 err_vec_chordal(const Rotation& R_e);

/// Transport map E(M) = (tr(M) I - M') / 2.
/// For a rotation R_e it relates the error-vector rate to the angular
/// velocity error: d/dt e_R = E(R_e) w_e.
Mat3 E_map(const Mat3& M);

/// Quaternionic attitude error function, 2 - sqrt(1 + tr R_e), in [0, 2].
double psi_q(const Rotation& R_e);

/// Quaternionic error vector (R_e - R_e')^vee / (2 sqrt(1 + tr R_e)).
/// Throws NearAntipodal when 1 + tr R_e < guard.
Vec3 err_vec_q(const Rotation& R_e, double guard = 1e-10);

/// Transport map for the quaternionic error vector in axis-angle form:
/// E_q = [(1 + cos th) I + sin(th) a^] / sqrt(2 + 2 cos th),
/// with d/dt e_q = E_q w_e / 2. Throws NearAntipodal near th = pi.
Mat3 E_q_map(const AxisAngle& aa, double guard = 1e-10);

/// E_q_map with the denominator clamped at the guard instead of throwing;
/// sets *clamped when the guard was active. Diagnostic companion of
/// err_vec_clamped.
Mat3 E_q_map_clamped(const AxisAngle& aa, bool* clamped, double guard = 1e-10);

/// Metric-dispatched error function value.
double psi_of(Metric m, const Rotation& R_e);

/// Metric-dispatched error vector.
Vec3 err_vec(Metric m, const Rotation& R_e);

/// Metric-dispatched error vector with the quaternionic branch clamped at the
/// guard instead of throwing; sets *clamped when the guard was active.
/// Lets simulations continue with a diagnostic when a trajectory approaches
/// the 180 degree boundary of the Psi_q analysis domain.
Vec3 err_vec_clamped(Metric m, const Rotation& R_e, bool* clamped, double guard = 1e-10);

}  // namespace so3cert

#include "so3cert/error_maps.hpp"

#include <cmath>

namespace so3cert {

Metric metric_from_string(const std::string& s) {
    if (s == "chordal") return Metric::Chordal;
    if (s == "psi_q") return Metric::PsiQ;
    throw InputError("unknown metric '" + s + "' (expected chordal or psi_q)");
}

std::string to_string(Metric m) {
    return m == Metric::Chordal ? "chordal" : "psi_q";
}

double chordal_psi(const Rotation& R_e) {
    return 0.5 * (3.0 - R_e.matrix().trace());
}

Vec3 err_vec_chordal(const Rotation& R_e) {
    return vee_skew_part(R_e.matrix());
}

Mat3 E_map(const Mat3& M) {
    return 0.5 * (M.trace() * Mat3::Identity() - M.transpose());
}

double psi_q(const Rotation& R_e) {
    const double t = std::max(1.0 + R_e.matrix().trace(), 0.0);
    return 2.0 - std::sqrt(t);
}

Vec3 err_vec_q(const Rotation& R_e, double guard) {
    const double t = 1.0 + R_e.matrix().trace();
    if (t < guard) {
        throw NearAntipodal("err_vec_q: 1 + tr(R_e) = " + std::to_string(t) +
                            " below guard " + std::to_string(guard));
    }
    return vee_skew_part(R_e.matrix()) / std::sqrt(t);
}

Mat3 E_q_map(const AxisAngle& aa, double guard) {
    const double c = std::cos(aa.angle);
    const double t = 2.0 + 2.0 * c;
    if (t < guard) {
        throw NearAntipodal("E_q_map: 2 + 2 cos(theta) below guard near theta = pi");
    }
    return ((1.0 + c) * Mat3::Identity() + std::sin(aa.angle) * hat(aa.axis)) / std::sqrt(t);
}

Mat3 E_q_map_clamped(const AxisAngle& aa, bool* clamped, double guard) {
    if (clamped != nullptr) *clamped = false;
    const double c = std::cos(aa.angle);
    double t = 2.0 + 2.0 * c;
    if (t < guard) {
        if (clamped != nullptr) *clamped = true;
        t = guard;
    }
    return ((1.0 + c) * Mat3::Identity() + std::sin(aa.angle) * hat(aa.axis)) / std::sqrt(t);
}

double psi_of(Metric m, const Rotation& R_e) {
    return m == Metric::Chordal ? chordal_psi(R_e) : psi_q(R_e);
}

Vec3 err_vec(Metric m, const Rotation& R_e) {
    return m == Metric::Chordal ? err_vec_chordal(R_e) : err_vec_q(R_e);
}

Vec3 err_vec_clamped(Metric m, const Rotation& R_e, bool* clamped, double guard) {
    if (clamped != nullptr) *clamped = false;
    if (m == Metric::Chordal) return err_vec_chordal(R_e);
    const double t = 1.0 + R_e.matrix().trace();
    if (t < guard) {
        if (clamped != nullptr) *clamped = true;
        return vee_skew_part(R_e.matrix()) / std::sqrt(guard);
    }
    return vee_skew_part(R_e.matrix()) / std::sqrt(t);
}

}  // namespace so3cert

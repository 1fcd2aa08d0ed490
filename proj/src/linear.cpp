#include "so3cert/linear.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "so3cert/errors.hpp"
#include "so3cert/jacobi.hpp"

namespace so3cert {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double error_slope(Metric metric) { return metric == Metric::PsiQ ? 0.5 : 1.0; }

std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> s) {
    std::complex<double> acc(0.0, 0.0);
    for (double c : coeffs) acc = acc * s + c;
    return acc;
}

}  // namespace

LinearClosedLoop linearize_closed_loop(const CompensatorRealization& K, const Mat3& J,
                                       Metric metric) {
    K.validate();
    const double jscale = std::max(1.0, J.cwiseAbs().maxCoeff());
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-9 * jscale || min_eig_sym(J) <= 0.0) {
        throw SingularInertia("inertia matrix must be symmetric positive definite");
    }
    const double sl = error_slope(metric);
    const int n = K.n;
    const auto Jinv = J.ldlt();

    LinearClosedLoop L;
    L.n = n;
    L.A = MatrixXd::Zero(6 + n, 6 + n);
    L.A.block(0, 3, 3, 3) = Mat3::Identity();
    L.A.block(3, 0, 3, 3) = Jinv.solve(Mat3(sl * K.D_theta));
    L.A.block(3, 3, 3, 3) = Jinv.solve(Mat3(K.effective_D_omega()));
    if (n > 0) {
        L.A.block(3, 6, 3, n) = Jinv.solve(MatrixXd(K.C_K));
        L.A.block(6, 0, n, 3) = sl * K.B_theta;
        L.A.block(6, 3, n, 3) = K.B_omega;
        L.A.block(6, 6, n, n) = K.A_K;
    }
    return L;
}

double spectral_abscissa(const MatrixXd& A) {
    Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("eigenvalue iteration failed on the closed-loop matrix");
    }
    return es.eigenvalues().real().maxCoeff();
}

StepMetrics step_metrics_axis(const CompensatorRealization& K, int axis, double J_axis,
                              const StepOptions& opts) {
    K.validate();
    if (axis < 0 || axis > 2) throw InputError("axis must be 0, 1 or 2");
    if (J_axis <= 0.0) throw SingularInertia("axis inertia must be positive");
    const double sl = error_slope(opts.metric);
    const int n = K.n;

    // Unit step: the commanded axis angle jumps to 1, so the error seen by
    // the compensator is (theta - 1) and the rate error is the axis rate.
    const Vec3 ea = Vec3::Unit(axis);
    const Mat3 Dw_eff = K.effective_D_omega();
    auto deriv = [&](const VectorXd& z, VectorXd& dz) {
        const double th = z[0];
        const double w = z[1];
        const Vec3 e = sl * (th - 1.0) * ea;
        const Vec3 we = w * ea;
        const Vec3 u = (n > 0 ? Vec3(K.C_K * z.tail(n)) : Vec3::Zero()) + K.D_theta * e +
                       Dw_eff * we;
        dz[0] = w;
        dz[1] = u[axis] / J_axis;
        if (n > 0) dz.tail(n) = K.A_K * z.tail(n) + K.B_theta * e + K.B_omega * we;
    };

    const int steps = static_cast<int>(std::llround(opts.horizon / opts.dt));
    VectorXd z = VectorXd::Zero(2 + n);
    VectorXd k1(2 + n), k2(2 + n), k3(2 + n), k4(2 + n);

    double t_rise10 = -1.0, t_rise90 = -1.0, t_settle = 0.0;
    double peak = 0.0;
    bool inside_band = false;
    double prev_y = 0.0;

    for (int i = 0; i <= steps; ++i) {
        const double t = i * opts.dt;
        const double y = z[0];
        if (!std::isfinite(y) || std::abs(y) > 1e6) {
            throw UnstableLoop("axis " + std::to_string(axis) +
                               " step response diverged; the loop is unstable");
        }
        peak = std::max(peak, y);
        if (t_rise10 < 0.0 && y >= 0.1) {
            const double f = i > 0 ? (0.1 - prev_y) / (y - prev_y) : 0.0;
            t_rise10 = t - opts.dt + f * opts.dt;
        }
        if (t_rise90 < 0.0 && y >= 0.9) {
            const double f = i > 0 ? (0.9 - prev_y) / (y - prev_y) : 0.0;
            t_rise90 = t - opts.dt + f * opts.dt;
        }
        const bool in_band = std::abs(y - 1.0) <= 0.02;
        if (!in_band) {
            t_settle = t;
            inside_band = false;
        } else if (!inside_band) {
            inside_band = true;
            t_settle = t;
        }
        prev_y = y;
        if (i == steps) break;

        deriv(z, k1);
        deriv(VectorXd(z + 0.5 * opts.dt * k1), k2);
        deriv(VectorXd(z + 0.5 * opts.dt * k2), k3);
        deriv(VectorXd(z + opts.dt * k3), k4);
        z += (opts.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    if (t_rise90 < 0.0 || !inside_band) {
        throw NoConvergence("step response did not resolve rise/settling within the horizon");
    }
    StepMetrics m;
    m.rise_time = t_rise90 - t_rise10;
    m.settling_time = t_settle;
    m.overshoot_pct = std::max(0.0, (peak - 1.0) * 100.0);
    return m;
}

std::function<std::complex<double>(double)> compensator_chain(const CompensatorRealization& K,
                                                              int axis, Metric metric) {
    K.validate();
    if (axis < 0 || axis > 2) throw InputError("axis must be 0, 1 or 2");
    const double sl = error_slope(metric);
    const int n = K.n;
    const MatrixXd A = K.A_K;
    const VectorXd bt = sl * K.B_theta.col(axis);
    const VectorXd bw = K.B_omega.col(axis);
    const Eigen::RowVectorXd c = K.C_K.row(axis);
    const double dt_ = sl * K.D_theta(axis, axis);
    const double dw_ = K.effective_D_omega()(axis, axis);

    return [A, bt, bw, c, dt_, dw_, n](double w) -> std::complex<double> {
        const std::complex<double> s(0.0, w);
        std::complex<double> val = dt_ + s * dw_;
        if (n > 0) {
            Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) -
                                 A.cast<std::complex<double>>();
            Eigen::VectorXcd rhs = bt.cast<std::complex<double>>() +
                                   s * bw.cast<std::complex<double>>();
            Eigen::VectorXcd x = M.partialPivLu().solve(rhs);
            val += (c.cast<std::complex<double>>() * x)(0);
        }
        return val;
    };
}

double loop_crossover(const std::function<std::complex<double>(double)>& chain, double J_axis,
                      double w_lo, double w_hi) {
    if (J_axis <= 0.0) throw SingularInertia("axis inertia must be positive");
    if (!(w_lo > 0.0) || !(w_hi > w_lo)) throw InputError("invalid frequency range");

    auto gain = [&](double w) { return std::abs(chain(w)) / (J_axis * w * w); };

    const int grid = 200;
    double prev_w = w_lo;
    double prev_g = gain(w_lo);
    if (prev_g < 1.0) {
        throw NoCrossover("loop gain is below unity at the low end of the band");
    }
    for (int i = 1; i <= grid; ++i) {
        const double w = w_lo * std::pow(w_hi / w_lo, static_cast<double>(i) / grid);
        const double g = gain(w);
        if (prev_g >= 1.0 && g < 1.0) {
            double lo = prev_w, hi = w;
            for (int it = 0; it < 80; ++it) {
                const double mid = std::sqrt(lo * hi);
                if (gain(mid) >= 1.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return std::sqrt(lo * hi);
        }
        prev_w = w;
        prev_g = g;
    }
    throw NoCrossover("loop gain never crossed unity in the scanned band");
}

double loop_crossover(const std::vector<double>& num, const std::vector<double>& den,
                      double J_axis, double w_lo, double w_hi) {
    if (den.empty()) throw InputError("chain denominator must be nonempty");
    auto chain = [num, den](double w) {
        const std::complex<double> s(0.0, w);
        return horner(num, s) / horner(den, s);
    };
    return loop_crossover(chain, J_axis, w_lo, w_hi);
}

}  // namespace so3cert

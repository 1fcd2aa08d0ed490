#include "so3cert/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "so3cert/errors.hpp"
#include "so3cert/rng.hpp"

namespace so3cert {

using Eigen::VectorXd;

ReferenceProgram ReferenceProgram::setpoint(const Rotation& R_d) {
    ReferenceProgram p;
    p.kind = Kind::Setpoint;
    p.setpoint_R = R_d;
    return p;
}

ReferenceProgram ReferenceProgram::filtered(std::function<Rotation(double)> target, double omega_n,
                                            double zeta) {
    ReferenceProgram p;
    p.kind = Kind::FilteredTarget;
    p.target = std::move(target);
    p.omega_n = omega_n;
    p.zeta = zeta;
    return p;
}

ReferenceProgram ReferenceProgram::flip(double omega_n, double zeta) {
    return filtered([](double t) { return flip_reference(t); }, omega_n, zeta);
}

Rotation flip_reference(double t) {
    if (t >= 0.0 && t <= 2.0) {
        return exp_so3(Vec3(2.0 * M_PI * t * Vec3::UnitX()));
    }
    if (t > 2.5 && t <= 4.5) {
        return exp_so3(Vec3(2.0 * M_PI * (t - 2.5) * Vec3::UnitY()));
    }
    return Rotation::identity();
}

Vec3 transported_omega_d(const Rotation& R_e, const Vec3& omega_d) {
    return R_e.matrix().transpose() * omega_d;
}

Vec3 cancellation_torque(const Mat3& J, const Mat3& Gamma, const Rotation& R_e, const Vec3& omega,
                         const Vec3& omega_d, const Vec3& omega_dot_d) {
    const Vec3 w_v = transported_omega_d(R_e, omega_d);
    const Vec3 w_e = omega - w_v;
    const Vec3 wv_dot = -w_e.cross(w_v) + R_e.matrix().transpose() * omega_dot_d;
    return omega.cross(J * omega) + J * wv_dot + Gamma * w_v;
}

namespace {

/// Reference acceleration law at a stage.
Vec3 reference_accel(const ReferenceProgram& prog, const Rotation& R_d, const Vec3& omega_d,
                     double t) {
    if (prog.kind == ReferenceProgram::Kind::Setpoint) return Vec3::Zero();
    const Rotation target = prog.target(t);
    const Vec3 att = log_so3_vec(Rotation::trusted(R_d.matrix().transpose() * target.matrix()));
    return prog.omega_n * prog.omega_n * att - 2.0 * prog.zeta * prog.omega_n * omega_d;
}

/// Derivative of the coupled chart state
/// z = [theta_b(3), omega(3), x_K(n), theta_d(3), omega_d(3)]
/// around base rotations (R0, R0d). accel_fn supplies the reference
/// acceleration for the stage. clamped is sticky across stages.
struct CoupledField {
    const CompensatorRealization& K;
    const Mat3& J;
    Metric metric;
    Rotation R0, R0d;
    std::function<Vec3(const Rotation&, const Vec3&, double)> accel_fn;
    bool* clamped = nullptr;

    VectorXd operator()(double t, const VectorXd& z) const {
        const int n = K.n;
        const Vec3 th_b = z.segment<3>(0);
        const Vec3 w = z.segment<3>(3);
        const VectorXd x = z.segment(6, n);
        const Vec3 th_d = z.segment<3>(6 + n);
        const Vec3 w_d = z.segment<3>(9 + n);

        const Rotation R = R0 * exp_so3(th_b);
        const Rotation R_d = R0d * exp_so3(th_d);
        const Rotation R_e = R_d.transpose() * R;
        const Vec3 w_v = transported_omega_d(R_e, w_d);
        const Vec3 w_e = w - w_v;
        bool cl = false;
        const Vec3 e = err_vec_clamped(metric, R_e, &cl);
        if (cl && clamped != nullptr) *clamped = true;

        const Vec3 u = (n > 0 ? Vec3(K.C_K * x) : Vec3::Zero()) + K.D_theta * e + K.D_omega * w_e;
        const Vec3 wd_dot = accel_fn(R_d, w_d, t);
        const Vec3 u_C = cancellation_torque(J, K.Gamma, R_e, w, w_d, wd_dot);
        const Vec3 torque = -w.cross(J * w) - K.Gamma * w + u + u_C;

        VectorXd dz(z.size());
        dz.segment<3>(0) = dexpinv_so3(th_b, w);
        dz.segment<3>(3) = J.ldlt().solve(torque);
        if (n > 0) dz.segment(6, n) = K.A_K * x + K.B_theta * e + K.B_omega * w_e;
        dz.segment<3>(6 + n) = dexpinv_so3(th_d, w_d);
        dz.segment<3>(9 + n) = wd_dot;
        return dz;
    }
};

template <typename Field>
VectorXd rk4_step(const Field& f, double t, const VectorXd& z, double dt) {
    const VectorXd k1 = f(t, z);
    const VectorXd k2 = f(t + 0.5 * dt, VectorXd(z + 0.5 * dt * k1));
    const VectorXd k3 = f(t + 0.5 * dt, VectorXd(z + 0.5 * dt * k2));
    const VectorXd k4 = f(t + dt, VectorXd(z + dt * k3));
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Diagnostics {
    Rotation R_e;
    Vec3 w_e, e, u, u_C;
    double theta_e = 0.0;
};

Diagnostics diagnostics_at(const Rotation& R, const Vec3& w, const VectorXd& x,
                           const Rotation& R_d, const Vec3& w_d, const Vec3& wd_dot,
                           const CompensatorRealization& K, const Mat3& J, Metric metric) {
    Diagnostics d;
    d.R_e = R_d.transpose() * R;
    const Vec3 w_v = transported_omega_d(d.R_e, w_d);
    d.w_e = w - w_v;
    bool cl = false;
    d.e = err_vec_clamped(metric, d.R_e, &cl);
    d.u = (K.n > 0 ? Vec3(K.C_K * x) : Vec3::Zero()) + K.D_theta * d.e + K.D_omega * d.w_e;
    d.u_C = cancellation_torque(J, K.Gamma, d.R_e, w, w_d, wd_dot);
    d.theta_e = rotation_angle(d.R_e);
    return d;
}

}  // namespace

ClosedLoopState step_closed_loop(const ClosedLoopState& state, const CompensatorRealization& K,
                                 const Mat3& J, Metric metric, double dt) {
    K.validate();
    const int n = K.n;
    VectorXd z = VectorXd::Zero(12 + n);
    z.segment<3>(3) = state.body.omega;
    if (n > 0) z.segment(6, n) = state.x_K;
    z.segment<3>(9 + n) = state.ref.omega_d;

    const Vec3 accel = state.ref.omega_dot_d;
    CoupledField field{K, J, metric, state.body.R, state.ref.R_d,
                       [&accel](const Rotation&, const Vec3&, double) { return accel; }, nullptr};
    const VectorXd z1 = rk4_step(field, 0.0, z, dt);

    ClosedLoopState out;
    out.body.R = state.body.R * exp_so3(Vec3(z1.segment<3>(0)));
    out.body.omega = z1.segment<3>(3);
    out.x_K = z1.segment(6, n);
    out.ref.R_d = state.ref.R_d * exp_so3(Vec3(z1.segment<3>(6 + n)));
    out.ref.omega_d = z1.segment<3>(9 + n);
    out.ref.omega_dot_d = accel;
    return out;
}

ReferenceState advance_reference(const ReferenceState& ref, const ReferenceProgram& prog,
                                 double t, double dt) {
    // Chart RK4 on (theta_d, omega_d) under the program's acceleration law.
    struct RefField {
        const ReferenceProgram& prog;
        Rotation R0d;
        VectorXd operator()(double tt, const VectorXd& z) const {
            const Vec3 th = z.segment<3>(0);
            const Vec3 w = z.segment<3>(3);
            const Rotation R_d = R0d * exp_so3(th);
            VectorXd dz(6);
            dz.segment<3>(0) = dexpinv_so3(th, w);
            dz.segment<3>(3) = reference_accel(prog, R_d, w, tt);
            return dz;
        }
    };
    RefField field{prog, ref.R_d};
    VectorXd z = VectorXd::Zero(6);
    z.segment<3>(3) = ref.omega_d;
    const VectorXd z1 = rk4_step(field, t, z, dt);
    ReferenceState out;
    out.R_d = ref.R_d * exp_so3(Vec3(z1.segment<3>(0)));
    out.omega_d = z1.segment<3>(3);
    out.omega_dot_d = reference_accel(prog, out.R_d, out.omega_d, t + dt);
    return out;
}

Trajectory simulate(const RigidBodyState& initial, const ReferenceProgram& program,
                    const CompensatorRealization& K, const Mat3& J, Metric metric,
                    const SimOptions& opts) {
    K.validate();
    if (opts.dt <= 0.0 || opts.T <= 0.0) throw InputError("simulation needs dt > 0 and T > 0");
    if (K.regulation_only && program.kind == ReferenceProgram::Kind::FilteredTarget) {
        std::cerr << "warning: regulation-only controller driven by a moving reference; "
                     "tracking behavior is outside its design assumptions\n";
    }

    const int n = K.n;
    const int steps = static_cast<int>(std::llround(opts.T / opts.dt));

    Rotation R0 = initial.R;
    Rotation R0d = program.kind == ReferenceProgram::Kind::Setpoint ? program.setpoint_R
                                                                    : program.target(0.0);
    VectorXd z = VectorXd::Zero(12 + n);
    z.segment<3>(3) = initial.omega;

    Trajectory traj;
    traj.dt = opts.dt;
    traj.v_checked = opts.coeffs != nullptr;

    bool clamped_step = false;
    CoupledField field{K, J, metric, R0, R0d,
                       [&program](const Rotation& R_d, const Vec3& w_d, double t) {
                           return reference_accel(program, R_d, w_d, t);
                       },
                       &clamped_step};

    double V_prev = 0.0;
    auto emit = [&](int i, const Rotation& R, const Vec3& w, const VectorXd& x, const Rotation& Rd,
                    const Vec3& wd, bool record) {
        const double t = i * opts.dt;
        const Vec3 wd_dot = reference_accel(program, Rd, wd, t);
        const Diagnostics d = diagnostics_at(R, w, x, Rd, wd, wd_dot, K, J, metric);
        double V = 0.0, Vd = 0.0;
        if (opts.coeffs != nullptr) {
            V = eval_V(*opts.coeffs, J, metric, d.R_e, d.w_e, x);
            if (record) Vd = eval_Vdot(*opts.coeffs, K, J, metric, d.R_e, d.w_e, x);
            if (i > 0) {
                const double incr = V - V_prev;
                if (incr > opts.v_tol * std::max(1.0, std::abs(V_prev))) {
                    ++traj.v_violations;
                }
                traj.max_v_increase = std::max(traj.max_v_increase, incr);
            }
            V_prev = V;
        }
        if (record) {
            TrajectoryRecord rec;
            rec.t = t;
            rec.R = R;
            rec.R_d = Rd;
            rec.omega = w;
            rec.omega_d = wd;
            rec.e = d.e;
            rec.omega_e = d.w_e;
            rec.theta_e = d.theta_e;
            rec.u = d.u;
            rec.u_C = d.u_C;
            rec.x_K = x;
            rec.V = V;
            rec.Vdot = Vd;
            traj.records.push_back(std::move(rec));
        }
    };

    emit(0, R0, initial.omega, z.segment(6, n), R0d, Vec3::Zero(), true);

    for (int i = 0; i < steps; ++i) {
        field.R0 = R0;
        field.R0d = R0d;
        clamped_step = false;
        z.segment<3>(0).setZero();
        z.segment<3>(6 + n).setZero();
        const VectorXd z1 = rk4_step(field, i * opts.dt, z, opts.dt);
        if (clamped_step) ++traj.clamp_count;

        R0 = R0 * exp_so3(Vec3(z1.segment<3>(0)));
        R0d = R0d * exp_so3(Vec3(z1.segment<3>(6 + n)));
        z = z1;
        if (opts.project_every > 0 && (i + 1) % opts.project_every == 0) {
            R0 = project_so3(R0.matrix());
            R0d = project_so3(R0d.matrix());
        }

        const bool last = i + 1 == steps;
        const bool record = last || (opts.record_stride > 0 && (i + 1) % opts.record_stride == 0);
        const bool monitor = opts.coeffs != nullptr;
        if (record || monitor) {
            emit(i + 1, R0, z.segment<3>(3), z.segment(6, n), R0d, z.segment<3>(9 + n), record);
        }
    }
    return traj;
}

std::vector<ErrorRecord> simulate_error_autonomous(const Rotation& Re0, const Vec3& we0,
                                                   const CompensatorRealization& K, const Mat3& J,
                                                   Metric metric, const SimOptions& opts) {
    K.validate();
    const int n = K.n;
    const int steps = static_cast<int>(std::llround(opts.T / opts.dt));

    struct ErrField {
        const CompensatorRealization& K;
        const Mat3& J;
        Metric metric;
        Rotation R0e;
        VectorXd operator()(double, const VectorXd& z) const {
            const int n = K.n;
            const Vec3 th = z.segment<3>(0);
            const Vec3 w_e = z.segment<3>(3);
            const VectorXd x = z.segment(6, n);
            const Rotation R_e = R0e * exp_so3(th);
            bool cl = false;
            const Vec3 e = err_vec_clamped(metric, R_e, &cl);
            const Vec3 u = (n > 0 ? Vec3(K.C_K * x) : Vec3::Zero()) + K.D_theta * e +
                           K.effective_D_omega() * w_e;
            VectorXd dz(z.size());
            dz.segment<3>(0) = dexpinv_so3(th, w_e);
            dz.segment<3>(3) = J.ldlt().solve(u);
            if (n > 0) dz.segment(6, n) = K.A_K * x + K.B_theta * e + K.B_omega * w_e;
            return dz;
        }
    };

    Rotation R0e = Re0;
    VectorXd z = VectorXd::Zero(6 + n);
    z.segment<3>(3) = we0;
    ErrField field{K, J, metric, R0e};

    std::vector<ErrorRecord> out;
    auto emit = [&](int i) {
        ErrorRecord r;
        r.t = i * opts.dt;
        r.R_e = R0e;
        r.omega_e = z.segment<3>(3);
        r.x_K = z.segment(6, n);
        out.push_back(std::move(r));
    };
    emit(0);
    for (int i = 0; i < steps; ++i) {
        field.R0e = R0e;
        z.segment<3>(0).setZero();
        z = rk4_step(field, i * opts.dt, z, opts.dt);
        R0e = R0e * exp_so3(Vec3(z.segment<3>(0)));
        if (opts.project_every > 0 && (i + 1) % opts.project_every == 0) {
            R0e = project_so3(R0e.matrix());
        }
        const bool last = i + 1 == steps;
        if (last || (opts.record_stride > 0 && (i + 1) % opts.record_stride == 0)) emit(i + 1);
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw InputError("cannot open " + path + " for writing");
    std::fputs("t,theta_e_deg,eR_x,eR_y,eR_z,we_x,we_y,we_z,u_x,u_y,u_z,V,Vdot\n", f);
    for (const auto& r : traj.records) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     r.t, r.theta_e * 180.0 / M_PI, r.e.x(), r.e.y(), r.e.z(), r.omega_e.x(),
                     r.omega_e.y(), r.omega_e.z(), r.u.x(), r.u.y(), r.u.z(), r.V, r.Vdot);
    }
    std::fclose(f);
}

McReport monte_carlo_agas(const CompensatorRealization& K, const Mat3& J, Metric metric,
                          const McOptions& opts) {
    K.validate();
    McReport rep;
    rep.samples = opts.samples;
    rep.v_checked = opts.coeffs != nullptr;

    const ReferenceProgram regulation = ReferenceProgram::setpoint(Rotation::identity());
    for (int k = 0; k < opts.samples; ++k) {
        Rng rng = Rng::substream(opts.seed, static_cast<uint64_t>(k));
        RigidBodyState init;
        if (k % 4 == 3) {
            // force a share of the draws near the antipodal set, where the
            // basin structure is most delicate
            const double theta = rng.uniform(3.0, M_PI - 1e-3);
            init.R = exp_so3(AxisAngle{rng.unit_vec3(), theta});
            ++rep.near_antipodal_samples;
        } else {
            init.R = rng.uniform_rotation();
        }
        init.omega = rng.ball_vec3(opts.omega_ball);

        SimOptions sim;
        sim.dt = opts.dt;
        sim.T = opts.T;
        sim.record_stride = 0;
        sim.coeffs = opts.coeffs;
        const Trajectory traj = simulate(init, regulation, K, J, metric, sim);

        const auto& fin = traj.back();
        const double th = fin.theta_e;
        const double wn = fin.omega_e.norm();
        if (th < opts.theta_tol && wn < opts.omega_tol) ++rep.converged;
        rep.max_final_theta = std::max(rep.max_final_theta, th);
        rep.max_final_omega = std::max(rep.max_final_omega, wn);
        rep.v_violations += traj.v_violations;
        rep.max_v_increase = std::max(rep.max_v_increase, traj.max_v_increase);
    }
    return rep;
}

void save_mc_report(const McReport& rep, const std::string& path) {
    nlohmann::ordered_json j;
    j["samples"] = rep.samples;
    j["converged"] = rep.converged;
    j["fraction"] = rep.samples > 0 ? static_cast<double>(rep.converged) / rep.samples : 0.0;
    j["near_antipodal_samples"] = rep.near_antipodal_samples;
    j["max_final_theta"] = rep.max_final_theta;
    j["max_final_omega"] = rep.max_final_omega;
    j["v_checked"] = rep.v_checked;
    j["v_violations"] = rep.v_violations;
    j["max_v_increase"] = rep.max_v_increase;
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace so3cert

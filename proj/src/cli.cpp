#include "so3cert/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "so3cert/case_study.hpp"
#include "so3cert/certificate.hpp"
#include "so3cert/compensator.hpp"
#include "so3cert/errors.hpp"
#include "so3cert/linear.hpp"
#include "so3cert/lyapunov.hpp"
#include "so3cert/sdp.hpp"
#include "so3cert/simulate.hpp"

namespace so3cert {

Mat3 load_inertia_or_default(const std::string& path) {
    if (path.empty()) return benchmark_inertia();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open inertia file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("inertia file " + path + " is not valid JSON: " + e.what());
    }
    const nlohmann::json& arr = j.is_object() && j.contains("J") ? j["J"] : j;
    if (!arr.is_array() || arr.size() != 3) {
        throw InputError("inertia file must hold a 3x3 row-major array");
    }
    Mat3 J;
    for (int i = 0; i < 3; ++i) {
        if (!arr[i].is_array() || arr[i].size() != 3) {
            throw InputError("inertia file must hold a 3x3 row-major array");
        }
        for (int k = 0; k < 3; ++k) {
            if (!arr[i][k].is_number()) throw InputError("inertia entries must be numbers");
            J(i, k) = arr[i][k].get<double>();
        }
    }
    return J;
}

namespace {

ControllerSpec load_spec_with_override(const RunConfig& cfg) {
    ControllerSpec spec = load_controller_spec(cfg.controller_path);
    if (!cfg.metric.empty()) spec.metric = metric_from_string(cfg.metric);
    return spec;
}

}  // namespace

int cmd_gen_controller(const RunConfig& cfg) {
    const Metric metric = cfg.metric.empty() ? Metric::Chordal : metric_from_string(cfg.metric);
    const ControllerSpec spec = benchmark_controller(cfg.name, metric);
    if (cfg.out.empty()) throw InputError("gen-controller needs an output path");
    save_controller_spec(spec, cfg.out);
    std::cout << "wrote " << cfg.name << " controller (n = " << spec.K.n << ", metric "
              << to_string(spec.metric) << ") to " << cfg.out << "\n";
    return kExitOk;
}

int cmd_certify(const RunConfig& cfg) {
    const ControllerSpec spec = load_spec_with_override(cfg);
    const Mat3 J = load_inertia_or_default(cfg.inertia_path);
    const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(J);

    const LmiProblem problem =
        assemble_certification_lmis(spec.K, J, spec.metric, eps, cfg.decoupled);
    SolveOptions sopts;
    sopts.verbose = cfg.verbose;
    const FeasibilityResult result = solve_feasibility(problem, sopts);

    std::cout << "feasibility: " << to_string(result.status) << "  (margin " << result.t_star
              << ", target " << eps << ", " << result.outer_iterations << " outer / "
              << result.newton_iterations << " newton steps)\n";
    if (!result.feasible()) {
        std::cout << "no stability certificate found\n";
        return kExitNotCertified;
    }

    const Certificate cert = make_certificate(result.x, spec.K, J, spec.metric, eps);
    const VerifyReport rep = verify_certificate(cert.P, cert.S, spec.K, J, spec.metric, eps);
    for (const auto& [name, margin] : rep.margins) {
        std::cout << "  " << name << ": " << margin << "\n";
    }
    if (!rep.pass) {
        std::cout << "solver point failed independent verification; not certified\n";
        return kExitNotCertified;
    }
    std::cout << "certificate verified: almost global asymptotic stability established\n";
    if (!cfg.out.empty()) {
        save_certificate(cert, cfg.out);
        std::cout << "wrote certificate to " << cfg.out << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
    const ControllerSpec spec = load_spec_with_override(cfg);
    const Mat3 J = load_inertia_or_default(cfg.inertia_path);

    Certificate cert;
    bool have_cert = false;
    if (!cfg.certificate_path.empty()) {
        cert = load_certificate(cfg.certificate_path);
        have_cert = true;
        if (cert.n() != spec.K.n) {
            throw InputError("certificate order does not match the controller");
        }
        if (cert.metric != spec.metric) {
            throw InputError("certificate metric does not match the controller");
        }
    }

    ReferenceProgram program;
    RigidBodyState init;
    if (cfg.maneuver == "flip") {
        program = ReferenceProgram::flip();
        init.R = exp_so3(Vec3((cfg.init_angle_deg * M_PI / 180.0) * cfg.init_axis.normalized()));
    } else if (cfg.maneuver == "setpoint") {
        program = ReferenceProgram::setpoint(Rotation::identity());
        init.R = exp_so3(Vec3((cfg.init_angle_deg * M_PI / 180.0) * cfg.init_axis.normalized()));
    } else {
        throw InputError("maneuver must be 'flip' or 'setpoint'");
    }
    init.omega = cfg.init_omega;

    SimOptions opts;
    opts.dt = cfg.dt;
    opts.T = cfg.T;
    if (have_cert) opts.coeffs = &cert.P;
    const Trajectory traj = simulate(init, program, spec.K, J, spec.metric, opts);

    double max_theta = 0.0;
    for (const auto& r : traj.records) max_theta = std::max(max_theta, r.theta_e);
    const auto& fin = traj.back();
    std::cout << "simulated " << cfg.T << " s (" << traj.records.size() << " records): "
              << "max attitude error " << max_theta * 180.0 / M_PI << " deg, final "
              << fin.theta_e * 180.0 / M_PI << " deg, |w_e| " << fin.omega_e.norm() << " rad/s\n";
    if (have_cert) {
        std::cout << "V monitor: " << traj.v_violations << " increases beyond tolerance (max "
                  << traj.max_v_increase << ")\n";
    }
    if (traj.clamp_count > 0) {
        std::cout << "note: quaternionic error map clamped on " << traj.clamp_count
                  << " steps near the antipode\n";
    }

    if (!cfg.out.empty()) {
        write_trajectory_csv(traj, cfg.out);
        std::cout << "wrote trajectory to " << cfg.out << "\n";
    }
    if (!cfg.summary_path.empty()) {
        nlohmann::ordered_json js;
        js["T"] = cfg.T;
        js["dt"] = cfg.dt;
        js["max_theta_e_deg"] = max_theta * 180.0 / M_PI;
        js["final_theta_e_deg"] = fin.theta_e * 180.0 / M_PI;
        js["final_omega_e"] = fin.omega_e.norm();
        js["clamp_count"] = traj.clamp_count;
        js["v_checked"] = traj.v_checked;
        js["v_violations"] = traj.v_violations;
        js["max_v_increase"] = traj.max_v_increase;
        std::ofstream out(cfg.summary_path);
        if (!out) throw InputError("cannot open " + cfg.summary_path + " for writing");
        out << js.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_linear(const RunConfig& cfg) {
    const ControllerSpec spec = load_spec_with_override(cfg);
    const Mat3 J = load_inertia_or_default(cfg.inertia_path);

    const LinearClosedLoop loop = linearize_closed_loop(spec.K, J, spec.metric);
    const double absc = spectral_abscissa(loop.A);
    std::cout << "closed-loop spectral abscissa: " << absc << "\n";

    nlohmann::ordered_json out_json;
    out_json["spectral_abscissa"] = absc;
    nlohmann::ordered_json axes = nlohmann::ordered_json::array();
    const char* axis_names[3] = {"roll", "pitch", "yaw"};
    for (int a = 0; a < 3; ++a) {
        StepOptions sopts;
        sopts.metric = spec.metric;
        const StepMetrics m = step_metrics_axis(spec.K, a, J(a, a), sopts);
        const double wc = loop_crossover(compensator_chain(spec.K, a, spec.metric), J(a, a));
        std::printf("%-6s rise %7.2f ms  settle %7.2f ms  overshoot %6.2f %%  crossover %7.3f rad/s\n",
                    axis_names[a], m.rise_time * 1e3, m.settling_time * 1e3, m.overshoot_pct, wc);
        nlohmann::ordered_json row;
        row["axis"] = axis_names[a];
        row["rise_ms"] = m.rise_time * 1e3;
        row["settle_ms"] = m.settling_time * 1e3;
        row["overshoot_pct"] = m.overshoot_pct;
        row["crossover_rad_s"] = wc;
        axes.push_back(row);
    }
    out_json["axes"] = axes;

    if (!cfg.out.empty()) {
        std::ofstream out(cfg.out);
        if (!out) throw InputError("cannot open " + cfg.out + " for writing");
        out << out_json.dump(2) << "\n";
        std::cout << "wrote metrics to " << cfg.out << "\n";
    }
    return kExitOk;
}

int cmd_montecarlo(const RunConfig& cfg) {
    const ControllerSpec spec = load_spec_with_override(cfg);
    const Mat3 J = load_inertia_or_default(cfg.inertia_path);

    Certificate cert;
    McOptions opts;
    opts.samples = cfg.samples;
    opts.seed = cfg.seed;
    opts.T = cfg.T;
    opts.dt = cfg.dt;
    if (!cfg.certificate_path.empty()) {
        cert = load_certificate(cfg.certificate_path);
        if (cert.n() != spec.K.n) {
            throw InputError("certificate order does not match the controller");
        }
        opts.coeffs = &cert.P;
    }

    const McReport rep = monte_carlo_agas(spec.K, J, spec.metric, opts);
    std::cout << rep.converged << "/" << rep.samples << " samples converged ("
              << rep.near_antipodal_samples << " near-antipodal), max final error "
              << rep.max_final_theta << " rad, " << rep.max_final_omega << " rad/s\n";
    if (rep.v_checked) {
        std::cout << "V monitor: " << rep.v_violations << " increases beyond tolerance (max "
                  << rep.max_v_increase << ")\n";
    }
    if (!cfg.out.empty()) {
        save_mc_report(rep, cfg.out);
        std::cout << "wrote report to " << cfg.out << "\n";
    }
    return rep.converged == rep.samples ? kExitOk : kExitNotCertified;
}

}  // namespace so3cert

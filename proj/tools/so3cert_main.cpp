#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "so3cert/cli.hpp"
#include "so3cert/errors.hpp"

namespace {

void add_inertia_option(CLI::App* cmd, so3cert::RunConfig& cfg) {
    cmd->add_option("--inertia", cfg.inertia_path,
                    "inertia JSON file (3x3 row-major array); benchmark hexacopter when omitted");
}

void add_controller_option(CLI::App* cmd, so3cert::RunConfig& cfg) {
    cmd->add_option("--controller", cfg.controller_path, "controller spec JSON")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability certification toolkit for dynamic attitude controllers on SO(3)"};
    app.require_subcommand(1);

    so3cert::RunConfig cfg;
    std::vector<double> axis = {1.0, 0.0, 0.0};
    std::vector<double> omega0 = {0.0, 0.0, 0.0};

    auto* gen = app.add_subcommand("gen-controller", "write a benchmark controller spec");
    gen->add_option("--name", cfg.name, "pid | ppi | ppid | leadlag")->required();
    gen->add_option("--metric", cfg.metric, "chordal | psi_q (default chordal)");
    gen->add_option("--out", cfg.out, "output JSON path")->required();

    auto* cert = app.add_subcommand("certify", "search for a stability certificate");
    add_controller_option(cert, cfg);
    add_inertia_option(cert, cfg);
    cert->add_option("--metric", cfg.metric, "override the spec's error metric");
    cert->add_option("--epsilon", cfg.epsilon, "strictness margin (default 1e-6 (1 + |J|))");
    cert->add_flag("--decoupled", cfg.decoupled, "restrict the problem per axis");
    cert->add_option("--out", cfg.out, "certificate JSON output path");
    cert->add_flag("--verbose", cfg.verbose, "print solver progress");

    auto* sim = app.add_subcommand("simulate", "integrate the closed loop");
    add_controller_option(sim, cfg);
    add_inertia_option(sim, cfg);
    sim->add_option("--certificate", cfg.certificate_path,
                    "certificate JSON; enables V monitoring");
    sim->add_option("--maneuver", cfg.maneuver, "flip | setpoint (default flip)");
    sim->add_option("--angle-deg", cfg.init_angle_deg, "initial attitude error angle, degrees");
    sim->add_option("--axis", axis, "initial error axis (3 numbers)")->expected(3);
    sim->add_option("--omega", omega0, "initial angular velocity, rad/s (3 numbers)")->expected(3);
    sim->add_option("--dt", cfg.dt, "integrator step, s (default 1e-3)");
    sim->add_option("--T", cfg.T, "duration, s (default 6)");
    sim->add_option("--out", cfg.out, "trajectory CSV output path");
    sim->add_option("--summary", cfg.summary_path, "summary JSON output path");

    auto* lin = app.add_subcommand("linear", "linearized per-axis metrics");
    add_controller_option(lin, cfg);
    add_inertia_option(lin, cfg);
    lin->add_option("--out", cfg.out, "metrics JSON output path");

    auto* mc = app.add_subcommand("montecarlo", "randomized regulation study");
    add_controller_option(mc, cfg);
    add_inertia_option(mc, cfg);
    mc->add_option("--certificate", cfg.certificate_path,
                   "certificate JSON; enables V monitoring");
    mc->add_option("--samples", cfg.samples, "number of samples (default 100)");
    mc->add_option("--seed", cfg.seed, "random seed (default 2026)");
    mc->add_option("--T", cfg.T, "per-sample duration, s");
    mc->add_option("--dt", cfg.dt, "integrator step, s");
    mc->add_option("--out", cfg.out, "report JSON output path");

    // Simulation of a full maneuver defaults to 6 s; the randomized study
    // needs longer to decide convergence.
    mc->parse_complete_callback([&cfg, mc]() {
        if (mc->count("--T") == 0) cfg.T = 20.0;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? so3cert::kExitOk : so3cert::kExitUsage;
    }

    cfg.init_axis = so3cert::Vec3(axis[0], axis[1], axis[2]);
    cfg.init_omega = so3cert::Vec3(omega0[0], omega0[1], omega0[2]);

    try {
        if (gen->parsed()) return so3cert::cmd_gen_controller(cfg);
        if (cert->parsed()) return so3cert::cmd_certify(cfg);
        if (sim->parsed()) return so3cert::cmd_simulate(cfg);
        if (lin->parsed()) return so3cert::cmd_linear(cfg);
        if (mc->parsed()) return so3cert::cmd_montecarlo(cfg);
    } catch (const so3cert::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return so3cert::kExitUsage;
    } catch (const so3cert::UnknownController& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return so3cert::kExitUsage;
    } catch (const so3cert::Error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return so3cert::kExitAnalysis;
    }
    return so3cert::kExitUsage;
}

#pragma once

#include <cstdint>
#include <string>

#include "so3cert/so3.hpp"

namespace so3cert {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;            ///< certified / analysis complete
inline constexpr int kExitUsage = 1;         ///< bad usage or malformed input
inline constexpr int kExitNotCertified = 2;  ///< no certificate / property not established
inline constexpr int kExitAnalysis = 3;      ///< analysis failed (unstable loop, no crossover...)

/// Options bag for the subcommands; each command reads the fields it needs.
struct RunConfig {
    std::string name;              ///< benchmark controller name (gen-controller)
    std::string controller_path;   ///< controller spec JSON to operate on
    std::string inertia_path;      ///< optional inertia JSON (3x3 array); benchmark J when empty
    std::string metric;            ///< optional metric override: "chordal" or "psi_q"
    double epsilon = 0.0;          ///< strictness margin; 0 selects the inertia-scaled default
    bool decoupled = false;        ///< restrict the certification problem per axis
    std::string out;               ///< main output path of the command
    std::string certificate_path;  ///< certificate JSON (simulate/montecarlo V monitoring)
    std::string summary_path;      ///< simulate: optional summary JSON
    std::string maneuver = "flip";  ///< simulate: "flip" or "setpoint"
    double init_angle_deg = 0.0;   ///< simulate: initial attitude error angle
    Vec3 init_axis = Vec3::UnitX();
    Vec3 init_omega = Vec3::Zero();
    double dt = 1e-3;
    double T = 6.0;
    int samples = 100;
    std::uint64_t seed = 2026;
    bool verbose = false;
};

/// Loads a 3x3 inertia from a JSON file holding a row-major array of arrays
/// (or an object with a "J" field); falls back to the benchmark inertia when
/// the path is empty.
Mat3 load_inertia_or_default(const std::string& path);

int cmd_gen_controller(const RunConfig& cfg);
int cmd_certify(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_linear(const RunConfig& cfg);
int cmd_montecarlo(const RunConfig& cfg);

}  // namespace so3cert

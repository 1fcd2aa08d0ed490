#pragma once

#include <string>
#include <vector>

#include "so3cert/compensator.hpp"

namespace so3cert {

/// Hexacopter inertia used throughout the benchmark studies, kg m^2.
Mat3 benchmark_inertia();

/// Gains of the benchmark controller family.
inline constexpr double kBenchPidKp = 7.3878;
inline constexpr double kBenchPidKd = 1.7238;
inline constexpr double kBenchPidKi = 0.9358;
inline constexpr double kBenchPidC = 5.0;
inline constexpr double kBenchPpiKr = 4.383;
inline constexpr double kBenchPpiKwScale = 30.0;   // K_w = 30 J
inline constexpr double kBenchPpiKiScale = 225.0;  // K_I = 225 J
inline constexpr double kBenchPpidKa = 0.00263;
inline constexpr double kBenchPpidN = 75.0;

/// Lead-lag attitude filter 37.5 (s + 1.653)(s + 0.05042) /
/// ((s + 2.5)(s + 0.01)) and rate filter 5 (s + 2) / (s + 2.5) of the
/// dynamic benchmark controller.
TransferFunction benchmark_leadlag_attitude_tf();
TransferFunction benchmark_leadlag_rate_tf();

/// Benchmark controllers by name: "pid" (filtered-integral PID), "ppi"
/// (cascade with PI rate loop), "ppid" (cascade with PID rate loop,
/// regulation only), "leadlag" (per-axis dynamic cascade). Throws
/// UnknownController for anything else.
ControllerSpec benchmark_controller(const std::string& name, Metric metric = Metric::Chordal);

const std::vector<std::string>& benchmark_controller_names();

}  // namespace so3cert

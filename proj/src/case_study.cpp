#include "so3cert/case_study.hpp"

#include "so3cert/errors.hpp"

namespace so3cert {

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

}  // namespace

Mat3 benchmark_inertia() {
    Mat3 J;
    J << 0.0411, 0.002, -0.001,
         0.002, 0.0478, 0.003,
         -0.001, 0.003, 0.0599;
    return J;
}

TransferFunction benchmark_leadlag_attitude_tf() {
    const std::vector<double> num = poly_mul({37.5}, poly_mul({1.0, 1.653}, {1.0, 0.05042}));
    const std::vector<double> den = poly_mul({1.0, 2.5}, {1.0, 0.01});
    return TransferFunction(num, den);
}

TransferFunction benchmark_leadlag_rate_tf() {
    return TransferFunction({5.0, 10.0}, {1.0, 2.5});
}

ControllerSpec benchmark_controller(const std::string& name, Metric metric) {
    const Mat3 J = benchmark_inertia();
    ControllerSpec spec;
    spec.metric = metric;
    if (name == "pid") {
        spec.K = build_baseline_pid(kBenchPidKp, kBenchPidKd, kBenchPidKi, kBenchPidC);
    } else if (name == "ppi") {
        spec.K = build_cascade_ppi(kBenchPpiKr * Mat3::Identity(), kBenchPpiKwScale * J,
                                   kBenchPpiKiScale * J);
    } else if (name == "ppid") {
        spec.K = build_cascade_ppid(kBenchPpiKr * Mat3::Identity(), kBenchPpiKwScale * J,
                                    kBenchPpiKiScale * J, kBenchPpidKa * Mat3::Identity(),
                                    kBenchPpidN * Mat3::Identity());
    } else if (name == "leadlag") {
        spec.K = geometrize_cascade(benchmark_leadlag_attitude_tf(), benchmark_leadlag_rate_tf());
    } else {
        throw UnknownController("unknown benchmark controller '" + name +
                                "'; expected pid, ppi, ppid or leadlag");
    }
    return spec;
}

const std::vector<std::string>& benchmark_controller_names() {
    static const std::vector<std::string> names = {"pid", "ppi", "ppid", "leadlag"};
    return names;
}

}  // namespace so3cert

#include "so3cert/compensator.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "so3cert/errors.hpp"
#include "so3cert/jacobi.hpp"

namespace so3cert {

namespace {

void require_shape(const MatrixXd& M, int rows, int cols, const std::string& name) {
    if (M.rows() != rows || M.cols() != cols) {
        throw DimensionMismatch(name + " must be " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(M.rows()) + "x" +
                                std::to_string(M.cols()));
    }
}

bool is_diagonal(const MatrixXd& M, double tol) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) {
            if (i != j && std::abs(M(i, j)) > tol * scale) return false;
        }
    }
    return true;
}

void require_spd(const Mat3& M, const std::string& name) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw NotSPD(name + " is not symmetric");
    }
    if (min_eig_sym(M) <= 0.0) {
        throw NotSPD(name + " is not positive definite");
    }
}

/// Polynomial evaluation, coefficients in descending powers.
std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> s) {
    std::complex<double> acc(0.0, 0.0);
    for (double c : coeffs) acc = acc * s + c;
    return acc;
}

}  // namespace

void CompensatorRealization::validate() const {
    if (n < 0) throw DimensionMismatch("compensator order must be nonnegative");
    require_shape(A_K, n, n, "A_K");
    require_shape(B_theta, n, 3, "B_theta");
    require_shape(B_omega, n, 3, "B_omega");
    require_shape(C_K, 3, n, "C_K");
    const double gscale = std::max(1.0, Gamma.cwiseAbs().maxCoeff());
    if ((Gamma - Gamma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * gscale) {
        throw NotSPD("Gamma is not symmetric");
    }
    if (Gamma.cwiseAbs().maxCoeff() > 0.0 && min_eig_sym(Gamma) < -1e-10 * gscale) {
        throw NotSPD("Gamma is not positive semidefinite");
    }
    if (!axis_map.empty()) {
        if (static_cast<int>(axis_map.size()) != n) {
            throw DimensionMismatch("axis_map must have one entry per compensator state");
        }
        for (int a : axis_map) {
            if (a < 0 || a > 2) throw DimensionMismatch("axis_map entries must be 0, 1 or 2");
        }
    }
}

TransferFunction::TransferFunction(std::vector<double> numerator, std::vector<double> denominator)
    : num(std::move(numerator)), den(std::move(denominator)) {
    if (den.empty() || den.front() == 0.0) {
        throw ImproperTF("denominator must be nonempty with nonzero leading coefficient");
    }
    if (num.empty()) num = {0.0};
    if (num.size() > den.size()) {
        throw ImproperTF("transfer function is improper: deg(num) > deg(den)");
    }
}

std::complex<double> TransferFunction::eval(std::complex<double> s) const {
    return horner(num, s) / horner(den, s);
}

std::complex<double> SisoSS::eval(std::complex<double> s) const {
    const int k = order();
    if (k == 0) return {D, 0.0};
    Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(k, k) - A.cast<std::complex<double>>();
    Eigen::VectorXcd rhs = B.col(0).cast<std::complex<double>>();
    Eigen::VectorXcd w = M.partialPivLu().solve(rhs);
    std::complex<double> y = (C.row(0).cast<std::complex<double>>() * w)(0);
    return y + D;
}

SisoSS tf_to_ss(const TransferFunction& tf) {
    const int k = tf.degree();
    // Monic denominator and numerator padded to the same length.
    std::vector<double> a(tf.den.size());
    for (size_t i = 0; i < tf.den.size(); ++i) a[i] = tf.den[i] / tf.den[0];
    std::vector<double> b(a.size(), 0.0);
    const size_t pad = a.size() - tf.num.size();
    for (size_t i = 0; i < tf.num.size(); ++i) b[pad + i] = tf.num[i] / tf.den[0];

    SisoSS ss;
    ss.D = b[0];
    ss.A = MatrixXd::Zero(k, k);
    ss.B = MatrixXd::Zero(k, 1);
    ss.C = MatrixXd::Zero(1, k);
    if (k == 0) return ss;

    for (int i = 0; i + 1 < k; ++i) ss.A(i, i + 1) = 1.0;
    for (int j = 0; j < k; ++j) ss.A(k - 1, j) = -a[k - j];
    ss.B(k - 1, 0) = 1.0;
    // Strictly proper remainder b(s) - D a(s); coefficient of s^{k-1-i} feeds
    // state x_{k-i} in phase-variable form.
    for (int i = 0; i < k; ++i) {
        const double r = b[i + 1] - ss.D * a[i + 1];
        ss.C(0, k - 1 - i) = r;
    }
    return ss;
}

SisoSS series(const SisoSS& g1, const SisoSS& g2) {
    const int k1 = g1.order(), k2 = g2.order();
    SisoSS ss;
    ss.A = MatrixXd::Zero(k1 + k2, k1 + k2);
    ss.A.topLeftCorner(k1, k1) = g1.A;
    ss.A.bottomLeftCorner(k2, k1) = g2.B * g1.C;
    ss.A.bottomRightCorner(k2, k2) = g2.A;
    ss.B = MatrixXd::Zero(k1 + k2, 1);
    ss.B.topRows(k1) = g1.B;
    ss.B.bottomRows(k2) = g2.B * g1.D;
    ss.C = MatrixXd::Zero(1, k1 + k2);
    ss.C.leftCols(k1) = g2.D * g1.C;
    ss.C.rightCols(k2) = g2.C;
    ss.D = g2.D * g1.D;
    return ss;
}

MimoSS blockdiag_axes(const SisoSS& gx, const SisoSS& gy, const SisoSS& gz) {
    const SisoSS* g[3] = {&gx, &gy, &gz};
    int n = 0;
    for (auto* s : g) n += s->order();
    MimoSS m;
    m.A = MatrixXd::Zero(n, n);
    m.B = MatrixXd::Zero(n, 3);
    m.C = MatrixXd::Zero(3, n);
    m.D = MatrixXd::Zero(3, 3);
    int off = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const int k = g[axis]->order();
        m.A.block(off, off, k, k) = g[axis]->A;
        m.B.block(off, axis, k, 1) = g[axis]->B;
        m.C.block(axis, off, 1, k) = g[axis]->C;
        m.D(axis, axis) = g[axis]->D;
        off += k;
    }
    return m;
}

CompensatorRealization build_baseline_pid(double kP, double kD, double kI, double c) {
    if (kP <= 0.0 || kD <= 0.0 || kI <= 0.0 || c <= 0.0) {
        throw NonPositiveGain("PID gains kP, kD, kI, c must all be positive");
    }
    CompensatorRealization K;
    K.n = 3;
    K.A_K = MatrixXd::Zero(3, 3);
    K.B_theta = c * MatrixXd::Identity(3, 3);
    K.B_omega = MatrixXd::Identity(3, 3);
    K.C_K = -kI * MatrixXd::Identity(3, 3);
    K.D_theta = -kP * Mat3::Identity();
    K.D_omega = -kD * Mat3::Identity();
    K.axis_map = {0, 1, 2};
    K.validate();
    return K;
}

CompensatorRealization build_cascade_ppi(const Mat3& K_R, const Mat3& K_w, const Mat3& K_I) {
    require_spd(K_R, "K_R");
    require_spd(K_w, "K_w");
    require_spd(K_I, "K_I");
    CompensatorRealization K;
    K.n = 3;
    K.A_K = MatrixXd::Zero(3, 3);
    K.B_theta = K_R;
    K.B_omega = MatrixXd::Identity(3, 3);
    K.C_K = -K_I;
    K.D_theta = -K_w * K_R;
    K.D_omega = -K_w;
    if (is_diagonal(K_R, 1e-12) && is_diagonal(K_w, 1e-12) && is_diagonal(K_I, 1e-12)) {
        K.axis_map = {0, 1, 2};
    }
    K.validate();
    return K;
}

CompensatorRealization build_cascade_ppid(const Mat3& K_R, const Mat3& K_w, const Mat3& K_I,
                                          const Mat3& K_A, const Mat3& N) {
    require_spd(K_R, "K_R");
    require_spd(K_w, "K_w");
    require_spd(K_I, "K_I");
    require_spd(K_A, "K_A");
    if (!is_diagonal(N, 1e-12) || N.diagonal().minCoeff() <= 0.0) {
        throw NotSPD("derivative filter N must be diagonal with positive entries");
    }
    CompensatorRealization K;
    K.n = 6;
    K.A_K = MatrixXd::Zero(6, 6);
    K.A_K.bottomRightCorner(3, 3) = -N;
    K.B_theta = MatrixXd::Zero(6, 3);
    K.B_theta.topRows(3) = K_R;
    K.B_omega = MatrixXd::Zero(6, 3);
    K.B_omega.topRows(3) = Mat3::Identity();
    K.B_omega.bottomRows(3) = -N;
    K.C_K = MatrixXd::Zero(3, 6);
    K.C_K.leftCols(3) = -K_I;
    K.C_K.rightCols(3) = -K_A * N;
    K.D_theta = -K_w * K_R;
    K.D_omega = -(K_w + K_A * N);
    K.regulation_only = true;
    if (is_diagonal(K_R, 1e-12) && is_diagonal(K_w, 1e-12) && is_diagonal(K_I, 1e-12) &&
        is_diagonal(K_A, 1e-12)) {
        K.axis_map = {0, 1, 2, 0, 1, 2};
    }
    K.validate();
    return K;
}

CompensatorRealization geometrize_cascade(const TransferFunction& K_R_tf,
                                          const TransferFunction& K_w_tf) {
    const SisoSS R = tf_to_ss(K_R_tf);
    const SisoSS W = tf_to_ss(K_w_tf);
    const int kR = R.order(), kW = W.order(), k = kR + kW;

    // Per-axis chain: v = K_R(s) e + w_e enters the rate filter, u = -K_w(s) v.
    MatrixXd A_ax = MatrixXd::Zero(k, k);
    A_ax.topLeftCorner(kR, kR) = R.A;
    A_ax.bottomLeftCorner(kW, kR) = W.B * R.C;
    A_ax.bottomRightCorner(kW, kW) = W.A;
    MatrixXd Bt_ax = MatrixXd::Zero(k, 1);
    Bt_ax.topRows(kR) = R.B;
    Bt_ax.bottomRows(kW) = W.B * R.D;
    MatrixXd Bw_ax = MatrixXd::Zero(k, 1);
    Bw_ax.bottomRows(kW) = W.B;
    MatrixXd C_ax = MatrixXd::Zero(1, k);
    C_ax.leftCols(kR) = -W.D * R.C;
    C_ax.rightCols(kW) = -W.C;

    CompensatorRealization K;
    K.n = 3 * k;
    K.A_K = MatrixXd::Zero(K.n, K.n);
    K.B_theta = MatrixXd::Zero(K.n, 3);
    K.B_omega = MatrixXd::Zero(K.n, 3);
    K.C_K = MatrixXd::Zero(3, K.n);
    for (int axis = 0; axis < 3; ++axis) {
        const int off = axis * k;
        K.A_K.block(off, off, k, k) = A_ax;
        K.B_theta.block(off, axis, k, 1) = Bt_ax;
        K.B_omega.block(off, axis, k, 1) = Bw_ax;
        K.C_K.block(axis, off, 1, k) = C_ax;
    }
    K.D_theta = -(W.D * R.D) * Mat3::Identity();
    K.D_omega = -W.D * Mat3::Identity();
    K.axis_map.resize(K.n);
    for (int s = 0; s < K.n; ++s) K.axis_map[s] = s / std::max(k, 1);
    K.validate();
    return K;
}

MinimalityReport minimality_report(const CompensatorRealization& K) {
    K.validate();
    MinimalityReport rep;
    rep.n = K.n;
    if (K.n == 0) return rep;

    MatrixXd B(K.n, 6);
    B.leftCols(3) = K.B_theta;
    B.rightCols(3) = K.B_omega;
    MatrixXd ctrb(K.n, 6 * K.n);
    MatrixXd obsv(3 * K.n, K.n);
    MatrixXd Apow_B = B;
    MatrixXd C_Apow = K.C_K;
    for (int i = 0; i < K.n; ++i) {
        // Normalize each power block so fast modes (large ||A_K||) cannot
        // drown out slow but reachable directions in the rank threshold.
        const double sc = Apow_B.norm();
        const double so = C_Apow.norm();
        ctrb.middleCols(6 * i, 6) = sc > 0.0 ? MatrixXd(Apow_B / sc) : Apow_B;
        obsv.middleRows(3 * i, 3) = so > 0.0 ? MatrixXd(C_Apow / so) : C_Apow;
        if (i + 1 < K.n) {
            Apow_B = K.A_K * Apow_B;
            C_Apow = C_Apow * K.A_K;
        }
    }
    Eigen::FullPivLU<MatrixXd> lu_c(ctrb), lu_o(obsv);
    lu_c.setThreshold(1e-10);
    lu_o.setThreshold(1e-10);
    rep.controllability_rank = static_cast<int>(lu_c.rank());
    rep.observability_rank = static_cast<int>(lu_o.rank());
    rep.minimal = rep.controllability_rank == K.n && rep.observability_rank == K.n;
    return rep;
}

namespace {

nlohmann::ordered_json mat_to_json(const MatrixXd& M) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < M.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

MatrixXd json_to_mat(const nlohmann::json& j, int rows, int cols, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) {
        throw InputError(name + ": expected " + std::to_string(rows) + " rows");
    }
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            throw InputError(name + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        }
        for (int c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw InputError(name + ": entries must be numbers");
            M(i, c) = row[c].get<double>();
        }
    }
    return M;
}

}  // namespace

void save_controller_spec(const ControllerSpec& spec, const std::string& path) {
    spec.K.validate();
    nlohmann::ordered_json j;
    j["n"] = spec.K.n;
    j["A_K"] = mat_to_json(spec.K.A_K);
    j["B_theta"] = mat_to_json(spec.K.B_theta);
    j["B_omega"] = mat_to_json(spec.K.B_omega);
    j["C_K"] = mat_to_json(spec.K.C_K);
    j["D_theta"] = mat_to_json(spec.K.D_theta);
    j["D_omega"] = mat_to_json(spec.K.D_omega);
    if (spec.K.Gamma.cwiseAbs().maxCoeff() > 0.0) j["Gamma"] = mat_to_json(spec.K.Gamma);
    if (!spec.K.axis_map.empty()) j["axis_map"] = spec.K.axis_map;
    if (spec.K.regulation_only) j["regulation_only"] = true;
    j["metric"] = to_string(spec.metric);

    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

ControllerSpec load_controller_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open controller spec " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("controller spec " + path + " is not valid JSON: " + e.what());
    }
    if (!j.contains("n") || !j["n"].is_number_integer()) {
        throw InputError("controller spec must carry an integer field n");
    }
    const int n = j["n"].get<int>();
    if (n < 0) throw InputError("controller order n must be nonnegative");

    ControllerSpec spec;
    spec.K.n = n;
    spec.K.A_K = json_to_mat(j.at("A_K"), n, n, "A_K");
    spec.K.B_theta = json_to_mat(j.at("B_theta"), n, 3, "B_theta");
    spec.K.B_omega = json_to_mat(j.at("B_omega"), n, 3, "B_omega");
    spec.K.C_K = json_to_mat(j.at("C_K"), 3, n, "C_K");
    spec.K.D_theta = json_to_mat(j.at("D_theta"), 3, 3, "D_theta");
    spec.K.D_omega = json_to_mat(j.at("D_omega"), 3, 3, "D_omega");
    if (j.contains("Gamma")) spec.K.Gamma = json_to_mat(j["Gamma"], 3, 3, "Gamma");
    if (j.contains("axis_map")) {
        for (const auto& v : j["axis_map"]) {
            if (!v.is_number_integer()) throw InputError("axis_map entries must be integers");
            spec.K.axis_map.push_back(v.get<int>());
        }
    }
    if (j.contains("regulation_only")) spec.K.regulation_only = j["regulation_only"].get<bool>();
    if (j.contains("metric")) spec.metric = metric_from_string(j["metric"].get<std::string>());

    try {
        spec.K.validate();
    } catch (const Error& e) {
        throw InputError("controller spec " + path + ": " + e.what());
    }
    return spec;
}

}  // namespace so3cert

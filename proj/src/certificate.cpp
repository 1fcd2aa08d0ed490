#include "so3cert/certificate.hpp"

#include <fstream>

#include <json.hpp>

#include "so3cert/errors.hpp"

namespace so3cert {

using Eigen::MatrixXd;

Certificate make_certificate(const Eigen::VectorXd& x, const CompensatorRealization& K,
                             const Mat3& J, Metric metric, double epsilon) {
    const Layout L(K.n);
    Certificate cert;
    cert.metric = metric;
    cert.epsilon = epsilon;
    unpack(L, x, cert.P, cert.S);
    cert.margins = verify_certificate(cert.P, cert.S, K, J, metric, epsilon).margins;
    return cert;
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
        throw InputError("certificate field " + name + ": expected " + std::to_string(rows) +
                         " rows");
    }
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            throw InputError("certificate field " + name + ": bad row " + std::to_string(i));
        }
        for (int c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw InputError("certificate field " + name +
                                                      ": entries must be numbers");
            M(i, c) = row[c].get<double>();
        }
    }
    return M;
}

}  // namespace

void save_certificate(const Certificate& cert, const std::string& path) {
    nlohmann::ordered_json j;
    j["metric"] = to_string(cert.metric);
    j["epsilon"] = cert.epsilon;
    j["p11"] = cert.P.p11;
    j["P21"] = mat_to_json(cert.P.P21);
    j["P22"] = mat_to_json(cert.P.P22);
    j["P31"] = mat_to_json(cert.P.P31);
    j["P32"] = mat_to_json(cert.P.P32);
    j["P33"] = mat_to_json(cert.P.P33);
    j["tau1"] = cert.S.tau1;
    j["tau2"] = cert.S.tau2;
    j["N2"] = mat_to_json(cert.S.N2);
    j["N3"] = mat_to_json(cert.S.N3);
    nlohmann::ordered_json mg;
    for (const auto& [name, v] : cert.margins) mg[name] = v;
    j["margins"] = mg;

    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

Certificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open certificate " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("certificate " + path + " is not valid JSON: " + e.what());
    }

    Certificate cert;
    try {
        cert.metric = metric_from_string(j.at("metric").get<std::string>());
        cert.epsilon = j.at("epsilon").get<double>();
        if (!j.contains("P31") || !j["P31"].is_array()) {
            throw InputError("certificate must carry a P31 array");
        }
        const int n = static_cast<int>(j["P31"].size());
        cert.P.p11 = j.at("p11").get<double>();
        cert.P.P21 = json_to_mat(j.at("P21"), 3, 3, "P21");
        cert.P.P22 = json_to_mat(j.at("P22"), 3, 3, "P22");
        cert.P.P31 = json_to_mat(j.at("P31"), n, 3, "P31");
        cert.P.P32 = json_to_mat(j.at("P32"), n, 3, "P32");
        cert.P.P33 = json_to_mat(j.at("P33"), n, n, "P33");
        cert.S.tau1 = j.at("tau1").get<double>();
        cert.S.tau2 = j.at("tau2").get<double>();
        cert.S.N2 = json_to_mat(j.at("N2"), 3, 3, "N2");
        cert.S.N3 = json_to_mat(j.at("N3"), n, n, "N3");
        if (j.contains("margins")) {
            for (const auto& [k, v] : j["margins"].items()) {
                cert.margins[k] = v.get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("certificate " + path + " malformed: " + e.what());
    }
    return cert;
}

}  // namespace so3cert

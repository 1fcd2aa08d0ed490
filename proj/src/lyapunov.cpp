#include "so3cert/lyapunov.hpp"

#include <cmath>

#include "so3cert/errors.hpp"
#include "so3cert/jacobi.hpp"

namespace so3cert {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int sym_size(int n) { return n * (n + 1) / 2; }

void pack_sym(const MatrixXd& M, VectorXd& x, int offset) {
    int k = 0;
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = i; j < M.cols(); ++j) x[offset + k++] = M(i, j);
    }
}

MatrixXd unpack_sym(const VectorXd& x, int offset, int n) {
    MatrixXd M(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            M(i, j) = x[offset + k];
            M(j, i) = x[offset + k];
            ++k;
        }
    }
    return M;
}

MatrixXd symmetrize(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

/// Metric factor on tau inside the Schur blocks: the chordal error map has
/// |de/dt| <= |w_e| while the quaternion one has |de/dt| <= |w_e| / 2, which
/// tightens the Young-inequality split by a factor 4.
double tau_factor(Metric metric) { return metric == Metric::PsiQ ? 4.0 : 1.0; }

MatrixXd schur_w_matrix(const LyapCoeffs& P, const SlackVars& S, const Mat3& J, Metric metric) {
    MatrixXd B = MatrixXd::Zero(6, 6);
    B.topLeftCorner(3, 3) = S.N2;
    B.topRightCorner(3, 3) = J * P.P21;
    B.bottomLeftCorner(3, 3) = (J * P.P21).transpose();
    B.bottomRightCorner(3, 3) = tau_factor(metric) * S.tau2 * Mat3::Identity();
    return B;
}

MatrixXd schur_x_matrix(const LyapCoeffs& P, const SlackVars& S, Metric metric) {
    const int n = static_cast<int>(P.P31.rows());
    MatrixXd B = MatrixXd::Zero(n + 3, n + 3);
    B.topLeftCorner(n, n) = S.N3;
    B.topRightCorner(n, 3) = P.P31;
    B.bottomLeftCorner(3, n) = P.P31.transpose();
    B.bottomRightCorner(3, 3) = tau_factor(metric) * S.tau1 * Mat3::Identity();
    return B;
}

struct EqRowBuilder {
    std::vector<VectorXd> rows;
    std::vector<VectorXd> ortho;

    /// Keeps the row only if it is linearly independent of those kept so far
    /// (deterministic greedy selection, earliest rows win).
    void add(const VectorXd& r) {
        const double rn = r.norm();
        if (rn == 0.0) return;
        VectorXd v = r;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : ortho) v -= q.dot(v) * q;
        }
        if (v.norm() > 1e-12 * rn) {
            rows.push_back(r);
            ortho.push_back(v / v.norm());
        }
    }
};

}  // namespace

MatrixXd AffineSymBlock::eval(const VectorXd& x) const {
    MatrixXd M = F0;
    for (const auto& [idx, F] : coeffs) M += x[idx] * F;
    return M;
}

MatrixXd AffineSymBlock::eval_normalized(const VectorXd& x) const {
    MatrixXd M = eval(x);
    return sense == BlockSense::NSD ? MatrixXd(-M) : M;
}

Layout::Layout(int n_states) : n(n_states) {
    if (n < 0) throw DimensionMismatch("layout order must be nonnegative");
    int off = 0;
    p11 = off, off += 1;
    P21 = off, off += 9;
    P22 = off, off += 9;
    P31 = off, off += 3 * n;
    P32 = off, off += 3 * n;
    P33 = off, off += sym_size(n);
    tau1 = off, off += 1;
    tau2 = off, off += 1;
    N2 = off, off += sym_size(3);
    N3 = off, off += sym_size(n);
    dim = off;
}

VectorXd pack(const Layout& L, const LyapCoeffs& P, const SlackVars& S) {
    VectorXd x = VectorXd::Zero(L.dim);
    x[L.p11] = P.p11;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            x[L.P21 + 3 * i + j] = P.P21(i, j);
            x[L.P22 + 3 * i + j] = P.P22(i, j);
        }
    }
    for (int s = 0; s < L.n; ++s) {
        for (int j = 0; j < 3; ++j) {
            x[L.P31 + 3 * s + j] = P.P31(s, j);
            x[L.P32 + 3 * s + j] = P.P32(s, j);
        }
    }
    pack_sym(symmetrize(P.P33), x, L.P33);
    x[L.tau1] = S.tau1;
    x[L.tau2] = S.tau2;
    pack_sym(symmetrize(S.N2), x, L.N2);
    pack_sym(symmetrize(S.N3), x, L.N3);
    return x;
}

void unpack(const Layout& L, const VectorXd& x, LyapCoeffs& P, SlackVars& S) {
    if (x.size() != L.dim) throw DimensionMismatch("decision vector size does not match layout");
    P.p11 = x[L.p11];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            P.P21(i, j) = x[L.P21 + 3 * i + j];
            P.P22(i, j) = x[L.P22 + 3 * i + j];
        }
    }
    P.P31 = MatrixXd::Zero(L.n, 3);
    P.P32 = MatrixXd::Zero(L.n, 3);
    for (int s = 0; s < L.n; ++s) {
        for (int j = 0; j < 3; ++j) {
            P.P31(s, j) = x[L.P31 + 3 * s + j];
            P.P32(s, j) = x[L.P32 + 3 * s + j];
        }
    }
    P.P33 = unpack_sym(x, L.P33, L.n);
    S.tau1 = x[L.tau1];
    S.tau2 = x[L.tau2];
    S.N2 = unpack_sym(x, L.N2, 3);
    S.N3 = unpack_sym(x, L.N3, L.n);
}

double default_epsilon(const Mat3& J) {
    const VectorXd ev = jacobi_eigenvalues(J);
    const double norm2 = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    return 1e-6 * (1.0 + norm2);
}

MatrixXd assemble_P_matrix(const LyapCoeffs& P, const Mat3& J, Metric metric) {
    const int n = static_cast<int>(P.P31.rows());
    MatrixXd M = MatrixXd::Zero(6 + n, 6 + n);
    const double scale = metric == Metric::PsiQ ? 2.0 : 1.0;
    M.block(0, 0, 3, 3) = scale * P.p11 * Mat3::Identity();
    M.block(0, 3, 3, 3) = P.P21.transpose() * J;
    M.block(3, 0, 3, 3) = J * P.P21;
    M.block(3, 3, 3, 3) = P.P22 * J;
    if (n > 0) {
        M.block(0, 6, 3, n) = P.P31.transpose();
        M.block(6, 0, n, 3) = P.P31;
        M.block(3, 6, 3, n) = J * P.P32.transpose();
        M.block(6, 3, n, 3) = P.P32 * J;
        M.block(6, 6, n, n) = P.P33;
    }
    return symmetrize(M);
}

AffineSymBlock assemble_P(const LyapCoeffs& P, const Mat3& J, Metric metric) {
    AffineSymBlock b;
    b.name = "P";
    b.sense = BlockSense::PSD;
    b.F0 = assemble_P_matrix(P, J, metric);
    b.dim = static_cast<int>(b.F0.rows());
    return b;
}

MatrixXd assemble_M0_matrix(const LyapCoeffs& P, const CompensatorRealization& K, const Mat3& J) {
    const int n = K.n;
    const Mat3 Dt = K.D_theta;
    const Mat3 Dw = K.effective_D_omega();
    const MatrixXd& A = K.A_K;
    const MatrixXd& Bt = K.B_theta;
    const MatrixXd& Bw = K.B_omega;
    const MatrixXd& C = K.C_K;

    MatrixXd M = MatrixXd::Zero(6 + n, 6 + n);
    const Mat3 M11 = P.P21.transpose() * Dt + Dt.transpose() * P.P21 +
                     P.P31.transpose() * Bt + Bt.transpose() * P.P31;
    const Mat3 M21 = P.p11 * Mat3::Identity() + P.P22 * Dt + Dw.transpose() * P.P21 +
                     J * P.P32.transpose() * Bt + Bw.transpose() * P.P31;
    const Mat3 M22 = P.P22 * Dw + Dw.transpose() * P.P22 + J * P.P32.transpose() * Bw +
                     Bw.transpose() * P.P32 * J;
    M.block(0, 0, 3, 3) = M11;
    M.block(3, 0, 3, 3) = M21;
    M.block(0, 3, 3, 3) = M21.transpose();
    M.block(3, 3, 3, 3) = M22;
    if (n > 0) {
        const MatrixXd M31 =
            P.P32 * Dt + C.transpose() * P.P21 + A.transpose() * P.P31 + P.P33 * Bt;
        const MatrixXd M32 =
            P.P32 * Dw + C.transpose() * P.P22 + A.transpose() * P.P32 * J + P.P33 * Bw;
        const MatrixXd M33 =
            P.P32 * C + C.transpose() * P.P32.transpose() + P.P33 * A + A.transpose() * P.P33;
        M.block(6, 0, n, 3) = M31;
        M.block(0, 6, 3, n) = M31.transpose();
        M.block(6, 3, n, 3) = M32;
        M.block(3, 6, 3, n) = M32.transpose();
        M.block(6, 6, n, n) = M33;
    }
    return symmetrize(M);
}

AffineSymBlock assemble_M0(const LyapCoeffs& P, const CompensatorRealization& K, const Mat3& J) {
    AffineSymBlock b;
    b.name = "M0";
    b.sense = BlockSense::NSD;
    b.F0 = assemble_M0_matrix(P, K, J);
    b.dim = static_cast<int>(b.F0.rows());
    return b;
}

MatrixXd assemble_M_matrix(const LyapCoeffs& P, const SlackVars& S,
                           const CompensatorRealization& K, const Mat3& J) {
    MatrixXd M = assemble_M0_matrix(P, K, J);
    M.block(3, 3, 3, 3) += (S.tau1 + S.tau2) * Mat3::Identity() + symmetrize(S.N2);
    if (K.n > 0) M.block(6, 6, K.n, K.n) += symmetrize(S.N3);
    return M;
}

LmiProblem assemble_certification_lmis(const CompensatorRealization& K, const Mat3& J,
                                       Metric metric, double epsilon, bool decoupled) {
    K.validate();
    const double jscale = std::max(1.0, J.cwiseAbs().maxCoeff());
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-9 * jscale || min_eig_sym(J) <= 0.0) {
        throw NotSPD("inertia matrix must be symmetric positive definite");
    }
    if (epsilon <= 0.0) throw IllPosed("strictness margin epsilon must be positive");

    const Layout L(K.n);
    LmiProblem prob;
    prob.dim = L.dim;
    prob.epsilon = epsilon;

    // The assembly maps are affine in the decision vector, so the coefficient
    // matrices come from evaluating them on the coordinate basis.
    auto eval_all = [&](const VectorXd& x) {
        LyapCoeffs P;
        SlackVars S;
        unpack(L, x, P, S);
        std::vector<MatrixXd> out;
        out.push_back(assemble_P_matrix(P, J, metric));
        out.push_back(assemble_M_matrix(P, S, K, J));
        out.push_back(schur_w_matrix(P, S, J, metric));
        out.push_back(schur_x_matrix(P, S, metric));
        out.push_back((MatrixXd(1, 1) << S.tau1).finished());
        out.push_back((MatrixXd(1, 1) << S.tau2).finished());
        return out;
    };

    const std::vector<std::string> names = {"P", "M", "schur_w", "schur_x", "tau1", "tau2"};
    const std::vector<BlockSense> senses = {BlockSense::PSD,          BlockSense::NSD,
                                            BlockSense::PSDNonstrict, BlockSense::PSDNonstrict,
                                            BlockSense::PSD,          BlockSense::PSD};

    const auto base = eval_all(VectorXd::Zero(L.dim));
    prob.blocks.resize(base.size());
    for (size_t k = 0; k < base.size(); ++k) {
        prob.blocks[k].name = names[k];
        prob.blocks[k].sense = senses[k];
        prob.blocks[k].F0 = base[k];
        prob.blocks[k].dim = static_cast<int>(base[k].rows());
    }
    VectorXd x = VectorXd::Zero(L.dim);
    for (int i = 0; i < L.dim; ++i) {
        x[i] = 1.0;
        const auto vals = eval_all(x);
        x[i] = 0.0;
        for (size_t k = 0; k < vals.size(); ++k) {
            MatrixXd Fi = vals[k] - base[k];
            if (Fi.cwiseAbs().maxCoeff() > 0.0) prob.blocks[k].coeffs.emplace_back(i, Fi);
        }
    }

    // Equality constraints: P22 J and P22 itself symmetric. The remaining
    // symmetric unknowns (P33, N2, N3) are symmetric by parametrization.
    EqRowBuilder eq;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& ab : pairs) {
        const int a = ab[0], b = ab[1];
        VectorXd r = VectorXd::Zero(L.dim);
        for (int k = 0; k < 3; ++k) {
            r[L.P22 + 3 * a + k] += J(k, b);
            r[L.P22 + 3 * b + k] -= J(k, a);
        }
        eq.add(r);
    }
    for (const auto& ab : pairs) {
        VectorXd r = VectorXd::Zero(L.dim);
        r[L.P22 + 3 * ab[0] + ab[1]] = 1.0;
        r[L.P22 + 3 * ab[1] + ab[0]] = -1.0;
        eq.add(r);
    }

    if (decoupled) {
        if (K.axis_map.empty()) {
            throw IllPosed("per-axis restriction requires a controller with an axis map");
        }
        // The restriction is only meaningful when the realization itself is
        // block-diagonal with respect to the map.
        auto off_axis = [&](const MatrixXd& M, bool rows_states, bool cols_states) {
            for (int i = 0; i < M.rows(); ++i) {
                for (int j = 0; j < M.cols(); ++j) {
                    const int ai = rows_states ? K.axis_map[i] : i;
                    const int aj = cols_states ? K.axis_map[j] : j;
                    if (ai != aj && std::abs(M(i, j)) > 1e-12) return true;
                }
            }
            return false;
        };
        if (off_axis(K.A_K, true, true) || off_axis(K.B_theta, true, false) ||
            off_axis(K.B_omega, true, false) || off_axis(K.C_K, false, true) ||
            off_axis(K.D_theta, false, false) || off_axis(K.D_omega, false, false) ||
            off_axis(K.Gamma, false, false)) {
            throw IllPosed("controller realization is not axis-decoupled");
        }

        auto zero_var = [&](int idx) {
            VectorXd r = VectorXd::Zero(L.dim);
            r[idx] = 1.0;
            eq.add(r);
        };
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                zero_var(L.P21 + 3 * i + j);
                zero_var(L.P22 + 3 * i + j);
            }
        }
        int k2 = 0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                if (i != j) zero_var(L.N2 + k2);
                ++k2;
            }
        }
        for (int s = 0; s < K.n; ++s) {
            for (int a = 0; a < 3; ++a) {
                if (K.axis_map[s] != a) {
                    zero_var(L.P31 + 3 * s + a);
                    zero_var(L.P32 + 3 * s + a);
                }
            }
        }
        int k3 = 0;
        for (int s = 0; s < K.n; ++s) {
            for (int t = s; t < K.n; ++t) {
                if (K.axis_map[s] != K.axis_map[t]) {
                    zero_var(L.P33 + k3);
                    zero_var(L.N3 + k3);
                }
                ++k3;
            }
        }
    }

    prob.Aeq = MatrixXd::Zero(static_cast<int>(eq.rows.size()), L.dim);
    for (size_t r = 0; r < eq.rows.size(); ++r) prob.Aeq.row(static_cast<int>(r)) = eq.rows[r];
    prob.beq = VectorXd::Zero(prob.Aeq.rows());

    // The P21/P22/P32 slices always appear multiplied by J; scaling them by
    // 1 / mean(diag(J)) evens out the conditioning of the coefficient
    // matrices for small inertias.
    prob.var_scale = VectorXd::Ones(L.dim);
    const double s = 3.0 / J.trace();
    for (int i = 0; i < 9; ++i) {
        prob.var_scale[L.P21 + i] = s;
        prob.var_scale[L.P22 + i] = s;
    }
    for (int i = 0; i < 3 * K.n; ++i) prob.var_scale[L.P32 + i] = s;

    return prob;
}

double eval_V(const LyapCoeffs& P, const Mat3& J, Metric metric, const Rotation& R_e,
              const Vec3& w_e, const VectorXd& x_K) {
    bool clamped = false;
    const Vec3 e = err_vec_clamped(metric, R_e, &clamped);
    const double psi = psi_of(metric, R_e);
    double V = 2.0 * P.p11 * psi + w_e.dot(P.P22 * J * w_e) + 2.0 * e.dot(P.P21.transpose() * J * w_e);
    if (x_K.size() > 0) {
        V += x_K.dot(P.P33 * x_K) + 2.0 * x_K.dot(P.P31 * e) + 2.0 * x_K.dot(P.P32 * J * w_e);
    }
    return V;
}

double eval_Vdot(const LyapCoeffs& P, const CompensatorRealization& K, const Mat3& J,
                 Metric metric, const Rotation& R_e, const Vec3& w_e, const VectorXd& x_K) {
    bool clamped = false;
    const Vec3 e = err_vec_clamped(metric, R_e, &clamped);

    Vec3 edot;
    if (metric == Metric::Chordal) {
        edot = E_map(R_e.matrix()) * w_e;
    } else {
        const AxisAngle aa = log_so3(R_e);
        edot = 0.5 * (E_q_map_clamped(aa, &clamped) * w_e);
    }

    const Vec3 u = (K.n > 0 ? Vec3(K.C_K * x_K) : Vec3::Zero()) + K.D_theta * e +
                   K.effective_D_omega() * w_e;
    const Vec3 wdot = J.ldlt().solve(u);
    VectorXd xdot;
    if (K.n > 0) xdot = K.A_K * x_K + K.B_theta * e + K.B_omega * w_e;

    double Vd = 2.0 * P.p11 * e.dot(w_e);
    Vd += wdot.dot(P.P22 * J * w_e) + w_e.dot(P.P22 * J * wdot);
    Vd += 2.0 * (edot.dot(P.P21.transpose() * J * w_e) + e.dot(P.P21.transpose() * J * wdot));
    if (K.n > 0) {
        Vd += xdot.dot(P.P33 * x_K) + x_K.dot(P.P33 * xdot);
        Vd += 2.0 * (xdot.dot(P.P31 * e) + x_K.dot(P.P31 * edot));
        Vd += 2.0 * (xdot.dot(P.P32 * J * w_e) + x_K.dot(P.P32 * J * wdot));
    }
    return Vd;
}

VerifyReport verify_certificate(const LyapCoeffs& P, const SlackVars& S,
                                const CompensatorRealization& K, const Mat3& J, Metric metric,
                                double epsilon) {
    VerifyReport rep;
    rep.epsilon = epsilon;

    rep.margins["P"] = min_eig_sym(assemble_P_matrix(P, J, metric));
    rep.margins["M"] = min_eig_sym(-assemble_M_matrix(P, S, K, J));
    rep.margins["schur_w"] = min_eig_sym(schur_w_matrix(P, S, J, metric));
    rep.margins["schur_x"] = min_eig_sym(schur_x_matrix(P, S, metric));
    rep.margins["tau1"] = S.tau1;
    rep.margins["tau2"] = S.tau2;

    const double sym_scale =
        std::max(1.0, (P.P22.cwiseAbs().maxCoeff()) * std::max(1.0, J.cwiseAbs().maxCoeff()));
    const double sym_residual =
        std::max((P.P22 * J - (P.P22 * J).transpose()).cwiseAbs().maxCoeff(),
                 (P.P22 - P.P22.transpose()).cwiseAbs().maxCoeff());
    rep.margins["sym_residual"] = sym_residual;

    rep.pass = rep.margins["P"] >= epsilon && rep.margins["M"] >= epsilon &&
               rep.margins["schur_w"] >= 0.0 && rep.margins["schur_x"] >= 0.0 &&
               S.tau1 >= epsilon && S.tau2 >= epsilon && sym_residual <= 1e-8 * sym_scale;
    return rep;
}

}  // namespace so3cert

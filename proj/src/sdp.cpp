#include "so3cert/sdp.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

#include "so3cert/errors.hpp"
#include "so3cert/jacobi.hpp"

namespace so3cert {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::Feasible: return "feasible";
        case FeasibilityStatus::CertificateNotFound: return "certificate-not-found";
        case FeasibilityStatus::MaxIterations: return "max-iterations";
    }
    return "unknown";
}

namespace {

/// One sign-normalized constraint block expressed in the reduced coordinates
/// y of the equality null space: S(y, t) = F0 + sum_j y_j G_j - t I.
struct ReducedBlock {
    std::string name;
    int dim = 0;
    MatrixXd F0;
    std::vector<MatrixXd> G;
};

double log_det_from_llt(const Eigen::LLT<MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

FeasibilityResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts) {
    const int d = problem.dim;
    if (d <= 0) throw IllPosed("feasibility problem has no decision variables");
    if (problem.blocks.empty()) throw IllPosed("feasibility problem has no constraint blocks");
    if (problem.epsilon <= 0.0) throw IllPosed("target margin epsilon must be positive");
    for (const auto& blk : problem.blocks) {
        if (blk.F0.rows() != blk.dim || blk.F0.cols() != blk.dim) {
            throw DimensionMismatch("block " + blk.name + " has inconsistent dimensions");
        }
        for (const auto& [idx, F] : blk.coeffs) {
            if (idx < 0 || idx >= d) throw DimensionMismatch("block " + blk.name +
                                                             " references variable out of range");
            if (F.rows() != blk.dim || F.cols() != blk.dim) {
                throw DimensionMismatch("block " + blk.name + " coefficient size mismatch");
            }
        }
    }

    VectorXd scale = VectorXd::Ones(d);
    if (problem.var_scale.size() == d) {
        scale = problem.var_scale;
        if (scale.minCoeff() <= 0.0) throw IllPosed("variable scales must be positive");
    } else if (problem.var_scale.size() != 0) {
        throw DimensionMismatch("var_scale length does not match problem dimension");
    }

    // Equality elimination: x = scale .* (xhat_p + Z y) with Z an orthonormal
    // basis of the null space of the column-scaled equality matrix.
    const int r = static_cast<int>(problem.Aeq.rows());
    MatrixXd Z;
    VectorXd xhat_p = VectorXd::Zero(d);
    if (r > 0) {
        if (problem.Aeq.cols() != d) throw DimensionMismatch("Aeq column count mismatch");
        if (problem.beq.size() != r) throw DimensionMismatch("beq length mismatch");
        const MatrixXd As = problem.Aeq * scale.asDiagonal();
        Eigen::JacobiSVD<MatrixXd> svd(As, Eigen::ComputeFullV | Eigen::ComputeThinU);
        const VectorXd& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv[0] : 0.0;
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv[i] > 1e-12 * std::max(smax, 1.0)) ++rank;
        }
        if (rank < r) {
            throw IllPosed("equality constraints are linearly dependent; drop redundant rows");
        }
        if (rank >= d) throw IllPosed("equality constraints leave no degrees of freedom");
        if (problem.beq.cwiseAbs().maxCoeff() > 0.0) {
            xhat_p = svd.solve(problem.beq);
            if ((As * xhat_p - problem.beq).norm() > 1e-8 * (1.0 + problem.beq.norm())) {
                throw IllPosed("equality constraints are inconsistent");
            }
        }
        Z = svd.matrixV().rightCols(d - rank);
    } else {
        Z = MatrixXd::Identity(d, d);
    }
    const int m = static_cast<int>(Z.cols());

    bool homogeneous = xhat_p.cwiseAbs().maxCoeff() == 0.0;

    std::vector<ReducedBlock> blocks;
    blocks.reserve(problem.blocks.size());
    for (const auto& blk : problem.blocks) {
        const double sgn = blk.sense == BlockSense::NSD ? -1.0 : 1.0;
        ReducedBlock rb;
        rb.name = blk.name;
        rb.dim = blk.dim;
        rb.F0 = sgn * blk.F0;
        rb.G.assign(m, MatrixXd::Zero(blk.dim, blk.dim));
        for (const auto& [idx, F] : blk.coeffs) {
            const MatrixXd Fs = (sgn * scale[idx]) * F;
            if (xhat_p[idx] != 0.0) rb.F0 += xhat_p[idx] * Fs;
            for (int j = 0; j < m; ++j) {
                const double z = Z(idx, j);
                if (z != 0.0) rb.G[j] += z * Fs;
            }
        }
        if (rb.F0.cwiseAbs().maxCoeff() > 0.0) homogeneous = false;
        blocks.push_back(std::move(rb));
    }

    auto eval_block = [&](const ReducedBlock& rb, const VectorXd& y, double t) {
        MatrixXd S = rb.F0;
        for (int j = 0; j < m; ++j) {
            if (y[j] != 0.0) S += y[j] * rb.G[j];
        }
        S.diagonal().array() -= t;
        return S;
    };

    const double R2 = opts.ball_radius * opts.ball_radius;

    // Barrier objective for a given weight eta; ok reports interiority.
    auto f_value = [&](const VectorXd& y, double t, double eta, bool& ok) -> double {
        ok = false;
        const double ball = R2 - y.squaredNorm();
        if (ball <= 0.0) return 0.0;
        const double cap = opts.t_cap - t;
        if (cap <= 0.0) return 0.0;
        double val = -eta * t - std::log(ball) - std::log(cap);
        for (const auto& rb : blocks) {
            Eigen::LLT<MatrixXd> llt(eval_block(rb, y, t));
            if (llt.info() != Eigen::Success) return 0.0;
            val -= log_det_from_llt(llt);
        }
        ok = true;
        return val;
    };

    VectorXd y = VectorXd::Zero(m);
    double t = -1.0;
    for (const auto& rb : blocks) {
        t = std::min(t, min_eig_sym(rb.F0) - 1.0);
    }

    FeasibilityResult res;
    double eta = opts.eta0;
    bool stalled = false;
    int stall_count = 0;

    for (int outer = 0; outer < opts.outer_cap; ++outer) {
        for (int inner = 0; inner < opts.inner_cap; ++inner) {
            VectorXd g = VectorXd::Zero(m + 1);
            MatrixXd H = MatrixXd::Zero(m + 1, m + 1);
            g[m] = -eta;
            const double ball = R2 - y.squaredNorm();
            g.head(m) += (2.0 / ball) * y;
            H.topLeftCorner(m, m) += (2.0 / ball) * MatrixXd::Identity(m, m);
            H.topLeftCorner(m, m) += (4.0 / (ball * ball)) * (y * y.transpose());
            const double cap = opts.t_cap - t;
            g[m] += 1.0 / cap;
            H(m, m) += 1.0 / (cap * cap);

            bool degenerate = false;
            for (const auto& rb : blocks) {
                Eigen::LLT<MatrixXd> llt(eval_block(rb, y, t));
                if (llt.info() != Eigen::Success) {
                    degenerate = true;
                    break;
                }
                const auto L = llt.matrixL();
                std::vector<MatrixXd> M(m + 1);
                for (int j = 0; j < m; ++j) {
                    MatrixXd W = L.solve(rb.G[j]);
                    M[j] = L.solve(W.transpose());
                }
                {
                    MatrixXd W = L.solve(MatrixXd::Identity(rb.dim, rb.dim));
                    M[m] = -L.solve(W.transpose());
                }
                for (int j = 0; j <= m; ++j) {
                    g[j] -= M[j].trace();
                    for (int l = j; l <= m; ++l) {
                        const double h = (M[j].array() * M[l].array()).sum();
                        H(j, l) += h;
                        if (l != j) H(l, j) += h;
                    }
                }
            }
            if (degenerate) break;

            // Newton direction with an escalating ridge if the Hessian is
            // numerically singular.
            VectorXd step;
            bool solved = false;
            for (double ridge = 0.0; ridge <= 1.0; ridge = (ridge == 0.0 ? 1e-12 : ridge * 100)) {
                MatrixXd Hr = H;
                if (ridge > 0.0) Hr.diagonal().array() += ridge * (1.0 + H.diagonal().maxCoeff());
                Eigen::LDLT<MatrixXd> ldlt(Hr);
                if (ldlt.info() == Eigen::Success) {
                    step = ldlt.solve(-g);
                    if (step.allFinite()) {
                        solved = true;
                        break;
                    }
                }
            }
            if (!solved) break;

            const double decrement = -g.dot(step);
            if (decrement / 2.0 < opts.newton_tol) break;

            bool ok0 = false;
            const double f0 = f_value(y, t, eta, ok0);
            if (!ok0) break;
            double alpha = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                const VectorXd y_trial = y + alpha * step.head(m);
                const double t_trial = t + alpha * step[m];
                bool ok = false;
                const double f_trial = f_value(y_trial, t_trial, eta, ok);
                if (ok && f_trial <= f0 + 1e-4 * alpha * g.dot(step)) {
                    y = y_trial;
                    t = t_trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++res.newton_iterations;
            if (!accepted) break;
        }
        ++res.outer_iterations;

        if (opts.verbose) {
            std::cerr << "outer " << res.outer_iterations << "  eta " << eta << "  t " << t
                      << "\n";
        }
        if (t >= std::max(100.0 * problem.epsilon, opts.early_exit_abs)) break;
        if (t < problem.epsilon) {
            ++stall_count;
        } else {
            stall_count = 0;
        }
        if (stall_count >= 3 && res.outer_iterations >= 5) {
            stalled = true;
            break;
        }
        eta *= opts.eta_growth;
    }

    VectorXd x = scale.asDiagonal() * (xhat_p + Z * y);

    // True uniform margin at the returned point, measured independently of
    // the barrier variable.
    auto margins_at = [&](const VectorXd& xv) {
        std::map<std::string, double> mg;
        double tmin = std::numeric_limits<double>::infinity();
        for (const auto& blk : problem.blocks) {
            const double me = min_eig_sym(blk.eval_normalized(xv));
            mg[blk.name] = me;
            tmin = std::min(tmin, me);
        }
        return std::make_pair(mg, tmin);
    };

    auto [margins, tmin] = margins_at(x);
    res.t_star = tmin;

    if (homogeneous && tmin > 0.0) {
        const double xinf = x.cwiseAbs().maxCoeff();
        if (xinf > 0.0) {
            const double a = opts.norm_target / xinf;
            if (a * tmin >= problem.epsilon) {
                x *= a;
                auto [mg2, t2] = margins_at(x);
                margins = std::move(mg2);
                res.t_star = t2;
            }
        }
    }

    res.x = x;
    res.block_min_eigs = std::move(margins);
    res.status = res.t_star >= problem.epsilon
                     ? FeasibilityStatus::Feasible
                     : (stalled ? FeasibilityStatus::CertificateNotFound
                                : FeasibilityStatus::MaxIterations);
    return res;
}

}  // namespace so3cert

#include "so3cert/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "so3cert/errors.hpp"

namespace so3cert {

Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd A, int max_sweeps) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return Eigen::VectorXd();
    if (n == 1) return A.col(0);

    const auto off_norm = [&A, n]() {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        }
        return std::sqrt(off);
    };
    const auto converged = [&A, &off_norm]() {
        const double off = off_norm();
        const double scale = std::max(A.diagonal().cwiseAbs().maxCoeff() + off, 1e-300);
        return off <= 1e-15 * scale;
    };

    bool done = false;
    for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
        if (converged()) {
            done = true;
            break;
        }

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double app = A(p, p);
                const double aqq = A(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root of t^2 + 2 tau t - 1 = 0 keeps the
                // rotation angle below pi/4, the classically stable choice
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    if (!done && !converged()) {
        throw NoConvergence("jacobi_eigenvalues: off-diagonal mass persisted after " +
                            std::to_string(max_sweeps) + " sweeps");
    }

    Eigen::VectorXd ev = A.diagonal();
    std::sort(ev.data(), ev.data() + n);
    return ev;
}

double min_eig_sym(const Eigen::MatrixXd& A, double sym_tol) {
    const double asym = (A - A.transpose()).norm();
    if (asym > sym_tol) {
        throw NotSymmetric("min_eig_sym: |A - A'| = " + std::to_string(asym));
    }
    const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
    return jacobi_eigenvalues(S).minCoeff();
}

}  // namespace so3cert

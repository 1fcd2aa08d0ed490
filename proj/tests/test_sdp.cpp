#include <doctest.h>

#include "so3cert/sdp.hpp"

using namespace so3cert;

namespace {

AffineSymBlock scalar_block(const std::string& name, BlockSense sense, double f0, double coeff,
                            int var) {
    AffineSymBlock blk;
    blk.name = name;
    blk.sense = sense;
    blk.dim = 1;
    blk.F0 = Eigen::MatrixXd::Constant(1, 1, f0);
    blk.coeffs.push_back({var, Eigen::MatrixXd::Constant(1, 1, coeff)});
    return blk;
}

LmiProblem empty_problem(int dim, double epsilon) {
    LmiProblem prob;
    prob.dim = dim;
    prob.Aeq = Eigen::MatrixXd::Zero(0, dim);
    prob.beq = Eigen::VectorXd::Zero(0);
    prob.epsilon = epsilon;
    return prob;
}

}  // namespace

TEST_CASE("scalar feasible problem: x >= eps with x free") {
    LmiProblem prob = empty_problem(1, 1e-6);
    prob.blocks.push_back(scalar_block("x", BlockSense::PSD, 0.0, 1.0, 0));

    const FeasibilityResult res = solve_feasibility(prob);
    CHECK(res.feasible());
    CHECK(res.x(0) >= prob.epsilon);
    CHECK(res.t_star >= prob.epsilon);
    CHECK(res.block_min_eigs.at("x") >= prob.epsilon);
}

TEST_CASE("contradictory scalar blocks are reported as not found") {
    // x - 1 >= 0 and -x >= 0 cannot hold together.
    LmiProblem prob = empty_problem(1, 1e-6);
    prob.blocks.push_back(scalar_block("lower", BlockSense::PSD, -1.0, 1.0, 0));
    prob.blocks.push_back(scalar_block("upper", BlockSense::NSD, 0.0, 1.0, 0));

    const FeasibilityResult res = solve_feasibility(prob);
    CHECK_FALSE(res.feasible());
    CHECK(res.status == FeasibilityStatus::CertificateNotFound);
}

TEST_CASE("two sided scalar interval is found") {
    // 1 <= x <= 3, written as x - 1 >= 0 (PSD) and x - 3 <= 0 (NSD).
    LmiProblem prob = empty_problem(1, 1e-6);
    prob.blocks.push_back(scalar_block("lower", BlockSense::PSD, -1.0, 1.0, 0));
    prob.blocks.push_back(scalar_block("upper", BlockSense::NSD, -3.0, 1.0, 0));

    const FeasibilityResult res = solve_feasibility(prob);
    CHECK(res.feasible());
    CHECK(res.x(0) >= 1.0);
    CHECK(res.x(0) <= 3.0);
}

TEST_CASE("matrix block with equality pinning") {
    // diag(x0, x1) >= eps with x0 + x1 = 2 and x0 - x1 = 0.
    LmiProblem prob = empty_problem(2, 1e-6);
    AffineSymBlock blk;
    blk.name = "D";
    blk.sense = BlockSense::PSD;
    blk.dim = 2;
    blk.F0 = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(2, 2), G1 = Eigen::MatrixXd::Zero(2, 2);
    G0(0, 0) = 1.0;
    G1(1, 1) = 1.0;
    blk.coeffs.push_back({0, G0});
    blk.coeffs.push_back({1, G1});
    prob.blocks.push_back(blk);

    prob.Aeq = Eigen::MatrixXd(1, 2);
    prob.Aeq << 1, 1;
    prob.beq = Eigen::VectorXd(1);
    prob.beq << 2;

    // The margin is maximized on the line x0 + x1 = 2 at the balanced point.
    const FeasibilityResult res = solve_feasibility(prob);
    CHECK(res.feasible());
    CHECK(res.x(0) + res.x(1) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("dependent equality rows are rejected") {
    LmiProblem prob = empty_problem(2, 1e-6);
    prob.blocks.push_back(scalar_block("x", BlockSense::PSD, 0.0, 1.0, 0));
    prob.Aeq = Eigen::MatrixXd(2, 2);
    prob.Aeq << 1, 1, 2, 2;  // second row is a multiple of the first
    prob.beq = Eigen::VectorXd(2);
    prob.beq << 1, 2;
    CHECK_THROWS_AS(solve_feasibility(prob), IllPosed);
}

TEST_CASE("equalities that pin every variable are rejected") {
    LmiProblem prob = empty_problem(1, 1e-6);
    prob.blocks.push_back(scalar_block("x", BlockSense::PSD, 0.0, 1.0, 0));
    prob.Aeq = Eigen::MatrixXd(1, 1);
    prob.Aeq << 1;
    prob.beq = Eigen::VectorXd(1);
    prob.beq << 1;  // nothing left to search
    CHECK_THROWS_AS(solve_feasibility(prob), IllPosed);
}

TEST_CASE("nonstrict blocks share the uniform margin") {
    // The solver drives a single margin under every block, nonstrict senses
    // included, so a nonstrict block with interior ends strictly inside the
    // cone and its minimum eigenvalue is reported alongside the strict ones.
    LmiProblem prob = empty_problem(1, 1e-6);
    prob.blocks.push_back(scalar_block("x", BlockSense::PSD, 0.0, 1.0, 0));
    AffineSymBlock soft;
    soft.name = "soft";
    soft.sense = BlockSense::PSDNonstrict;
    soft.dim = 2;
    soft.F0 = (Eigen::MatrixXd(2, 2) << 0, 0, 0, 1).finished();
    soft.coeffs.push_back({0, (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished()});
    prob.blocks.push_back(soft);  // diag(x, 1) >= 0

    const FeasibilityResult res = solve_feasibility(prob);
    CHECK(res.feasible());
    CHECK(res.block_min_eigs.at("x") >= prob.epsilon);
    CHECK(res.block_min_eigs.at("soft") >= 0.0);
}

TEST_CASE("feasibility is preserved under uniform scaling of the blocks") {
    for (double scale : {1.0, 10.0}) {
        LmiProblem prob = empty_problem(2, 1e-6);
        AffineSymBlock blk;
        blk.name = "A";
        blk.sense = BlockSense::PSD;
        blk.dim = 2;
        blk.F0 = Eigen::MatrixXd::Zero(2, 2);
        Eigen::MatrixXd G0(2, 2), G1(2, 2);
        G0 << 1, 0.3, 0.3, 0.5;
        G1 << 0.2, -0.1, -0.1, 1.0;
        blk.coeffs.push_back({0, scale * G0});
        blk.coeffs.push_back({1, scale * G1});
        prob.blocks.push_back(blk);

        const FeasibilityResult res = solve_feasibility(prob);
        CHECK(res.feasible());
    }
}

TEST_CASE("status strings") {
    CHECK(to_string(FeasibilityStatus::Feasible) == "feasible");
    CHECK(to_string(FeasibilityStatus::CertificateNotFound) == "certificate-not-found");
    CHECK(to_string(FeasibilityStatus::MaxIterations) == "max-iterations");
}

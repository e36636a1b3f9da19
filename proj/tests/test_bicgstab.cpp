#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helmecs/bicgstab.hpp"
#include "helmecs/preconditioner.hpp"
#include "support/oracles.hpp"

using namespace helmecs;
using helmecs::testing::random_vector;
using std::numbers::pi;

namespace {

const LinearOp kIdentity = [](std::span<const cplx> in, std::span<cplx> out) {
    std::copy(in.begin(), in.end(), out.begin());
};

ModelProblem mp1_desk() {
    ModelProblem m;
    m.kind = ModelKind::mp1;
    m.k = 20.0;
    m.x = AxisSpec{16, 2, 2, 1.0, 2.0 / 16.0, pi / 6};
    m.y = m.x;
    return m;
}

}  // namespace

TEST_CASE("bicgstab: identity system converges in at most one iteration") {
    const cvec b = random_vector(12, 17);
    const cvec x0(b.size(), cplx{0.0});
    const auto [x, report] = bicgstab(kIdentity, kIdentity, b, x0, KrylovConfig{});
    CHECK(report.converged);
    CHECK(report.iterations <= 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(x[i] - b[i]) < 1e-12);
    CHECK(report.residual_history.size() == static_cast<std::size_t>(report.iterations) + 1);
}

TEST_CASE("bicgstab: desk mp1 with QD preconditioning matches the dense solve") {
    const ModelProblem m = mp1_desk();
    const TensorGrid2D grid = make_grid(m);
    const StencilOperator z = discretize(OperatorSpec{m}, grid);
    const cvec b = build_rhs(m, grid);

    PreconditionerSpec qd;
    qd.kind = PreconditionerKind::qd;
    qd.lambda0 = smallest_real_eigenvalue(OperatorSpec{m}, Lambda0Method::one_d_composition);
    MgConfig mg;
    const Hierarchy h(preconditioner_spec(m, qd), grid, mg);

    KrylovConfig cfg;
    cfg.tol = 1e-8;
    const cvec x0(b.size(), cplx{0.0});
    const auto [x, report] = bicgstab(operator_action(z), mg_preconditioner(h, mg), b, x0, cfg);
    REQUIRE(report.converged);

    const Eigen::MatrixXcd a = z.assemble_dense();
    Eigen::Map<const Eigen::VectorXcd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXcd ref = a.partialPivLu().solve(bv);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += std::norm(x[i] - ref(static_cast<Eigen::Index>(i)));
        den += std::norm(ref(static_cast<Eigen::Index>(i)));
    }
    CHECK(std::sqrt(num / den) <= 1e-6);

    // Call accounting: exactly two preconditioner applications per iteration.
    CHECK(report.mg_cycles == 2L * report.iterations);

    // True and recursive residuals agree at desk scale.
    REQUIRE(report.recursive_residual_history.size() == report.residual_history.size());
    for (std::size_t i = 0; i < report.residual_history.size(); ++i)
        CHECK(std::abs(report.residual_history[i] - report.recursive_residual_history[i]) <= 1e-8);
}

TEST_CASE("bicgstab: deterministic residual history") {
    const ModelProblem m = mp1_desk();
    const TensorGrid2D grid = make_grid(m);
    const StencilOperator z = discretize(OperatorSpec{m}, grid);
    const cvec b = build_rhs(m, grid);
    PreconditionerSpec qd;
    qd.kind = PreconditionerKind::qd;
    qd.lambda0 = cplx{-400.0, 0.0};
    MgConfig mg;
    const Hierarchy h(preconditioner_spec(m, qd), grid, mg);

    const cvec x0(b.size(), cplx{0.0});
    const auto [x1, r1] = bicgstab(operator_action(z), mg_preconditioner(h, mg), b, x0, KrylovConfig{});
    const auto [x2, r2] = bicgstab(operator_action(z), mg_preconditioner(h, mg), b, x0, KrylovConfig{});
    CHECK(r1.residual_history == r2.residual_history);  // bit-identical
    CHECK(x1 == x2);
}

TEST_CASE("bicgstab: breakdown is reported distinctly") {
    // Rotation operator: <r0, A r0> = 0 for r0 = e_0, so the first alpha
    // denominator vanishes.
    const LinearOp rot = [](std::span<const cplx> in, std::span<cplx> out) {
        out[0] = in[1];
        out[1] = -in[0];
    };
    const cvec b{cplx{1.0}, cplx{0.0}};
    const cvec x0(2, cplx{0.0});
    const auto [x, report] = bicgstab(rot, kIdentity, b, x0, KrylovConfig{});
    CHECK(!report.converged);
    CHECK(report.status == KrylovStatus::breakdown);
}

TEST_CASE("bicgstab: max_iter exhaustion is reported") {
    const ModelProblem m = mp1_desk();
    const TensorGrid2D grid = make_grid(m);
    const StencilOperator z = discretize(OperatorSpec{m}, grid);
    const cvec b = build_rhs(m, grid);
    KrylovConfig cfg;
    cfg.max_iter = 1;
    cfg.tol = 1e-14;
    const auto [x, report] = bicgstab(operator_action(z), kIdentity, b, cvec(b.size()), cfg);
    CHECK(!report.converged);
    CHECK(report.status == KrylovStatus::max_iterations);
    CHECK(report.iterations == 1);
}

TEST_CASE("warm_start_guess: zero rhs, identity preconditioner") {
    MgConfig mg;
    OperatorSpec id;
    id.model.kind = ModelKind::custom;
    id.model.x = AxisSpec{4, 0, 0, 1.0, 0.0, 0.0};
    id.model.y = id.model.x;
    id.zz_scale = cplx{0.0};
    id.shift = cplx{1.0};
    const Hierarchy h(id, make_grid(id.model), mg);

    int cycles = 0;
    const cvec zero = warm_start_guess(h, cvec(9, cplx{0.0}), 1e-2, mg, cycles);
    CHECK(cycles == 0);
    for (cplx v : zero) CHECK(v == cplx{0.0});

    const cvec b = random_vector(9, 5);
    const cvec x0 = warm_start_guess(h, b, 1e-2, mg, cycles);
    CHECK(cycles == 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(x0[i] - b[i]) < 1e-14);
}

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helmecs/multigrid.hpp"
#include "helmecs/preconditioner.hpp"
#include "support/oracles.hpp"

using namespace helmecs;
using helmecs::testing::collapse_levels;
using helmecs::testing::random_vector;
using helmecs::testing::simulate_cycle;
using std::numbers::pi;

namespace {

OperatorSpec identity_spec(int nx_cells, int ny_cells) {
    ModelProblem m;
    m.kind = ModelKind::custom;
    m.x = AxisSpec{nx_cells, 0, 0, 1.0, 0.0, 0.0};
    m.y = AxisSpec{ny_cells, 0, 0, 1.0, 0.0, 0.0};
    OperatorSpec spec{m};
    spec.zz_scale = cplx{0.0};
    spec.shift = cplx{1.0};
    return spec;
}

OperatorSpec qd_spec(const ModelProblem& m, cplx lambda0) {
    PreconditionerSpec qd;
    qd.kind = PreconditionerKind::qd;
    qd.lambda0 = lambda0;
    return preconditioner_spec(m, qd);
}

ModelProblem mp1_desk(double k, int n, int m_cells) {
    ModelProblem m;
    m.kind = ModelKind::mp1;
    m.k = k;
    m.x = AxisSpec{n, m_cells, m_cells, 1.0, m_cells * (1.0 / n), pi / 6};
    m.y = m.x;
    return m;
}

}  // namespace

TEST_CASE("build_hierarchy: repeated halving and rediscretization") {
    const ModelProblem m = mp1_desk(160.0, 256, 64);
    MgConfig cfg;
    cfg.max_coarse_level = 6;
    cfg.coarse_cap = 1;  // depth limited by the level cap / divisibility only
    const Hierarchy h(qd_spec(m, cplx{-2.6e4, 0.0}), make_grid(m), cfg);
    CHECK(h.coarsest() == 6);
    CHECK(h.grid(6).gx.n == 4);
    CHECK(h.grid(6).gx.m_lo == 1);
    CHECK(h.grid(6).gx.m_hi == 1);

    // Level 1 operator is the rediscretization on the coarsened grid.
    const StencilOperator direct = discretize(h.spec(), make_grid(m).coarsen());
    const StencilOperator& level1 = h.op(1);
    REQUIRE(direct.size() == level1.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct.center(i) == level1.center(i));
        CHECK(direct.west(i) == level1.west(i));
        CHECK(direct.north(i) == level1.north(i));
    }
}

TEST_CASE("build_hierarchy: default caps keep the coarsest under 1024 unknowns") {
    const ModelProblem m = mp1_desk(160.0, 256, 64);
    const Hierarchy h = build_hierarchy(qd_spec(m, cplx{-2.6e4, 0.0}), MgConfig{});
    CHECK(h.grid(h.coarsest()).unknowns() <= 1024);
    CHECK(h.coarsest() == 4);  // 383^2 -> 191^2 -> 95^2 -> 47^2 -> 23^2
}

TEST_CASE("build_hierarchy: error when coarsening stalls above the dense cap") {
    ModelProblem m;
    m.kind = ModelKind::mp1;
    m.k = 1.0;
    m.x = AxisSpec{134, 0, 0, 1.0, 0.0, 0.0};  // 134 -> 67, then odd at 66^2 > 4096
    m.y = m.x;
    CHECK_THROWS_AS((void)build_hierarchy(OperatorSpec{m}, MgConfig{}), std::invalid_argument);
}

TEST_CASE("smooth: zero sweeps and identity operator") {
    const StencilOperator id = discretize(identity_spec(4, 4));
    const cvec b = random_vector(id.size(), 7);
    cvec u = random_vector(id.size(), 8);
    const cvec u0 = u;
    smooth(id, u, b, SmootherKind::jacobi, 1.0, 0);
    CHECK(u == u0);
    smooth(id, u, b, SmootherKind::jacobi, 1.0, 1);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - b[i]) < 1e-15);
}

TEST_CASE("smooth: one Jacobi sweep on a 1D Poisson row") {
    ModelProblem m;
    m.kind = ModelKind::mp1;
    m.k = 0.0;
    m.x = AxisSpec{8, 0, 0, 1.0, 0.0, 0.0};
    m.y = AxisSpec{2, 0, 0, 1.0, 0.0, 0.0};  // single row of unknowns
    const StencilOperator op = discretize(OperatorSpec{m});
    REQUIRE(op.size() == 7);
    cvec b(op.size(), cplx{0.0});
    b[3] = cplx{1.0};
    cvec u(op.size(), cplx{0.0});
    smooth(op, u, b, SmootherKind::jacobi, 1.0, 1);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(u[i] - b[i] / op.center(i)) < 1e-15);
}

TEST_CASE("smooth: Jacobi sweep equals the dense formula") {
    const ModelProblem m = mp1_desk(8.0, 12, 2);
    const StencilOperator op = discretize(OperatorSpec{m});
    const Eigen::MatrixXcd a = op.assemble_dense();
    const cvec b = random_vector(op.size(), 3);
    cvec u = random_vector(op.size(), 4);

    Eigen::Map<const Eigen::VectorXcd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXcd uv = Eigen::Map<const Eigen::VectorXcd>(u.data(), bv.size());
    const double omega = 0.8;
    const Eigen::VectorXcd expected = uv + omega * (a.diagonal().asDiagonal().inverse() * (bv - a * uv));

    smooth(op, u, b, SmootherKind::jacobi, omega, 1);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(u[i] - expected(static_cast<Eigen::Index>(i))) < 1e-13);
}

TEST_CASE("smooth: red-black sweep updates red with old values, black with new") {
    const ModelProblem m = mp1_desk(8.0, 8, 2);
    const StencilOperator op = discretize(OperatorSpec{m});
    const int nx = op.grid().nux();
    const int ny = op.grid().nuy();
    const cvec b = random_vector(op.size(), 11);
    cvec u = random_vector(op.size(), 12);
    const double omega = 1.05;

    // Dense emulation of a single red-black sweep.
    cvec expected = u;
    for (int color = 0; color < 2; ++color)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                if ((ix + iy) % 2 != color) continue;
                const std::size_t i = op.grid().index(ix, iy);
                expected[i] += omega * (b[i] - op.row_apply(ix, iy, expected)) / op.center(i);
            }

    smooth(op, u, b, SmootherKind::rb_jacobi, omega, 1);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - expected[i]) < 1e-13);
}

TEST_CASE("smooth rejects a zero diagonal") {
    OperatorSpec spec = identity_spec(4, 4);
    spec.shift = cplx{0.0};  // zz_scale = 0 too: all-zero operator
    const StencilOperator op = discretize(spec);
    cvec u(op.size(), cplx{0.0});
    const cvec b(op.size(), cplx{1.0});
    CHECK_THROWS_AS(smooth(op, u, b, SmootherKind::jacobi, 1.0, 1), std::invalid_argument);
}

TEST_CASE("restrict_fw: constants, deltas, zero") {
    const TensorGrid2D fine{build_grid(8, 0, 0, 1.0, 0.0, 0.0), build_grid(8, 0, 0, 1.0, 0.0, 0.0)};
    const TensorGrid2D coarse = fine.coarsen();

    const cvec ones(fine.unknowns(), cplx{1.0});
    const cvec r1 = restrict_fw(ones, fine, coarse);
    for (cplx v : r1) CHECK(std::abs(v - cplx{1.0}) < 1e-15);

    const cvec zero(fine.unknowns(), cplx{0.0});
    for (cplx v : restrict_fw(zero, fine, coarse)) CHECK(v == cplx{0.0});

    // Delta at a coarse-coincident fine node: 1/4 at that coarse unknown.
    cvec delta(fine.unknowns(), cplx{0.0});
    delta[fine.index(3, 3)] = cplx{1.0};  // fine (3,3) = coarse (1,1)
    cvec rc = restrict_fw(delta, fine, coarse);
    for (int cy = 0; cy < coarse.nuy(); ++cy)
        for (int cx = 0; cx < coarse.nux(); ++cx) {
            const cplx expect = (cx == 1 && cy == 1) ? cplx{0.25} : cplx{0.0};
            CHECK(std::abs(rc[coarse.index(cx, cy)] - expect) < 1e-15);
        }

    // Delta at an edge midpoint: 1/8 at the two adjacent coarse unknowns.
    delta.assign(fine.unknowns(), cplx{0.0});
    delta[fine.index(4, 3)] = cplx{1.0};
    rc = restrict_fw(delta, fine, coarse);
    CHECK(std::abs(rc[coarse.index(1, 1)] - cplx{0.125}) < 1e-15);
    CHECK(std::abs(rc[coarse.index(2, 1)] - cplx{0.125}) < 1e-15);

    // Delta at a cell center: 1/16 at the four diagonal coarse unknowns.
    delta.assign(fine.unknowns(), cplx{0.0});
    delta[fine.index(4, 4)] = cplx{1.0};
    rc = restrict_fw(delta, fine, coarse);
    for (const auto [cx, cy] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}})
        CHECK(std::abs(rc[coarse.index(cx, cy)] - cplx{1.0 / 16.0}) < 1e-15);

    CHECK_THROWS_AS((void)restrict_fw(ones, fine, fine), std::invalid_argument);
}

TEST_CASE("prolong_bilinear: constants away from the boundary, hat function") {
    const TensorGrid2D fine{build_grid(8, 0, 0, 1.0, 0.0, 0.0), build_grid(8, 0, 0, 1.0, 0.0, 0.0)};
    const TensorGrid2D coarse = fine.coarsen();

    const cvec ones(coarse.unknowns(), cplx{1.0});
    const cvec p1 = prolong_bilinear(ones, coarse, fine);
    for (int fy = 1; fy < fine.nuy() - 1; ++fy)
        for (int fx = 1; fx < fine.nux() - 1; ++fx)
            CHECK(std::abs(p1[fine.index(fx, fy)] - cplx{1.0}) < 1e-15);

    cvec delta(coarse.unknowns(), cplx{0.0});
    delta[coarse.index(1, 1)] = cplx{1.0};
    const cvec hat = prolong_bilinear(delta, coarse, fine);
    CHECK(std::abs(hat[fine.index(3, 3)] - cplx{1.0}) < 1e-15);
    CHECK(std::abs(hat[fine.index(2, 3)] - cplx{0.5}) < 1e-15);
    CHECK(std::abs(hat[fine.index(4, 3)] - cplx{0.5}) < 1e-15);
    CHECK(std::abs(hat[fine.index(3, 2)] - cplx{0.5}) < 1e-15);
    CHECK(std::abs(hat[fine.index(3, 4)] - cplx{0.5}) < 1e-15);
    for (const auto [fx, fy] : {std::pair{2, 2}, {4, 2}, {2, 4}, {4, 4}})
        CHECK(std::abs(hat[fine.index(fx, fy)] - cplx{0.25}) < 1e-15);
    CHECK(std::abs(hat[fine.index(5, 3)]) < 1e-15);
}

TEST_CASE("transfer transpose identity: R = P^T / 4") {
    const TensorGrid2D fine{build_grid(8, 0, 0, 1.0, 0.0, 0.0), build_grid(8, 0, 0, 1.0, 0.0, 0.0)};
    const TensorGrid2D coarse = fine.coarsen();
    const auto nf = static_cast<Eigen::Index>(fine.unknowns());
    const auto nc = static_cast<Eigen::Index>(coarse.unknowns());

    Eigen::MatrixXcd r(nc, nf), p(nf, nc);
    for (Eigen::Index j = 0; j < nf; ++j) {
        cvec e(fine.unknowns(), cplx{0.0});
        e[static_cast<std::size_t>(j)] = cplx{1.0};
        const cvec col = restrict_fw(e, fine, coarse);
        for (Eigen::Index i = 0; i < nc; ++i) r(i, j) = col[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index j = 0; j < nc; ++j) {
        cvec e(coarse.unknowns(), cplx{0.0});
        e[static_cast<std::size_t>(j)] = cplx{1.0};
        const cvec col = prolong_bilinear(e, coarse, fine);
        for (Eigen::Index i = 0; i < nf; ++i) p(i, j) = col[static_cast<std::size_t>(i)];
    }
    CHECK((r - 0.25 * p.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mg_cycle: level-visit traces match the recursion simulator") {
    const ModelProblem m = mp1_desk(8.0, 32, 8);
    MgConfig cfg;
    cfg.coarse_cap = 1;
    cfg.max_coarse_level = 3;  // 4 levels
    const Hierarchy h(qd_spec(m, cplx{-64.0, 0.0}), make_grid(m), cfg);
    REQUIRE(h.coarsest() == 3);

    for (int gf = 1; gf <= 4; ++gf)
        for (int gc = 1; gc <= 4; ++gc)
            for (const bool literal : {true, false}) {
                CAPTURE(gf);
                CAPTURE(gc);
                CAPTURE(literal);
                MgConfig c = cfg;
                c.gamma_f = gf;
                c.gamma_c = gc;
                c.literal_swap = literal;
                CycleTrace trace;
                cvec u(h.op(0).size(), cplx{0.0});
                const cvec b = random_vector(u.size(), 5);
                mg_cycle(h, 0, b, u, c, &trace);

                const auto sim = simulate_cycle(4, gf, gc, literal);
                REQUIRE(trace.events.size() == sim.size());
                for (std::size_t i = 0; i < sim.size(); ++i) {
                    CHECK(trace.events[i].first == sim[i].level);
                    CHECK((trace.events[i].second == CycleTrace::Event::exact ? 'E' : 'V') ==
                          sim[i].kind);
                }
            }
}

TEST_CASE("mg_cycle: canonical cycle shapes on 4 levels") {
    using helmecs::testing::SimEvent;
    const auto levels_of = [](const std::vector<SimEvent>& v) {
        std::vector<int> out;
        for (const auto& e : v) out.push_back(e.level);
        return out;
    };
    // V cycle: [0,1,...,C,...,1,0].
    CHECK(levels_of(simulate_cycle(4, 1, 1)) == std::vector<int>{0, 1, 2, 3, 2, 1, 0});
    // Standard F cycle (collapsed diagram levels).
    CHECK(collapse_levels(levels_of(simulate_cycle(4, 1, 2))) ==
          std::vector<int>{0, 1, 2, 3, 2, 3, 2, 1, 2, 3, 2, 1, 0});
    // Standard W cycle.
    CHECK(collapse_levels(levels_of(simulate_cycle(4, 2, 2))) ==
          std::vector<int>{0, 1, 2, 3, 2, 3, 2, 1, 2, 3, 2, 3, 2, 1, 0});
    // F_1^4: first descent bounces four times, then three V recursions.
    CHECK(collapse_levels(levels_of(simulate_cycle(4, 1, 4))) ==
          std::vector<int>{0, 1, 2, 3, 2, 3, 2, 3, 2, 3, 2, 1,
                           2, 3, 2, 1, 2, 3, 2, 1, 2, 3, 2, 1, 0});
}

TEST_CASE("mg_cycle: fixed point at the exact solution") {
    const ModelProblem m = mp1_desk(8.0, 16, 4);
    MgConfig cfg;
    cfg.coarse_cap = 64;
    const Hierarchy h(qd_spec(m, cplx{-64.0, 0.0}), make_grid(m), cfg);
    const StencilOperator& a = h.op(0);

    const cvec x_true = random_vector(a.size(), 9);
    const cvec b = a.apply(x_true);
    cvec u = x_true;
    mg_cycle(h, 0, b, u, cfg);
    cvec r(b.size());
    a.residual(b, u, r);
    CHECK(norm2(r) <= 1e-12 * norm2(b));
}

TEST_CASE("coarse_solve: identity, zero, independent factorization") {
    MgConfig cfg;
    const Hierarchy id(identity_spec(4, 4), make_grid(identity_spec(4, 4).model), cfg);
    const cvec b = random_vector(9, 21);
    const cvec x = id.coarse_solve(b);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(x[i] - b[i]) < 1e-15);
    for (cplx v : id.coarse_solve(cvec(9, cplx{0.0}))) CHECK(v == cplx{0.0});

    const ModelProblem m = mp1_desk(8.0, 8, 2);
    const Hierarchy h(qd_spec(m, cplx{-64.0, 0.0}), make_grid(m), cfg);
    const StencilOperator& a = h.op(h.coarsest());
    const cvec rhs = random_vector(a.size(), 22);
    const cvec mine = h.coarse_solve(rhs);
    // Independent second factorization path.
    const Eigen::MatrixXcd dense = a.assemble_dense();
    Eigen::Map<const Eigen::VectorXcd> rv(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXcd ref = dense.fullPivLu().solve(rv);
    for (std::size_t i = 0; i < mine.size(); ++i)
        CHECK(std::abs(mine[i] - ref(static_cast<Eigen::Index>(i))) < 1e-10 * norm2(rhs));
}

TEST_CASE("standalone_solve: identity converges in one cycle") {
    const OperatorSpec spec = identity_spec(6, 6);
    const Hierarchy h(spec, make_grid(spec.model), MgConfig{});
    const cvec b = random_vector(h.op(0).size(), 31);
    const MgResult res = standalone_solve(h, b, MgConfig{});
    CHECK(res.status == MgStatus::converged);
    CHECK(res.cycles == 1);
    CHECK(res.conv_factor <= 1e-12);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(res.u[i] - b[i]) < 1e-14);
}

TEST_CASE("standalone_solve: QD desk problem converges with a healthy factor") {
    const ModelProblem m = mp1_desk(20.0, 32, 8);
    MgConfig cfg;
    cfg.smoother = SmootherKind::rb_jacobi;
    cfg.omega = 1.0;
    const OperatorSpec qd = qd_spec(m, smallest_real_eigenvalue(OperatorSpec{m}, Lambda0Method::one_d_composition));
    const Hierarchy h(qd, make_grid(m), cfg);
    const cvec b = build_rhs(m, make_grid(m));
    const MgResult res = standalone_solve(h, b, cfg);
    CHECK(res.status == MgStatus::converged);
    CHECK(res.conv_factor <= 0.25);
    MESSAGE("desk QD mg-conv: ", res.conv_factor, " cycles: ", res.cycles);
}

#include "helmecs/multigrid.hpp"

#include <cmath>
#include <stdexcept>

namespace helmecs {

Hierarchy::Hierarchy(const OperatorSpec& spec, const TensorGrid2D& fine_grid, const MgConfig& config)
    : spec_(spec) {
    ops_.push_back(discretize(spec, fine_grid));
    TensorGrid2D grid = fine_grid;
    while (grid.unknowns() > config.coarse_cap && grid.coarsenable() &&
           coarsest() < config.max_coarse_level) {
        grid = grid.coarsen();
        ops_.push_back(discretize(spec, grid));
    }
    const std::size_t dense_cap = 4096;
    if (grid.unknowns() > dense_cap)
        throw std::invalid_argument(
            "Hierarchy: cell counts stop coarsening above the dense solver cap");
    coarse_lu_.compute(ops_.back().assemble_dense(dense_cap));
    // PartialPivLU has no rank query; probe the factorization instead.
    const auto& lu = coarse_lu_.matrixLU();
    for (Eigen::Index i = 0; i < lu.rows(); ++i)
        if (std::abs(lu(i, i)) < 1e-300)
            throw std::runtime_error("Hierarchy: coarsest operator is numerically singular");
}

cvec Hierarchy::coarse_solve(const cvec& b) const {
    const auto n = static_cast<Eigen::Index>(b.size());
    Eigen::Map<const Eigen::VectorXcd> rhs(b.data(), n);
    Eigen::VectorXcd x = coarse_lu_.solve(rhs);
    return cvec(x.data(), x.data() + x.size());
}

Hierarchy build_hierarchy(const OperatorSpec& spec, const MgConfig& config) {
    return Hierarchy(spec, make_grid(spec.model), config);
}

Hierarchy build_hierarchy(const OperatorSpec& spec, const TensorGrid2D& fine_grid,
                          const MgConfig& config) {
    return Hierarchy(spec, fine_grid, config);
}

void smooth(const StencilOperator& op, cvec& u, const cvec& b, SmootherKind kind, double omega,
            int sweeps) {
    if (u.size() != op.size() || b.size() != op.size())
        throw std::invalid_argument("smooth: size mismatch");
    if (sweeps <= 0) return;
    const auto diag = op.diagonal();
    for (cplx d : diag)
        if (d == cplx{0.0}) throw std::invalid_argument("smooth: zero diagonal entry");

    const int nx = op.grid().nux();
    const int ny = op.grid().nuy();
    if (kind == SmootherKind::jacobi) {
        cvec r(u.size());
        for (int s = 0; s < sweeps; ++s) {
            op.residual(b, u, r);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += omega * r[i] / diag[i];
        }
    } else {
        // Red ((ix+iy) even) then black, residual refreshed implicitly by
        // updating in place; same-color points do not couple in a 5-point
        // stencil.
        for (int s = 0; s < sweeps; ++s) {
            for (int color = 0; color < 2; ++color) {
                for (int iy = 0; iy < ny; ++iy) {
                    for (int ix = (iy + color) % 2; ix < nx; ix += 2) {
                        const std::size_t i = op.grid().index(ix, iy);
                        u[i] += omega * (b[i] - op.row_apply(ix, iy, u)) / diag[i];
                    }
                }
            }
        }
    }
}

namespace {

void check_coarsening(const TensorGrid2D& fine, const TensorGrid2D& coarse) {
    if (coarse.gx.cells() * 2 != fine.gx.cells() || coarse.gy.cells() * 2 != fine.gy.cells())
        throw std::invalid_argument("grid transfer: coarse grid is not the coarsening of the fine grid");
}

}  // namespace

cvec restrict_fw(const cvec& fine, const TensorGrid2D& fine_grid, const TensorGrid2D& coarse_grid) {
    check_coarsening(fine_grid, coarse_grid);
    if (fine.size() != fine_grid.unknowns()) throw std::invalid_argument("restrict_fw: size mismatch");
    const int ncx = coarse_grid.nux();
    const int ncy = coarse_grid.nuy();
    const int nfx = fine_grid.nux();
    cvec coarse(coarse_grid.unknowns());
    for (int cy = 0; cy < ncy; ++cy) {
        const int fy = 2 * cy + 1;
        for (int cx = 0; cx < ncx; ++cx) {
            const int fx = 2 * cx + 1;
            const std::size_t f = fine_grid.index(fx, fy);
            // All nine fine neighbors of a coarse unknown are unknowns.
            const cplx v = 4.0 * fine[f] +
                           2.0 * (fine[f - 1] + fine[f + 1] + fine[f - nfx] + fine[f + nfx]) +
                           fine[f - nfx - 1] + fine[f - nfx + 1] + fine[f + nfx - 1] +
                           fine[f + nfx + 1];
            coarse[coarse_grid.index(cx, cy)] = v / 16.0;
        }
    }
    return coarse;
}

cvec prolong_bilinear(const cvec& coarse, const TensorGrid2D& coarse_grid,
                      const TensorGrid2D& fine_grid) {
    check_coarsening(fine_grid, coarse_grid);
    if (coarse.size() != coarse_grid.unknowns())
        throw std::invalid_argument("prolong_bilinear: size mismatch");
    const int ncx = coarse_grid.nux();
    const int ncy = coarse_grid.nuy();
    const int nfx = fine_grid.nux();
    const int nfy = fine_grid.nuy();
    const auto at = [&](int cx, int cy) -> cplx {
        if (cx < 0 || cx >= ncx || cy < 0 || cy >= ncy) return cplx{0.0};  // Dirichlet
        return coarse[coarse_grid.index(cx, cy)];
    };
    cvec fine(fine_grid.unknowns());
    for (int fy = 0; fy < nfy; ++fy) {
        const bool y_coincident = fy % 2 == 1;
        const int cy = y_coincident ? (fy - 1) / 2 : fy / 2;
        for (int fx = 0; fx < nfx; ++fx) {
            const bool x_coincident = fx % 2 == 1;
            const int cx = x_coincident ? (fx - 1) / 2 : fx / 2;
            cplx v;
            if (x_coincident && y_coincident) {
                v = at(cx, cy);
            } else if (!x_coincident && y_coincident) {
                v = 0.5 * (at(cx - 1, cy) + at(cx, cy));
            } else if (x_coincident && !y_coincident) {
                v = 0.5 * (at(cx, cy - 1) + at(cx, cy));
            } else {
                v = 0.25 * (at(cx - 1, cy - 1) + at(cx, cy - 1) + at(cx - 1, cy) + at(cx, cy));
            }
            fine[fine_grid.index(fx, fy)] = v;
        }
    }
    return fine;
}

namespace {

void cycle(const Hierarchy& h, int level, const cvec& b, cvec& u, const MgConfig& cfg, int gamma_f,
           int gamma_c, CycleTrace* trace) {
    if (level == h.coarsest()) {
        u = h.coarse_solve(b);
        if (trace) trace->events.emplace_back(level, CycleTrace::Event::exact);
        return;
    }
    const StencilOperator& a = h.op(level);
    if (trace) trace->events.emplace_back(level, CycleTrace::Event::visit);
    smooth(a, u, b, cfg.smoother, cfg.omega, cfg.nu1);

    cvec r(u.size());
    a.residual(b, u, r);
    const cvec rc = restrict_fw(r, h.grid(level), h.grid(level + 1));

    cvec ec(rc.size(), cplx{0.0});
    if (level + 1 == h.coarsest()) {
        ec = h.coarse_solve(rc);
        if (trace) trace->events.emplace_back(level + 1, CycleTrace::Event::exact);
    } else {
        for (int i = 0; i < gamma_c; ++i) {
            const bool swap = cfg.literal_swap && i > 0;
            cycle(h, level + 1, rc, ec, cfg, swap ? gamma_c : gamma_f, swap ? gamma_f : gamma_c,
                  trace);
        }
    }

    const cvec correction = prolong_bilinear(ec, h.grid(level + 1), h.grid(level));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += correction[i];
    if (trace) trace->events.emplace_back(level, CycleTrace::Event::visit);
    smooth(a, u, b, cfg.smoother, cfg.omega, cfg.nu2);
}

}  // namespace

void mg_cycle(const Hierarchy& h, int level, const cvec& b, cvec& u, const MgConfig& config,
              CycleTrace* trace) {
    if (level < 0 || level > h.coarsest()) throw std::invalid_argument("mg_cycle: level out of range");
    if (b.size() != h.op(level).size() || u.size() != b.size())
        throw std::invalid_argument("mg_cycle: size mismatch");
    cycle(h, level, b, u, config, config.gamma_f, config.gamma_c, trace);
}

MgResult standalone_solve(const Hierarchy& h, const cvec& b, const MgConfig& config) {
    MgResult res;
    res.u.assign(b.size(), cplx{0.0});
    res.residuals.push_back(1.0);
    const double b_norm = norm2(b);
    if (b_norm == 0.0) return res;

    cvec r(b.size());
    int growth_streak = 0;
    while (res.cycles < config.max_cycles) {
        mg_cycle(h, 0, b, res.u, config);
        ++res.cycles;
        h.op(0).residual(b, res.u, r);
        const double rel = norm2(r) / b_norm;
        growth_streak = rel > res.residuals.back() ? growth_streak + 1 : 0;
        res.residuals.push_back(rel);
        if (rel <= config.tol) {
            res.status = MgStatus::converged;
            break;
        }
        if (growth_streak >= 3) {
            res.status = MgStatus::diverged;
            break;
        }
        res.status = MgStatus::max_cycles;
    }

    const int window = std::min(5, res.cycles);
    if (window > 0) {
        const double tail = res.residuals[res.residuals.size() - 1];
        const double head = res.residuals[res.residuals.size() - 1 - window];
        res.conv_factor = head > 0.0 ? std::pow(tail / head, 1.0 / window) : 0.0;
    }
    return res;
}

}  // namespace helmecs

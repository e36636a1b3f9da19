#include "helmecs/stencil.hpp"

#include <cmath>
#include <stdexcept>

namespace helmecs {

cplx ModelProblem::k2_at(cplx zx, cplx zy) const {
    const cplx k2{k * k};
    switch (kind) {
        case ModelKind::mp1:
        case ModelKind::custom:
            return k2;
        case ModelKind::mp2:
            return k2 + nu * (std::exp(-zx * zx) + std::exp(-zy * zy));
        case ModelKind::mp3:
            return k2 + 1.0 / zx + 1.0 / zy;
    }
    return k2;
}

static AxisSpec axis(int n, int m_lo, int m_hi, double a, double w, double theta) {
    return AxisSpec{n, m_lo, m_hi, a, w, theta};
}

ModelProblem make_mp1(double k, int interior_cells, int layer_cells, double domain,
                      double layer_width, double theta) {
    // Layer width defaults to layer_cells * h so the layer mesh matches the
    // interior spacing (gamma = e^{i theta}).
    if (layer_width <= 0.0) layer_width = layer_cells * (domain / interior_cells);
    ModelProblem m;
    m.kind = ModelKind::mp1;
    m.k = k;
    m.rhs = RhsKind::centered_delta;
    m.x = axis(interior_cells, layer_cells, layer_cells, domain, layer_width, theta);
    m.y = m.x;
    return m;
}

ModelProblem make_mp2(double k, double nu, int interior_cells, int layer_cells, double domain,
                      double theta) {
    ModelProblem m;
    m.kind = ModelKind::mp2;
    m.k = k;
    m.nu = nu;
    m.rhs = RhsKind::gaussian;
    const double w = layer_cells * (domain / interior_cells);
    m.x = axis(interior_cells, 0, layer_cells, domain, w, theta);
    m.y = m.x;
    return m;
}

ModelProblem make_mp3(double k, int interior_cells, int layer_cells, double domain, double theta) {
    ModelProblem m = make_mp2(k, 0.0, interior_cells, layer_cells, domain, theta);
    m.kind = ModelKind::mp3;
    return m;
}

TensorGrid2D make_grid(const ModelProblem& model) {
    return TensorGrid2D{
        build_grid(model.x.n, model.x.m_lo, model.x.m_hi, model.x.a, model.x.w, model.x.theta),
        build_grid(model.y.n, model.y.m_lo, model.y.m_hi, model.y.a, model.y.w, model.y.theta)};
}

std::array<cplx, 3> second_derivative_stencil(cplx h_left, cplx h_right) {
    if (h_left == cplx{0.0} || h_right == cplx{0.0})
        throw std::invalid_argument("second_derivative_stencil: zero mesh width");
    const cplx f = 2.0 / (h_left + h_right);
    return {f / h_left, -f * (1.0 / h_left + 1.0 / h_right), f / h_right};
}

StencilOperator::StencilOperator(TensorGrid2D grid, cvec center, cvec west, cvec east, cvec south,
                                 cvec north)
    : grid_(std::move(grid)),
      center_(std::move(center)),
      west_(std::move(west)),
      east_(std::move(east)),
      south_(std::move(south)),
      north_(std::move(north)) {}

void StencilOperator::apply(std::span<const cplx> u, std::span<cplx> v) const {
    if (u.size() != size() || v.size() != size())
        throw std::invalid_argument("StencilOperator::apply: size mismatch");
    const int nx = grid_.nux();
    const int ny = grid_.nuy();
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = grid_.index(ix, iy);
            cplx acc = center_[i] * u[i];
            if (ix > 0) acc += west_[i] * u[i - 1];
            if (ix + 1 < nx) acc += east_[i] * u[i + 1];
            if (iy > 0) acc += south_[i] * u[i - nx];
            if (iy + 1 < ny) acc += north_[i] * u[i + nx];
            v[i] = acc;
        }
    }
}

cvec StencilOperator::apply(const cvec& u) const {
    cvec v(u.size());
    apply(std::span<const cplx>(u), std::span<cplx>(v));
    return v;
}

void StencilOperator::residual(std::span<const cplx> b, std::span<const cplx> u,
                               std::span<cplx> r) const {
    apply(u, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

cplx StencilOperator::row_apply(int ix, int iy, std::span<const cplx> u) const {
    const int nx = grid_.nux();
    const int ny = grid_.nuy();
    const std::size_t i = grid_.index(ix, iy);
    cplx acc = center_[i] * u[i];
    if (ix > 0) acc += west_[i] * u[i - 1];
    if (ix + 1 < nx) acc += east_[i] * u[i + 1];
    if (iy > 0) acc += south_[i] * u[i - nx];
    if (iy + 1 < ny) acc += north_[i] * u[i + nx];
    return acc;
}

Eigen::MatrixXcd StencilOperator::assemble_dense(std::size_t cap) const {
    if (size() > cap) throw std::invalid_argument("StencilOperator::assemble_dense: unknown count exceeds cap");
    const int nx = grid_.nux();
    const int ny = grid_.nuy();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(size(), size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const auto i = static_cast<Eigen::Index>(grid_.index(ix, iy));
            A(i, i) = center_[i];
            if (ix > 0) A(i, i - 1) = west_[i];
            if (ix + 1 < nx) A(i, i + 1) = east_[i];
            if (iy > 0) A(i, i - nx) = south_[i];
            if (iy + 1 < ny) A(i, i + nx) = north_[i];
        }
    }
    return A;
}

StencilOperator discretize(const OperatorSpec& spec, const TensorGrid2D& grid) {
    if (spec.mesh_scale == cplx{0.0}) throw std::invalid_argument("discretize: mesh_scale must be nonzero");
    const ModelProblem& model = spec.model;
    const bool needs_coordinates =
        model.kind == ModelKind::mp2 || model.kind == ModelKind::mp3 || model.l1 > 0 || model.l2 > 0;

    const int nx = grid.nux();
    const int ny = grid.nuy();
    const std::size_t nu = grid.unknowns();
    cvec center(nu), west(nu), east(nu), south(nu), north(nu);

    // Per-axis second-derivative rows on the scaled mesh widths.
    const auto axis_rows = [&](const EcsGrid1D& g) {
        std::vector<std::array<cplx, 3>> rows(g.interior());
        for (int i = 0; i < g.interior(); ++i) {
            const cplx hl = spec.mesh_scale * g.mesh_width(i);
            const cplx hr = spec.mesh_scale * g.mesh_width(i + 1);
            rows[i] = second_derivative_stencil(hl, hr);
        }
        return rows;
    };
    const auto rows_x = axis_rows(grid.gx);
    const auto rows_y = axis_rows(grid.gy);

    for (int iy = 0; iy < ny; ++iy) {
        const cplx zy = spec.mesh_scale * grid.coord_y(iy);
        for (int ix = 0; ix < nx; ++ix) {
            const cplx zx = spec.mesh_scale * grid.coord_x(ix);
            const std::size_t i = grid.index(ix, iy);

            cplx diag = -(rows_x[ix][1] + rows_y[iy][1]);  // -d_xx - d_yy
            if (needs_coordinates) {
                if ((model.kind == ModelKind::mp3 || model.l1 > 0) && zx == cplx{0.0})
                    throw std::invalid_argument("discretize: unknown at x = 0 with a singular term");
                if ((model.kind == ModelKind::mp3 || model.l2 > 0) && zy == cplx{0.0})
                    throw std::invalid_argument("discretize: unknown at y = 0 with a singular term");
            }
            if (model.l1 > 0) diag += static_cast<double>(model.l1) * (model.l1 + 1) / (zx * zx);
            if (model.l2 > 0) diag += static_cast<double>(model.l2) * (model.l2 + 1) / (zy * zy);
            diag -= spec.k2_scale * model.k2_at(zx, zy);

            center[i] = spec.zz_scale * diag + spec.shift;
            west[i] = ix > 0 ? -spec.zz_scale * rows_x[ix][0] : cplx{0.0};
            east[i] = ix + 1 < nx ? -spec.zz_scale * rows_x[ix][2] : cplx{0.0};
            south[i] = iy > 0 ? -spec.zz_scale * rows_y[iy][0] : cplx{0.0};
            north[i] = iy + 1 < ny ? -spec.zz_scale * rows_y[iy][2] : cplx{0.0};
        }
    }
    return StencilOperator(grid, std::move(center), std::move(west), std::move(east),
                           std::move(south), std::move(north));
}

StencilOperator discretize(const OperatorSpec& spec) { return discretize(spec, make_grid(spec.model)); }

cvec build_rhs(const ModelProblem& model, const TensorGrid2D& grid) {
    cvec f(grid.unknowns(), cplx{0.0});
    if (model.rhs == RhsKind::centered_delta) {
        // Unit source at the unknown nearest the real-domain center.
        const auto nearest = [](const EcsGrid1D& g) {
            const double c = g.a / 2.0;
            int best = 1;
            double best_d = std::abs(g.nodes[1] - c);
            for (int j = 2; j < g.cells(); ++j) {
                const double d = std::abs(g.nodes[j] - c);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            return best - 1;  // unknown index
        };
        f[grid.index(nearest(grid.gx), nearest(grid.gy))] = cplx{1.0};
    } else if (model.rhs == RhsKind::gaussian) {
        // Gaussian evaluated at the real parts of the node coordinates,
        // zero on layer nodes.
        for (int iy = 0; iy < grid.nuy(); ++iy) {
            if (!grid.gy.is_real_node(iy + 1)) continue;
            const double y = grid.coord_y(iy).real();
            for (int ix = 0; ix < grid.nux(); ++ix) {
                if (!grid.gx.is_real_node(ix + 1)) continue;
                const double x = grid.coord_x(ix).real();
                f[grid.index(ix, iy)] = std::exp(model.rhs_sign * (x * x + y * y));
            }
        }
    }
    return f;
}

}  // namespace helmecs

#pragma once

#include <Eigen/Core>
#include <array>
#include <span>

#include "helmecs/model.hpp"

namespace helmecs {

/// Three-point second-derivative coefficients (left, center, right) for
/// unequal mesh widths h_left, h_right around the center node.
std::array<cplx, 3> second_derivative_stencil(cplx h_left, cplx h_right);

/**
 * Discretization recipe: the operator assembled is
 *
 *   zz_scale * ( -d_xx - d_yy + l1(l1+1)/x^2 + l2(l2+1)/y^2
 *                - k2_scale * k2(x,y) ) + shift * I
 *
 * on the tensor grid with every mesh width and node coordinate multiplied
 * by mesh_scale. mesh_scale = e^{i theta_a} realizes the rotated-grid
 * discretization; k2_scale = -(beta1 + i beta2) realizes the shifted
 * Laplacian; zz_scale/shift realize scaled-and-shifted variants.
 */
struct OperatorSpec {
    ModelProblem model;
    cplx mesh_scale{1.0};
    cplx zz_scale{1.0};
    cplx shift{0.0};
    cplx k2_scale{1.0};
};

/**
 * Complex 5-point stencil operator over a tensor ECS grid. Coefficients are
 * stored per unknown; neighbors across the Dirichlet boundary are omitted
 * (stored as zero). Immutable after construction; apply() is pure and safe
 * to call concurrently.
 */
class StencilOperator {
public:
    StencilOperator() = default;
    StencilOperator(TensorGrid2D grid, cvec center, cvec west, cvec east, cvec south, cvec north);

    const TensorGrid2D& grid() const { return grid_; }
    std::size_t size() const { return center_.size(); }

    /// Matrix-free action v = A u.
    void apply(std::span<const cplx> u, std::span<cplx> v) const;
    cvec apply(const cvec& u) const;

    /// r = b - A u.
    void residual(std::span<const cplx> b, std::span<const cplx> u, std::span<cplx> r) const;

    /// Stencil row applied at one unknown.
    cplx row_apply(int ix, int iy, std::span<const cplx> u) const;

    std::span<const cplx> diagonal() const { return center_; }
    cplx center(std::size_t i) const { return center_[i]; }
    cplx west(std::size_t i) const { return west_[i]; }
    cplx east(std::size_t i) const { return east_[i]; }
    cplx south(std::size_t i) const { return south_[i]; }
    cplx north(std::size_t i) const { return north_[i]; }

    /// Dense matrix with the same action as apply(). Test oracle and
    /// coarsest-level solver input; refuses unknown counts above cap.
    Eigen::MatrixXcd assemble_dense(std::size_t cap = 4096) const;

private:
    TensorGrid2D grid_;
    cvec center_, west_, east_, south_, north_;
};

/// Discretize the operator described by spec on the given tensor grid.
StencilOperator discretize(const OperatorSpec& spec, const TensorGrid2D& grid);

/// Discretize on the grid implied by spec.model.
StencilOperator discretize(const OperatorSpec& spec);

/// Right-hand side vector for the model on the grid.
cvec build_rhs(const ModelProblem& model, const TensorGrid2D& grid);

}  // namespace helmecs

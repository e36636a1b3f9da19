#pragma once

#include <optional>

#include "helmecs/spectral.hpp"
#include "helmecs/stencil.hpp"

namespace helmecs {

enum class PreconditionerKind { none, laplacian, csl, csg, qd };

/**
 * Preconditioning operator selection:
 *   laplacian  -Delta with wavenumber and potentials dropped
 *   csl        -Delta + (beta1 + i beta2) k2(x,y), same grid as the target
 *   csg        the full operator discretized on the grid rotated by theta_a
 *   qd         (1 - i) I + Z / |Re(lambda0)|
 * For qd, lambda0 is resolved from the config value when present, otherwise
 * estimated via smallest_real_eigenvalue with the given method.
 */
struct PreconditionerSpec {
    PreconditionerKind kind = PreconditionerKind::none;
    double beta1 = -1.0;          // csl
    double beta2 = -0.3;          // csl
    double theta_alpha = 0.0;     // csg
    std::optional<cplx> lambda0;  // qd; empty = auto
    Lambda0Method lambda0_method = Lambda0Method::dense_2d;
    bool qd_use_modulus = false;  // |lambda0| instead of |Re lambda0| in the scale

    bool operator==(const PreconditionerSpec&) const = default;
};

/// OperatorSpec realizing the preconditioner for the given model. lambda0
/// must already be resolved for qd (see resolve_lambda0).
OperatorSpec preconditioner_spec(const ModelProblem& model, const PreconditionerSpec& spec);

/// Resolved lambda0 for a qd spec (config value or spectral estimate).
cplx resolve_lambda0(const ModelProblem& model, const PreconditionerSpec& spec);

/// Discretized preconditioning operator on the same grid as the target.
StencilOperator build_preconditioner(const ModelProblem& model, const TensorGrid2D& grid,
                                     const PreconditionerSpec& spec);

/// delta of the scaled-and-shifted form matching the qd operator:
/// delta^2 = 1/|Re lambda0|. Used for reporting the enclosing circle.
double qd_delta(cplx lambda0);

}  // namespace helmecs

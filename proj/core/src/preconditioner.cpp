#include "helmecs/preconditioner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helmecs {

cplx resolve_lambda0(const ModelProblem& model, const PreconditionerSpec& spec) {
    if (spec.lambda0) return *spec.lambda0;
    OperatorSpec target;
    target.model = model;
    return smallest_real_eigenvalue(target, spec.lambda0_method);
}

OperatorSpec preconditioner_spec(const ModelProblem& model, const PreconditionerSpec& spec) {
    OperatorSpec op;
    op.model = model;
    switch (spec.kind) {
        case PreconditionerKind::none:
            break;
        case PreconditionerKind::laplacian:
            op.k2_scale = cplx{0.0};
            break;
        case PreconditionerKind::csl:
            // -Delta + (beta1 + i beta2) k2(x,y); (-1, 0) degenerates to the
            // target operator itself.
            op.k2_scale = -cplx{spec.beta1, spec.beta2};
            break;
        case PreconditionerKind::csg:
            if (spec.theta_alpha <= 0.0 || spec.theta_alpha >= std::numbers::pi / 2.0)
                throw std::invalid_argument("csg: theta_alpha must lie in (0, pi/2)");
            op.mesh_scale = std::polar(1.0, spec.theta_alpha);
            break;
        case PreconditionerKind::qd: {
            const cplx lambda0 = resolve_lambda0(model, spec);
            const double scale = spec.qd_use_modulus ? std::abs(lambda0) : std::abs(lambda0.real());
            if (scale == 0.0) throw std::invalid_argument("qd: lambda0 has zero magnitude");
            op.zz_scale = cplx{1.0 / scale};
            op.shift = cplx{1.0, -1.0};
            break;
        }
    }
    return op;
}

StencilOperator build_preconditioner(const ModelProblem& model, const TensorGrid2D& grid,
                                     const PreconditionerSpec& spec) {
    return discretize(preconditioner_spec(model, spec), grid);
}

double qd_delta(cplx lambda0) {
    const double re = std::abs(lambda0.real());
    if (re == 0.0) throw std::invalid_argument("qd_delta: Re(lambda0) must be nonzero");
    return 1.0 / std::sqrt(re);
}

}  // namespace helmecs

#pragma once

#include <Eigen/Core>
#include <vector>

#include "helmecs/stencil.hpp"
#include "helmecs/types.hpp"

namespace helmecs {

/// Parameters of the 1D two-segment grid behind the eigenvalue
/// characteristic: n real cells of width h followed by m layer cells of
/// width gamma*h.
struct PitchforkParams {
    int n = 0;
    int m = 0;
    double h = 0.0;
    cplx gamma{1.0};
};

struct CharacteristicValue {
    cplx value;
    bool pole = false;  // tan pole or arccos branch point nearby
};

/// F(lambda) = tan(2n p)/tan(2m q) + cos(p)/cos(q) with
/// p = arccos(1 - lambda h^2 / 2)/2 and q = arccos(1 - lambda gamma^2 h^2 / 2)/2.
/// Near lambda = 0 the analytically continued limit n/(m gamma) + 1 is
/// returned. Pole or branch-point proximity is signaled, not thrown.
CharacteristicValue characteristic_F(cplx lambda, const PitchforkParams& p);

/// Pole-free form G = sin(2np) cos(2mq) cos(q) + sin(2mq) cos(2np) cos(p),
/// whose zero set contains the zeros of F without the tan poles.
cplx pole_free_G(cplx lambda, const PitchforkParams& p);

/// |G| normalized by the magnitude of its two terms, so a converged root
/// reads as ~machine epsilon on every branch.
double pole_free_residual(cplx lambda, const PitchforkParams& p);

enum class SpectralBranch { real_branch, contour, tail };

struct LabeledEigenvalue {
    cplx lambda;
    SpectralBranch branch = SpectralBranch::real_branch;
    double residual = 0.0;  // |F| at the root (guarded near indeterminate points)
};

struct SpectrumReport {
    std::vector<LabeledEigenvalue> eigenvalues;
    int failed_seeds = 0;
};

/// Newton search for `count` roots of the pole-free characteristic,
/// seeded along the real, contour and tail branches. Roots are deduplicated
/// to 1e-8 relative spacing and sorted by real then imaginary part.
SpectrumReport find_pitchfork(const PitchforkParams& p, int count);

/// Tridiagonal -d^2/dz^2 on the two-segment grid of `p`, (n+m-1) unknowns.
Eigen::MatrixXcd pitchfork_dense_matrix(const PitchforkParams& p);

/// All eigenvalues of a general complex matrix (dimension <= cap).
cvec dense_eigenvalues(const Eigen::MatrixXcd& a, std::size_t cap = 4096);

enum class Lambda0Method { dense_2d, one_d_composition, config };

/// Estimate the eigenvalue of the operator with the smallest real part.
/// dense_2d coarsens the grid until the dense cap admits it and solves the
/// 2D eigenproblem; one_d_composition sums the per-axis minima and subtracts
/// the constant k^2 cross term; config passes a user-supplied value through.
cplx smallest_real_eigenvalue(const OperatorSpec& spec, Lambda0Method method,
                              cplx config_value = cplx{0.0}, std::size_t dense_cap = 4096);

struct SpectralCircle {
    cplx center;
    double radius = 0.0;
};

/// Circle enclosing the preconditioned spectrum: center
/// (1/delta^2)(1/2 - i/(2 k delta)), radius |center|.
SpectralCircle enclosing_circle(double k, double delta);

}  // namespace helmecs

#include "helmecs/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace helmecs {

namespace {

struct TrigTerms {
    cplx p, q;
    cplx sin_np, cos_np;  // sin/cos of 2n p
    cplx sin_mq, cos_mq;  // sin/cos of 2m q
    cplx cos_p, cos_q;
};

TrigTerms trig_terms(cplx lambda, const PitchforkParams& par) {
    TrigTerms t;
    const double h2 = par.h * par.h;
    t.p = 0.5 * std::acos(cplx{1.0} - 0.5 * lambda * h2);
    t.q = 0.5 * std::acos(cplx{1.0} - 0.5 * lambda * par.gamma * par.gamma * h2);
    t.sin_np = std::sin(2.0 * static_cast<double>(par.n) * t.p);
    t.cos_np = std::cos(2.0 * static_cast<double>(par.n) * t.p);
    t.sin_mq = std::sin(2.0 * static_cast<double>(par.m) * t.q);
    t.cos_mq = std::cos(2.0 * static_cast<double>(par.m) * t.q);
    t.cos_p = std::cos(t.p);
    t.cos_q = std::cos(t.q);
    return t;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CharacteristicValue characteristic_F(cplx lambda, const PitchforkParams& par) {
    if (par.n < 1 || par.m < 1 || par.h <= 0.0 || par.gamma == cplx{0.0})
        throw std::invalid_argument("characteristic_F: invalid parameters");

    const double h2 = par.h * par.h;
    if (std::abs(lambda) * h2 < 1e-12) {
        // Analytic continuation through the lambda = 0 branch point.
        return {static_cast<double>(par.n) / (static_cast<double>(par.m) * par.gamma) + 1.0, false};
    }

    const TrigTerms t = trig_terms(lambda, par);
    CharacteristicValue out;
    const cplx tan_np = t.sin_np / t.cos_np;
    const cplx tan_mq = t.sin_mq / t.cos_mq;
    out.value = tan_np / tan_mq + t.cos_p / t.cos_q;
    // Flag tan poles/zero-crossings of the denominators and arccos branch
    // points, where the printed form is indeterminate.
    const double eps = 1e-10;
    if (std::abs(tan_mq) < eps || std::abs(t.cos_q) < eps || std::abs(t.cos_np) < eps ||
        std::abs(t.cos_mq) < eps || !finite(out.value))
        out.pole = true;
    const cplx bp1 = cplx{1.0} - 0.5 * lambda * h2;                          // p branch: +-1
    const cplx bq1 = cplx{1.0} - 0.5 * lambda * par.gamma * par.gamma * h2;  // q branch: +-1
    if (std::min({std::abs(bp1 - 1.0), std::abs(bp1 + 1.0), std::abs(bq1 - 1.0), std::abs(bq1 + 1.0)}) <
        1e-12)
        out.pole = true;
    return out;
}

cplx pole_free_G(cplx lambda, const PitchforkParams& par) {
    const TrigTerms t = trig_terms(lambda, par);
    return t.sin_np * t.cos_mq * t.cos_q + t.sin_mq * t.cos_np * t.cos_p;
}

double pole_free_residual(cplx lambda, const PitchforkParams& par) {
    // |G| against its local magnitude a relative step away, so a converged
    // root reads as ~eps whether or not the two terms vanish individually.
    const double g0 = std::abs(pole_free_G(lambda, par));
    const double delta = 1e-3 * (std::abs(lambda) + 1e-6 / (par.h * par.h));
    const double scale =
        std::max({std::abs(pole_free_G(lambda + delta, par)),
                  std::abs(pole_free_G(lambda - delta, par)),
                  std::abs(pole_free_G(lambda + cplx{0.0, delta}, par))}) +
        std::numeric_limits<double>::min();
    return g0 / scale;
}

Eigen::MatrixXcd pitchfork_dense_matrix(const PitchforkParams& par) {
    if (par.n < 1 || par.m < 1) throw std::invalid_argument("pitchfork_dense_matrix: n, m must be >= 1");
    const int unknowns = par.n + par.m - 1;
    const auto width = [&](int cell) { return cell < par.n ? cplx{par.h} : par.gamma * par.h; };
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(unknowns, unknowns);
    for (int i = 0; i < unknowns; ++i) {
        const auto row = second_derivative_stencil(width(i), width(i + 1));
        if (i > 0) a(i, i - 1) = -row[0];
        a(i, i) = -row[1];
        if (i + 1 < unknowns) a(i, i + 1) = -row[2];
    }
    return a;
}

cvec dense_eigenvalues(const Eigen::MatrixXcd& a, std::size_t cap) {
    if (a.rows() != a.cols()) throw std::invalid_argument("dense_eigenvalues: matrix must be square");
    if (static_cast<std::size_t>(a.rows()) > cap)
        throw std::invalid_argument("dense_eigenvalues: dimension exceeds cap");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense_eigenvalues: eigenvalue iteration failed");
    const auto& ev = solver.eigenvalues();
    return cvec(ev.data(), ev.data() + ev.size());
}

namespace {

double segment_distance(cplx z, cplx endpoint) {
    // Distance from z to the segment [0, endpoint].
    const double len2 = std::norm(endpoint);
    if (len2 == 0.0) return std::abs(z);
    double t = (z * std::conj(endpoint)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - t * endpoint);
}

struct BranchGeometry {
    cplx e_real, e_contour, e_tail;
};

BranchGeometry branch_geometry(const PitchforkParams& par) {
    BranchGeometry b;
    const double h2 = par.h * par.h;
    b.e_real = cplx{4.0 / h2};
    b.e_contour = 4.0 / (par.gamma * par.gamma * h2);
    const cplx r_z = static_cast<double>(par.n) * par.h + static_cast<double>(par.m) * par.gamma * par.h;
    const cplx h_alpha = r_z / static_cast<double>(par.n + par.m + 1);
    b.e_tail = 4.0 / (h_alpha * h_alpha);
    return b;
}

// Newton iteration on pole_free_G with a central-difference derivative.
// Convergence is declared on a 1e-12 relative step; two polish steps follow,
// and the caller re-checks the residual before accepting the root.
bool newton_step(const PitchforkParams& par, double scale, cplx& lam, cplx& delta) {
    const cplx g = pole_free_G(lam, par);
    const double step = 1e-7 * (std::abs(lam) + 1e-3 * scale);
    const cplx gp = (pole_free_G(lam + step, par) - pole_free_G(lam - step, par)) / (2.0 * step);
    if (!finite(g) || !finite(gp) || gp == cplx{0.0}) return false;
    delta = g / gp;
    lam -= delta;
    return true;
}

bool newton_root(const PitchforkParams& par, cplx seed, double scale, cplx& root) {
    cplx lam = seed;
    cplx delta;
    for (int it = 0; it < 80; ++it) {
        if (!finite(lam) || std::abs(lam) > 1e3 * scale) return false;
        if (!newton_step(par, scale, lam, delta)) return false;
        if (std::abs(delta) <= 1e-12 * (std::abs(lam) + 1e-6 * scale)) {
            for (int polish = 0; polish < 2; ++polish) {
                cplx next = lam, d;
                if (!newton_step(par, scale, next, d) || !finite(next)) break;
                lam = next;
            }
            root = lam;
            return true;
        }
    }
    return false;
}

}  // namespace

SpectrumReport find_pitchfork(const PitchforkParams& par, int count) {
    if (count < 1 || count > par.n + par.m - 1)
        throw std::invalid_argument("find_pitchfork: count must be in [1, n+m-1]");

    const BranchGeometry geo = branch_geometry(par);
    const double scale =
        std::max({std::abs(geo.e_real), std::abs(geo.e_contour), std::abs(geo.e_tail)});

    SpectrumReport report;
    std::vector<cplx> roots;
    const auto accept = [&](cplx lam) {
        if (std::abs(lam) <= 1e-8 * std::abs(geo.e_real)) return;  // lambda = 0 branch point
        if (std::abs(lam - geo.e_real) <= 1e-7 * std::abs(geo.e_real)) return;  // band edges
        if (std::abs(lam - geo.e_contour) <= 1e-7 * std::abs(geo.e_contour)) return;
        // The spectrum lies in the closed lower half-plane; G also vanishes
        // at mirror points above the real axis, which are not eigenvalues.
        if (lam.imag() > 1e-10) return;
        if (pole_free_residual(lam, par) > 1e-10) return;
        // Reject residual tan poles: F stays large at nearby regular points.
        const auto f1 = characteristic_F(lam * (1.0 + 1e-6) + cplx{0.0, 1e-9 * scale}, par);
        const auto f2 = characteristic_F(lam * (1.0 - 1e-6) - cplx{0.0, 1e-9 * scale}, par);
        const double fmin = std::min(finite(f1.value) ? std::abs(f1.value) : 1e300,
                                     finite(f2.value) ? std::abs(f2.value) : 1e300);
        if (fmin >= 10.0) return;
        for (cplx r : roots)
            if (std::abs(lam - r) <= 1e-8 * std::max(std::abs(lam), std::abs(r))) return;
        roots.push_back(lam);
    };

    const auto sweep = [&](cplx endpoint, int seeds) {
        for (int j = 0; j < seeds; ++j) {
            const double t = (j + 0.5) / seeds;
            cplx root;
            if (newton_root(par, t * endpoint, scale, root))
                accept(root);
            else
                ++report.failed_seeds;
        }
    };

    int density = 4;
    for (int pass = 0; pass < 3 && static_cast<int>(roots.size()) < count; ++pass) {
        sweep(geo.e_real, density * par.n);
        sweep(geo.e_contour, density * par.m);
        sweep(geo.e_tail, density * (par.n + par.m) / 2 + 2);
        density *= 3;
    }

    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    if (static_cast<int>(roots.size()) > count) {
        // Keep the `count` roots hugging the pitchfork branches most closely,
        // restoring the deterministic order afterwards.
        const auto branch_dist = [&](cplx z) {
            return std::min({segment_distance(z, geo.e_real) / std::abs(geo.e_real),
                             segment_distance(z, geo.e_contour) / std::abs(geo.e_contour),
                             segment_distance(z, geo.e_tail) / std::abs(geo.e_tail)});
        };
        std::sort(roots.begin(), roots.end(),
                  [&](cplx a, cplx b) { return branch_dist(a) < branch_dist(b); });
        roots.resize(count);
        std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
    }

    for (cplx lam : roots) {
        LabeledEigenvalue e;
        e.lambda = lam;
        const double d_real = segment_distance(lam, geo.e_real);
        const double d_cont = segment_distance(lam, geo.e_contour);
        const double d_tail = segment_distance(lam, geo.e_tail);
        e.branch = SpectralBranch::real_branch;
        if (d_cont < d_real && d_cont <= d_tail) e.branch = SpectralBranch::contour;
        if (d_tail < d_real && d_tail < d_cont) e.branch = SpectralBranch::tail;
        const auto f = characteristic_F(lam, par);
        e.residual = finite(f.value) && !f.pole ? std::abs(f.value) : pole_free_residual(lam, par);
        report.eigenvalues.push_back(e);
    }
    return report;
}

namespace {

// 1D factor operator of the separable part: -d^2/dz^2 + l(l+1)/z^2 minus the
// axis share of k2(x,y), on mesh widths and coordinates scaled by mesh_scale.
Eigen::MatrixXcd axis_operator(const OperatorSpec& spec, const EcsGrid1D& g, int l) {
    const int unknowns = g.interior();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(unknowns, unknowns);
    const ModelProblem& model = spec.model;
    for (int i = 0; i < unknowns; ++i) {
        const cplx hl = spec.mesh_scale * g.mesh_width(i);
        const cplx hr = spec.mesh_scale * g.mesh_width(i + 1);
        const auto row = second_derivative_stencil(hl, hr);
        if (i > 0) a(i, i - 1) = -spec.zz_scale * row[0];
        a(i, i) = -spec.zz_scale * row[1];
        if (i + 1 < unknowns) a(i, i + 1) = -spec.zz_scale * row[2];

        const cplx z = spec.mesh_scale * g.nodes[i + 1];
        cplx pot{0.0};
        if (l > 0) pot += static_cast<double>(l) * (l + 1) / (z * z);
        if (model.kind == ModelKind::mp2) pot -= spec.k2_scale * model.nu * std::exp(-z * z);
        if (model.kind == ModelKind::mp3) pot -= spec.k2_scale / z;
        a(i, i) += spec.zz_scale * pot;
    }
    return a;
}

cplx min_real_part(const cvec& values) {
    cplx best = values.front();
    for (cplx v : values)
        if (v.real() < best.real()) best = v;
    return best;
}

}  // namespace

cplx smallest_real_eigenvalue(const OperatorSpec& spec, Lambda0Method method, cplx config_value,
                              std::size_t dense_cap) {
    switch (method) {
        case Lambda0Method::config:
            return config_value;
        case Lambda0Method::dense_2d: {
            TensorGrid2D grid = make_grid(spec.model);
            while (grid.unknowns() > dense_cap && grid.coarsenable()) grid = grid.coarsen();
            if (grid.unknowns() > dense_cap)
                throw std::invalid_argument("smallest_real_eigenvalue: grid does not coarsen below the dense cap");
            const auto eigs = dense_eigenvalues(discretize(spec, grid).assemble_dense(dense_cap), dense_cap);
            return min_real_part(eigs);
        }
        case Lambda0Method::one_d_composition: {
            const TensorGrid2D grid = make_grid(spec.model);
            const cplx min_x =
                min_real_part(dense_eigenvalues(axis_operator(spec, grid.gx, spec.model.l1), dense_cap));
            const cplx min_y =
                min_real_part(dense_eigenvalues(axis_operator(spec, grid.gy, spec.model.l2), dense_cap));
            const cplx cross = spec.k2_scale * spec.model.k * spec.model.k;
            return min_x + min_y - spec.zz_scale * cross + spec.shift;
        }
    }
    throw std::logic_error("smallest_real_eigenvalue: unknown method");
}

SpectralCircle enclosing_circle(double k, double delta) {
    if (k <= 0.0 || delta <= 0.0) throw std::invalid_argument("enclosing_circle: k and delta must be positive");
    const cplx center = (1.0 / (delta * delta)) * cplx{0.5, -0.5 / (k * delta)};
    return {center, std::abs(center)};
}

}  // namespace helmecs

#include "helmecs/bicgstab.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace helmecs {

int SolveReport::iterations_to(double tol) const {
    for (std::size_t i = 0; i < residual_history.size(); ++i)
        if (residual_history[i] <= tol) return static_cast<int>(i);
    return -1;
}

LinearOp mg_preconditioner(const Hierarchy& h, const MgConfig& config) {
    return [&h, config](std::span<const cplx> in, std::span<cplx> out) {
        cvec rhs(in.begin(), in.end());
        cvec u(in.size(), cplx{0.0});
        mg_cycle(h, 0, rhs, u, config);
        std::copy(u.begin(), u.end(), out.begin());
    };
}

LinearOp operator_action(const StencilOperator& op) {
    return [&op](std::span<const cplx> in, std::span<cplx> out) { op.apply(in, out); };
}

cvec warm_start_guess(const Hierarchy& preconditioner, const cvec& b, double inner_tol,
                      const MgConfig& mg, int& cycles_used) {
    cycles_used = 0;
    if (norm2(b) == 0.0) return cvec(b.size(), cplx{0.0});
    MgConfig cfg = mg;
    cfg.tol = inner_tol;
    MgResult res = standalone_solve(preconditioner, b, cfg);
    if (res.status == MgStatus::diverged)
        throw std::runtime_error("warm_start_guess: multigrid diverged on the preconditioner system");
    cycles_used = res.cycles;
    return std::move(res.u);
}

std::pair<cvec, SolveReport> bicgstab(const LinearOp& a, const LinearOp& m_inv, const cvec& b,
                                      const cvec& x0, const KrylovConfig& config) {
    if (b.size() != x0.size()) throw std::invalid_argument("bicgstab: rhs/guess size mismatch");
    const std::size_t n = b.size();
    const auto t_start = std::chrono::steady_clock::now();

    SolveReport report;
    cvec x = x0;
    cvec r(n), v(n, cplx{0.0}), p(n, cplx{0.0});
    cvec p_hat(n), s(n), s_hat(n), t(n), true_r(n);

    a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const cvec r_shadow = r;  // fixed shadow residual: deterministic iteration

    const double b_norm = norm2(b);
    const double scale = b_norm > 0.0 ? b_norm : 1.0;
    report.residual_history.push_back(norm2(r) / scale);
    report.recursive_residual_history.push_back(report.residual_history.back());

    cplx rho{1.0}, alpha{1.0}, omega{1.0};

    const auto finish = [&](KrylovStatus status) {
        report.status = status;
        report.converged = status == KrylovStatus::converged;
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return std::make_pair(std::move(x), std::move(report));
    };

    if (report.residual_history.back() <= config.tol) return finish(KrylovStatus::converged);

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const cplx rho_new = dot(r_shadow, r);
        if (std::abs(rho_new) < 1e-14 * norm2(r_shadow) * norm2(r))
            return finish(KrylovStatus::breakdown);
        if (iter == 1) {
            p = r;
        } else {
            const cplx beta = (rho_new / rho) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;

        m_inv(p, p_hat);
        ++report.mg_cycles;
        a(p_hat, v);
        const cplx denom = dot(r_shadow, v);
        if (std::abs(denom) < 1e-14 * norm2(r_shadow) * norm2(v))
            return finish(KrylovStatus::breakdown);
        alpha = rho / denom;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];

        m_inv(s, s_hat);
        ++report.mg_cycles;
        a(s_hat, t);
        const double t_norm2 = [&] {
            double acc = 0.0;
            for (const cplx& z : t) acc += std::norm(z);
            return acc;
        }();
        omega = t_norm2 > 0.0 ? dot(t, s) / t_norm2 : cplx{0.0};

        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }

        ++report.iterations;
        a(x, true_r);
        for (std::size_t i = 0; i < n; ++i) true_r[i] = b[i] - true_r[i];
        report.residual_history.push_back(norm2(true_r) / scale);
        report.recursive_residual_history.push_back(norm2(r) / scale);
        if (report.residual_history.back() <= config.tol) return finish(KrylovStatus::converged);
        if (omega == cplx{0.0}) return finish(KrylovStatus::breakdown);
    }
    return finish(KrylovStatus::max_iterations);
}

}  // namespace helmecs

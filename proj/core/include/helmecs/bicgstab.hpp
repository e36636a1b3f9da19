#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helmecs/multigrid.hpp"
#include "helmecs/types.hpp"

namespace helmecs {

struct KrylovConfig {
    double tol = 1e-6;  // relative true-residual stopping threshold
    int max_iter = 5000;
    bool warm_start = false;
    double warm_start_tol = 1e-2;

    bool operator==(const KrylovConfig&) const = default;
};

enum class KrylovStatus { converged, max_iterations, breakdown };

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    KrylovStatus status = KrylovStatus::converged;
    std::vector<double> residual_history;  // true relative residuals, length iterations + 1
    std::vector<double> recursive_residual_history;  // recurrence residuals, same length
    long mg_cycles = 0;                    // preconditioner applications (+ warm-start cycles)
    double wall_seconds = 0.0;
    std::map<std::string, std::string> config_echo;

    /// First iteration with relative residual <= tol, or -1.
    int iterations_to(double tol) const;
};

using LinearOp = std::function<void(std::span<const cplx>, std::span<cplx>)>;

/**
 * Right-preconditioned Bi-CGSTAB in complex arithmetic. m_inv must be a
 * fixed linear operation per application (here: one multigrid cycle from a
 * zero initial guess); exactly two applications are consumed per iteration.
 * The shadow residual is fixed to the initial residual, so the iteration is
 * deterministic. Reported residuals are true residuals of the original
 * system.
 */
std::pair<cvec, SolveReport> bicgstab(const LinearOp& a, const LinearOp& m_inv, const cvec& b,
                                      const cvec& x0, const KrylovConfig& config);

/// Preconditioner application: one cycle of the hierarchy from a zero guess.
LinearOp mg_preconditioner(const Hierarchy& h, const MgConfig& config);

/// Plain operator application.
LinearOp operator_action(const StencilOperator& op);

/// Starting guess from a standalone multigrid solve of M x = b to inner_tol
/// using the given cycle configuration. cycles_used reports the multigrid
/// cycles consumed.
cvec warm_start_guess(const Hierarchy& preconditioner, const cvec& b, double inner_tol,
                      const MgConfig& mg, int& cycles_used);

}  // namespace helmecs

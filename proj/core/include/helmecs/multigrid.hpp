#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <memory>
#include <vector>

#include "helmecs/stencil.hpp"

namespace helmecs {

enum class SmootherKind { jacobi, rb_jacobi };

struct MgConfig {
    int nu1 = 1;                // pre-smoothing sweeps
    int nu2 = 1;                // post-smoothing sweeps
    int gamma_f = 1;            // fine cycle index
    int gamma_c = 1;            // coarse cycle index
    SmootherKind smoother = SmootherKind::rb_jacobi;
    double omega = 1.0;
    std::size_t coarse_cap = 1024;  // coarsen while unknowns exceed this
    int max_coarse_level = 64;      // optional explicit depth limit
    double tol = 1e-6;              // standalone-solve relative residual
    int max_cycles = 100;
    bool literal_swap = true;  // swap (gamma_f, gamma_c) on recursions i > 1

    bool operator==(const MgConfig&) const = default;
};

/// Level-visit trace of a cycle: one entry per smoothing visit or exact
/// solve, in execution order.
struct CycleTrace {
    enum class Event { visit, exact };
    std::vector<std::pair<int, Event>> events;
    std::vector<int> levels() const {
        std::vector<int> out;
        out.reserve(events.size());
        for (const auto& e : events) out.push_back(e.first);
        return out;
    }
};

/**
 * Grid/operator stack for geometric multigrid with rediscretized coarse
 * operators and a dense-factorized coarsest level. Immutable after
 * construction; concurrent cycles on the same hierarchy each own their
 * workspace.
 */
class Hierarchy {
public:
    Hierarchy(const OperatorSpec& spec, const TensorGrid2D& fine_grid, const MgConfig& config);

    int coarsest() const { return static_cast<int>(ops_.size()) - 1; }
    const StencilOperator& op(int level) const { return ops_[level]; }
    const TensorGrid2D& grid(int level) const { return ops_[level].grid(); }
    const OperatorSpec& spec() const { return spec_; }

    /// Direct solve on the coarsest level.
    cvec coarse_solve(const cvec& b) const;

private:
    OperatorSpec spec_;
    std::vector<StencilOperator> ops_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> coarse_lu_;
};

Hierarchy build_hierarchy(const OperatorSpec& spec, const MgConfig& config);
Hierarchy build_hierarchy(const OperatorSpec& spec, const TensorGrid2D& fine_grid,
                          const MgConfig& config);

/// In-place smoothing sweeps on A u = b.
void smooth(const StencilOperator& op, cvec& u, const cvec& b, SmootherKind kind, double omega,
            int sweeps);

/// 9-point full-weighting restriction, index-based.
cvec restrict_fw(const cvec& fine, const TensorGrid2D& fine_grid, const TensorGrid2D& coarse_grid);

/// Index-based bilinear prolongation; Dirichlet neighbors contribute zero.
cvec prolong_bilinear(const cvec& coarse, const TensorGrid2D& coarse_grid,
                      const TensorGrid2D& fine_grid);

/// One multigrid cycle at level l (Algorithm 1 semantics): nu1 pre-smooths,
/// restricted-residual coarse correction with gamma_c recursive solves (the
/// cycle indices swap on recursions after the first when literal_swap is
/// set), prolongated correction, nu2 post-smooths. At the coarsest level the
/// solve is exact.
void mg_cycle(const Hierarchy& h, int level, const cvec& b, cvec& u, const MgConfig& config,
              CycleTrace* trace = nullptr);

enum class MgStatus { converged, max_cycles, diverged };

struct MgResult {
    cvec u;
    double conv_factor = 0.0;  // geometric mean of the last <=5 residual ratios
    int cycles = 0;
    MgStatus status = MgStatus::converged;
    std::vector<double> residuals;  // relative residuals, [0] = 1
};

/// Repeated cycles from a zero initial guess until the relative residual
/// drops below config.tol.
MgResult standalone_solve(const Hierarchy& h, const cvec& b, const MgConfig& config);

}  // namespace helmecs

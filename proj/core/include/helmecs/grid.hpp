#pragma once

#include <vector>

#include "helmecs/types.hpp"

namespace helmecs {

/**
 * One-dimensional grid with a real segment and optional complex-scaled
 * absorbing layers at either end.
 *
 * The real segment [0, a] carries n cells of width h = a/n. A layer of m
 * cells continues the grid along the ray of angle theta: the high layer
 * runs from a to a + w*e^{i theta}, the low layer from -w*e^{i theta} to 0.
 * Node coordinates are complex; the first and last node carry homogeneous
 * Dirichlet values, so unknowns live at the interior nodes only.
 */
struct EcsGrid1D {
    int n = 0;      // real-segment cells
    int m_lo = 0;   // layer cells at the low end
    int m_hi = 0;   // layer cells at the high end
    double a = 0.0; // real segment length
    double w = 0.0; // layer real width (per layer)
    double theta = 0.0;

    double h = 0.0;     // real mesh width a/n
    cplx h_lo{0.0};     // low-layer mesh width (w/m_lo)*e^{i theta}, 0 if absent
    cplx h_hi{0.0};     // high-layer mesh width (w/m_hi)*e^{i theta}, 0 if absent
    std::vector<cplx> nodes;  // z_0 .. z_N, N = m_lo + n + m_hi

    int cells() const { return m_lo + n + m_hi; }
    int interior() const { return cells() - 1; }  // unknown count

    /// Mesh width of cell j: z_{j+1} - z_j. Throws on out-of-range j.
    cplx mesh_width(int j) const;

    /// Complex mesh ratio h_layer / h; 1 for a layerless grid.
    cplx gamma() const;

    /// True if node j lies on the real segment (boundary interfaces included).
    bool is_real_node(int j) const { return j >= m_lo && j <= m_lo + n; }

    bool coarsenable() const;

    /// Grid with all cell counts halved; coarse nodes are every second fine
    /// node (copied, so shared coordinates are bitwise equal).
    EcsGrid1D coarsen() const;
};

/// Build a 1D ECS grid. theta = 0 degenerates to a purely real grid.
EcsGrid1D build_grid(int n, int m_lo, int m_hi, double a, double w, double theta);

/// Tensor grid over two 1D ECS grids. Unknowns are laid out row-major over
/// the interior nodes of gx x gy (x fastest).
struct TensorGrid2D {
    EcsGrid1D gx, gy;

    int nux() const { return gx.interior(); }
    int nuy() const { return gy.interior(); }
    std::size_t unknowns() const { return static_cast<std::size_t>(nux()) * nuy(); }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nux() + ix; }

    cplx coord_x(int ix) const { return gx.nodes[ix + 1]; }
    cplx coord_y(int iy) const { return gy.nodes[iy + 1]; }

    bool coarsenable() const { return gx.coarsenable() && gy.coarsenable(); }
    TensorGrid2D coarsen() const { return {gx.coarsen(), gy.coarsen()}; }
};

}  // namespace helmecs

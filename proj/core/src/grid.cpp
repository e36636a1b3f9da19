#include "helmecs/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helmecs {

cplx EcsGrid1D::mesh_width(int j) const {
    if (j < 0 || j >= cells()) throw std::out_of_range("EcsGrid1D::mesh_width: cell index out of range");
    return nodes[j + 1] - nodes[j];
}

cplx EcsGrid1D::gamma() const {
    if (m_hi > 0) return h_hi / h;
    if (m_lo > 0) return h_lo / h;
    return cplx{1.0};
}

bool EcsGrid1D::coarsenable() const {
    auto even = [](int c) { return c % 2 == 0; };
    return n >= 2 && even(n) && even(m_lo) && even(m_hi);
}

EcsGrid1D EcsGrid1D::coarsen() const {
    if (!coarsenable()) throw std::invalid_argument("EcsGrid1D::coarsen: all cell counts must be even");
    EcsGrid1D c;
    c.n = n / 2;
    c.m_lo = m_lo / 2;
    c.m_hi = m_hi / 2;
    c.a = a;
    c.w = w;
    c.theta = theta;
    c.h = 2.0 * h;
    c.h_lo = 2.0 * h_lo;
    c.h_hi = 2.0 * h_hi;
    c.nodes.resize(static_cast<std::size_t>(c.cells()) + 1);
    for (std::size_t j = 0; j < c.nodes.size(); ++j) c.nodes[j] = nodes[2 * j];
    return c;
}

EcsGrid1D build_grid(int n, int m_lo, int m_hi, double a, double w, double theta) {
    if (n < 2) throw std::invalid_argument("build_grid: n must be >= 2");
    if (m_lo < 0 || m_hi < 0) throw std::invalid_argument("build_grid: layer cell counts must be >= 0");
    if (a <= 0.0) throw std::invalid_argument("build_grid: segment length a must be positive");
    if ((m_lo > 0 || m_hi > 0) && w <= 0.0)
        throw std::invalid_argument("build_grid: layer width w must be positive when layers are present");
    if (theta < 0.0 || theta >= std::numbers::pi / 2.0)
        throw std::invalid_argument("build_grid: theta must lie in [0, pi/2)");

    EcsGrid1D g;
    g.n = n;
    g.m_lo = m_lo;
    g.m_hi = m_hi;
    g.a = a;
    g.w = w;
    g.theta = theta;
    g.h = a / n;
    const cplx ray = std::polar(1.0, theta);
    if (m_lo > 0) g.h_lo = (w / m_lo) * ray;
    if (m_hi > 0) g.h_hi = (w / m_hi) * ray;

    g.nodes.resize(static_cast<std::size_t>(g.cells()) + 1);
    for (int j = 0; j <= m_lo; ++j)
        g.nodes[j] = -w * (static_cast<double>(m_lo - j) / m_lo) * ray;
    if (m_lo == 0) g.nodes[0] = cplx{0.0};
    for (int t = 0; t <= n; ++t)
        g.nodes[m_lo + t] = cplx{a * (static_cast<double>(t) / n)};
    for (int t = 1; t <= m_hi; ++t)
        g.nodes[m_lo + n + t] = a + w * (static_cast<double>(t) / m_hi) * ray;
    return g;
}

}  // namespace helmecs

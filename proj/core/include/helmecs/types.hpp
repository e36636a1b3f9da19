#pragma once

#include <complex>
#include <span>
#include <vector>

namespace helmecs {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Conjugated inner product <a,b> = sum conj(a_i) * b_i.
inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

/// Euclidean 2-norm.
inline double norm2(std::span<const cplx> v) {
    double acc = 0.0;
    for (const cplx& x : v) acc += std::norm(x);
    return std::sqrt(acc);
}

inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace helmecs

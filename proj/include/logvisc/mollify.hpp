// Separable discrete Gaussian mollifier for cell-centered fields.  The
// scale is measured in cells; each 1D pass uses weights proportional to
// exp(-k^2 / (2 sigma^2)) truncated at |k| <= ceil(4 sigma) and normalized
// to unit sum, so the filter is an L2 contraction on periodic grids and
// preserves linear constraints (tracelessness of charts) exactly.
#pragma once

#include <cmath>
#include <vector>

#include "field.hpp"

namespace logvisc {

inline std::vector<double> gaussian_weights(double sigma_cells) {
    if (sigma_cells <= 0.0) return {1.0};
    const int           radius = static_cast<int>(std::ceil(4.0 * sigma_cells));
    std::vector<double> w(2 * radius + 1);
    double              sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        w[k + radius] = std::exp(-0.5 * (k * k) / (sigma_cells * sigma_cells));
        sum += w[k + radius];
    }
    for (double& x : w) x /= sum;
    return w;
}

namespace detail {

/// One separable pass along `ax`; `get`/`set` expose the component being
/// smoothed.  Out-of-range taps wrap (periodic) or reflect evenly (walls).
template <int D, class Get, class Set>
inline void mollify_pass(const Grid<D>& g, int ax, const std::vector<double>& w, Get&& get,
                         Set&& set) {
    const int radius = (static_cast<int>(w.size()) - 1) / 2;
    const std::int64_t nc = g.cell_count();
    std::vector<double> out(nc);
    for (std::int64_t c = 0; c < nc; ++c) {
        const auto idx = g.cell_coords(c);
        double     s   = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            auto tap = idx;
            int  i   = idx[ax] + k;
            if (g.mode == BoundaryMode::periodic) {
                i %= g.n[ax];
                if (i < 0) i += g.n[ax];
            } else {
                // Even reflection: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
                while (i < 0 || i >= g.n[ax]) {
                    if (i < 0) i = -1 - i;
                    if (i >= g.n[ax]) i = 2 * g.n[ax] - 1 - i;
                }
            }
            tap[ax] = i;
            s += w[k + radius] * get(g.cell_index(tap));
        }
        out[c] = s;
    }
    for (std::int64_t c = 0; c < nc; ++c) set(c, out[c]);
}

} // namespace detail

template <int D>
inline ScalarField<D> mollify(const ScalarField<D>& f, double sigma_cells) {
    ScalarField<D> r = f;
    if (sigma_cells <= 0.0) return r;
    const auto w = gaussian_weights(sigma_cells);
    for (int ax = 0; ax < D; ++ax)
        detail::mollify_pass(
            r.grid, ax, w, [&](std::int64_t c) { return r[c]; },
            [&](std::int64_t c, double v) { r[c] = v; });
    return r;
}

/// Componentwise mollification of a tensor field.  Applied to chart (log)
/// fields this is the canonical smoothing of the strain data: linearity
/// keeps interpolated charts traceless, hence unit-determinant after
/// exponentiation.
template <int D>
inline TensorField<D> mollify(const TensorField<D>& f, double sigma_cells) {
    TensorField<D> r = f;
    if (sigma_cells <= 0.0) return r;
    const auto w = gaussian_weights(sigma_cells);
    for (int comp = 0; comp < SymTensor<D>::ncomp; ++comp)
        for (int ax = 0; ax < D; ++ax)
            detail::mollify_pass(
                r.grid, ax, w, [&](std::int64_t c) { return r[c].a[comp]; },
                [&](std::int64_t c, double v) { r[c].a[comp] = v; });
    return r;
}

} // namespace logvisc

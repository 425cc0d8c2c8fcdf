// Discrete differential operators and interpolation on the MAC layout.
//
// Two velocity-gradient discretizations coexist on purpose:
//
//  * velocity_gradient(): a full gradient tensor at every cell center.
//    Diagonal entries are compact face differences, so the trace equals the
//    MAC divergence exactly; off-diagonals are the node-averaged compact
//    differences (algebraically identical to centered differences of the
//    cell-interpolated velocity).  This operator is the exact negative
//    adjoint of tensor_divergence() on periodic grids, which keeps the
//    discrete stress power  <div T, u> = -<T, grad u>  an identity.
//
//  * grad_norms(): the native staggered quadrature of |grad u|^2 and |D|^2
//    (diagonal parts at centers, mixed parts at nodes).  With this pairing
//    the identity  |grad u|^2 = 2 |D|^2  holds to round-off for discretely
//    divergence-free fields under periodic or no-slip boundaries, which is
//    what the energy bookkeeping needs.
#pragma once

#include <cmath>
#include <type_traits>

#include "field.hpp"

namespace logvisc {

// ---------------------------------------------------------- interpolation ---

namespace detail {

/// Fold a cell index per boundary mode (periodic wrap / clamp at walls).
template <int D>
inline int fold_cell(const Grid<D>& g, int i, int ax) {
    return g.fold(i, ax);
}

} // namespace detail

/// Multilinear interpolation of a cell-centered scalar field.
template <int D>
inline double sample_scalar(const ScalarField<D>& f, const std::type_identity_t<Vec<D>>& x) {
    const Grid<D>& g = f.grid;
    std::array<int, D>    base{};
    std::array<double, D> frac{};
    for (int ax = 0; ax < D; ++ax) {
        const double s = x[ax] / g.dx(ax) - 0.5;
        const double fl = std::floor(s);
        base[ax] = static_cast<int>(fl);
        frac[ax] = s - fl;
    }
    double out = 0.0;
    for (int corner = 0; corner < (1 << D); ++corner) {
        double             w = 1.0;
        std::array<int, D> idx{};
        for (int ax = 0; ax < D; ++ax) {
            const int bit = (corner >> ax) & 1;
            w *= bit ? frac[ax] : 1.0 - frac[ax];
            idx[ax] = detail::fold_cell(g, base[ax] + bit, ax);
        }
        out += w * f[g.cell_index(idx)];
    }
    return out;
}

/// Multilinear interpolation of a cell-centered symmetric-tensor field,
/// componentwise.  For log-space (chart) fields this is the canonical
/// B-interpolation: interpolate log B linearly, exponentiate afterwards if
/// the SPD representative is needed.  Linearity preserves tracelessness, so
/// interpolated charts stay on the unit-determinant slice exactly.
template <int D>
inline SymTensor<D> sample_chart(const TensorField<D>& f, const std::type_identity_t<Vec<D>>& x) {
    const Grid<D>& g = f.grid;
    std::array<int, D>    base{};
    std::array<double, D> frac{};
    for (int ax = 0; ax < D; ++ax) {
        const double s = x[ax] / g.dx(ax) - 0.5;
        const double fl = std::floor(s);
        base[ax] = static_cast<int>(fl);
        frac[ax] = s - fl;
    }
    SymTensor<D> out;
    for (int corner = 0; corner < (1 << D); ++corner) {
        double             w = 1.0;
        std::array<int, D> idx{};
        for (int ax = 0; ax < D; ++ax) {
            const int bit = (corner >> ax) & 1;
            w *= bit ? frac[ax] : 1.0 - frac[ax];
            idx[ax] = detail::fold_cell(g, base[ax] + bit, ax);
        }
        const SymTensor<D>& c = f[g.cell_index(idx)];
        for (int k = 0; k < SymTensor<D>::ncomp; ++k) out.a[k] += w * c.a[k];
    }
    return out;
}

/// Interpolate an SPD-role field stored in chart (log) form and return the
/// SPD representative exp(interpolated log B).
template <int D>
inline SymTensor<D> sample_spd_from_chart(const TensorField<D>& chart,
                                           const std::type_identity_t<Vec<D>>& x) {
    return mat_exp_sym(sample_chart(chart, x));
}

/// Multilinear interpolation of one MAC velocity component at a physical
/// point; out-of-range stencil offsets follow the field's boundary
/// conventions (periodic wrap, or no-slip-consistent odd ghosts).
template <int D>
inline double sample_velocity_component(const VectorField<D>& u, int ax,
                                         const std::type_identity_t<Vec<D>>& x) {
    const Grid<D>&        g = u.grid;
    std::array<int, D>    base{};
    std::array<double, D> frac{};
    for (int j = 0; j < D; ++j) {
        const double shift = (j == ax) ? 0.0 : 0.5;
        const double s     = x[j] / g.dx(j) - shift;
        const double fl    = std::floor(s);
        base[j] = static_cast<int>(fl);
        frac[j] = s - fl;
    }
    double out = 0.0;
    for (int corner = 0; corner < (1 << D); ++corner) {
        double             w = 1.0;
        std::array<int, D> idx{};
        for (int j = 0; j < D; ++j) {
            const int bit = (corner >> j) & 1;
            w *= bit ? frac[j] : 1.0 - frac[j];
            idx[j] = base[j] + bit;
        }
        out += w * u.at(ax, idx);
    }
    return out;
}

template <int D>
inline Vec<D> sample_velocity(const VectorField<D>& u, const std::type_identity_t<Vec<D>>& x) {
    Vec<D> v{};
    for (int ax = 0; ax < D; ++ax) v[ax] = sample_velocity_component(u, ax, x);
    return v;
}

/// Catmull-Rom (cubic) interpolation of one MAC component.  Used by the
/// momentum stepper's self-advection gather: the bilinear sampler damps
/// smooth velocity extrema at a rate proportional to dx per unit time,
/// which would swamp physical viscous decay; the cubic kernel pushes the
/// amplitude error below the dissipation scales of interest.  Boundary
/// folding matches `at`, so the stencil is valid near walls as well.
template <int D>
inline double sample_velocity_component_cubic(const VectorField<D>& u, int ax,
                                               const std::type_identity_t<Vec<D>>& x) {
    const Grid<D>&        g = u.grid;
    std::array<int, D>    base{};
    std::array<std::array<double, 4>, D> w{};
    for (int j = 0; j < D; ++j) {
        const double shift = (j == ax) ? 0.0 : 0.5;
        const double s     = x[j] / g.dx(j) - shift;
        const double fl    = std::floor(s);
        base[j] = static_cast<int>(fl);
        const double t  = s - fl;
        const double t2 = t * t;
        const double t3 = t2 * t;
        w[j][0] = 0.5 * (-t3 + 2.0 * t2 - t);
        w[j][1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
        w[j][2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
        w[j][3] = 0.5 * (t3 - t2);
    }
    double out = 0.0;
    std::array<int, D> off{};
    for (;;) {
        double             wt = 1.0;
        std::array<int, D> idx{};
        for (int j = 0; j < D; ++j) {
            wt *= w[j][off[j]];
            idx[j] = base[j] + off[j] - 1;
        }
        out += wt * u.at(ax, idx);
        int j = 0;
        for (; j < D; ++j) {
            if (++off[j] < 4) break;
            off[j] = 0;
        }
        if (j == D) break;
    }
    return out;
}

// -------------------------------------------------------------- operators ---

/// MAC divergence at cell centers: sum over axes of compact face
/// differences.  Exactly the trace of velocity_gradient().
template <int D>
inline ScalarField<D> mac_divergence(const VectorField<D>& u) {
    const Grid<D>& g = u.grid;
    ScalarField<D> div(g);
    const std::int64_t nc = g.cell_count();
    for (std::int64_t c = 0; c < nc; ++c) {
        const auto idx = g.cell_coords(c);
        double     s   = 0.0;
        for (int ax = 0; ax < D; ++ax) {
            auto right = idx;
            right[ax] += 1;
            s += (u.at(ax, right) - u.at(ax, idx)) / g.dx(ax);
        }
        div[c] = s;
    }
    return div;
}

/// Full velocity-gradient tensor at cell centers, (grad u)_ij = du_i/dx_j.
/// Diagonal: compact difference of the cell's two faces (trace == MAC
/// divergence exactly).  Off-diagonal: average of the four (2D) compact
/// node differences, identical to a wide centered difference of the
/// cell-interpolated component.
template <int D>
inline MatField<D> velocity_gradient(const VectorField<D>& u) {
    const Grid<D>& g = u.grid;
    MatField<D>    grad(g);
    const std::int64_t nc = g.cell_count();
    for (std::int64_t c = 0; c < nc; ++c) {
        const auto idx = g.cell_coords(c);
        Mat<D>     m;
        for (int i = 0; i < D; ++i) {
            auto right = idx;
            right[i] += 1;
            m(i, i) = (u.at(i, right) - u.at(i, idx)) / g.dx(i);
            for (int j = 0; j < D; ++j) {
                if (j == i) continue;
                // Cell-interpolated component i at cells idx +- e_j.
                auto cp = idx;
                cp[j] += 1;
                auto cm = idx;
                cm[j] -= 1;
                auto face_of = [&](std::array<int, D> cell) {
                    const double left  = u.at(i, cell);
                    auto         r     = cell;
                    r[i] += 1;
                    return 0.5 * (left + u.at(i, r));
                };
                m(i, j) = (face_of(cp) - face_of(cm)) / (2.0 * g.dx(j));
            }
        }
        grad[c] = m;
    }
    return grad;
}

/// Row-wise divergence of a cell-centered symmetric tensor field, assembled
/// on MAC faces as a forcing: the normal-derivative term is the compact
/// difference of the two adjacent cells; the transverse terms are centered
/// cell differences averaged to the face.  This is the exact negative
/// adjoint of velocity_gradient() on periodic grids.
template <int D>
inline VectorField<D> tensor_divergence(const TensorField<D>& t) {
    const Grid<D>& g = t.grid;
    VectorField<D> f(g);

    auto cell_at = [&](std::array<int, D> idx) -> const SymTensor<D>& {
        for (int ax = 0; ax < D; ++ax) idx[ax] = g.fold(idx[ax], ax);
        return t[g.cell_index(idx)];
    };

    for (int ax = 0; ax < D; ++ax) {
        f.for_each_face(ax, [&](const std::array<int, D>& fidx) {
            const bool wall =
                g.mode == BoundaryMode::no_slip_walls &&
                (fidx[ax] == 0 || fidx[ax] == f.faces_along(ax) - 1);
            if (wall) {
                f.ref(ax, fidx) = 0.0; // pinned no-slip faces take no forcing
                return;
            }
            // Cells left/right of this face along ax.
            auto cl = fidx;
            cl[ax] -= 1;
            auto cr = fidx;

            double s = (cell_at(cr)(ax, ax) - cell_at(cl)(ax, ax)) / g.dx(ax);
            for (int j = 0; j < D; ++j) {
                if (j == ax) continue;
                auto centered = [&](std::array<int, D> cell) {
                    auto cp = cell;
                    cp[j] += 1;
                    auto cm = cell;
                    cm[j] -= 1;
                    return (cell_at(cp)(ax, j) - cell_at(cm)(ax, j)) / (2.0 * g.dx(j));
                };
                s += 0.5 * (centered(cl) + centered(cr));
            }
            f.ref(ax, fidx) = s;
        });
    }
    return f;
}

/// Native staggered quadratures of the velocity-gradient magnitude:
///   gradu_sq = integral |grad u|^2,   d_sq = integral |D|^2,
/// with diagonal parts at cell centers and mixed parts at nodes.  For
/// discretely divergence-free u with periodic or no-slip boundaries these
/// satisfy gradu_sq = 2 d_sq to round-off.
struct GradNorms {
    double gradu_sq = 0.0;
    double d_sq     = 0.0;
};

template <int D>
inline GradNorms grad_norms(const VectorField<D>& u) {
    const Grid<D>& g   = u.grid;
    const double   vol = g.cell_volume();
    KahanSum       gg, dd;

    // Diagonal entries at cell centers.
    const std::int64_t nc = g.cell_count();
    for (std::int64_t c = 0; c < nc; ++c) {
        const auto idx = g.cell_coords(c);
        for (int ax = 0; ax < D; ++ax) {
            auto right = idx;
            right[ax] += 1;
            const double d = (u.at(ax, right) - u.at(ax, idx)) / g.dx(ax);
            gg.add(d * d);
            dd.add(d * d);
        }
    }
    // Mixed entries du_i/dx_j at nodes of the (i, j) plane.  Node index m
    // along j labels the face between cells m-1 and m; periodic grids have
    // n_j nodes, walls n_j + 1 (ghost differences via u.at()).
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            if (i == j) continue;
            const int nj = g.mode == BoundaryMode::periodic ? g.n[j] : g.n[j] + 1;
            std::array<int, D> idx{};
            for (;;) {
                // du_i/dx_j at the node: compact difference of component i
                // between j-neighbors.
                auto below = idx;
                below[j] -= 1;
                const double dij = (u.at(i, idx) - u.at(i, below)) / g.dx(j);
                // Companion entry du_j/dx_i at the same node.
                auto left = idx;
                left[i] -= 1;
                const double dji = (u.at(j, idx) - u.at(j, left)) / g.dx(i);
                gg.add(dij * dij);
                dd.add(0.25 * (dij + dji) * (dij + dji));

                int ax = 0;
                for (; ax < D; ++ax) {
                    int lim;
                    if (ax == j)
                        lim = nj;
                    else if (ax == i)
                        lim = u.faces_along(i);
                    else
                        lim = g.n[ax];
                    if (++idx[ax] < lim) break;
                    idx[ax] = 0;
                }
                if (ax == D) break;
            }
        }
    GradNorms r;
    r.gradu_sq = gg.value() * vol;
    r.d_sq     = dd.value() * vol;
    return r;
}

} // namespace logvisc

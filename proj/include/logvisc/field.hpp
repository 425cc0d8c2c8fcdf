// Field containers over a Grid: cell-centered scalar/tensor fields, a MAC
// staggered vector field, and the compensated L2 norms and validation passes
// used by the diagnostics.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "grid.hpp"
#include "tensor.hpp"

namespace logvisc {

// ----------------------------------------------------------- cell fields ---

template <int D>
struct ScalarField {
    Grid<D>             grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid<D>& g) : grid(g), v(g.cell_count(), 0.0) {}

    double&  operator[](std::int64_t i) { return v[i]; }
    double   operator[](std::int64_t i) const { return v[i]; }
    std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
};

template <int D>
struct TensorField {
    Grid<D>                   grid;
    std::vector<SymTensor<D>> v;

    TensorField() = default;
    explicit TensorField(const Grid<D>& g) : grid(g), v(g.cell_count()) {}

    SymTensor<D>&       operator[](std::int64_t i) { return v[i]; }
    const SymTensor<D>& operator[](std::int64_t i) const { return v[i]; }
    std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
};

/// Cell-centered field of general (non-symmetric) matrices; used for
/// velocity gradients and the optional deformation-gradient tracker.
template <int D>
struct MatField {
    Grid<D>             grid;
    std::vector<Mat<D>> v;

    MatField() = default;
    explicit MatField(const Grid<D>& g) : grid(g), v(g.cell_count()) {}

    Mat<D>&       operator[](std::int64_t i) { return v[i]; }
    const Mat<D>& operator[](std::int64_t i) const { return v[i]; }
    std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
};

// ------------------------------------------------------- MAC vector field ---

/// Staggered velocity field.  Component `ax` is stored on faces normal to
/// axis `ax`: in periodic mode there are n[ax] faces along that axis (face
/// n aliases face 0); with walls there are n[ax] + 1, and the two boundary
/// faces carry the wall-normal velocity (held at zero for no-slip).
template <int D>
struct VectorField {
    Grid<D>                            grid;
    std::array<std::vector<double>, D> comp;

    VectorField() = default;
    explicit VectorField(const Grid<D>& g) : grid(g) {
        for (int ax = 0; ax < D; ++ax) comp[ax].assign(face_count(ax), 0.0);
    }

    int faces_along(int ax) const {
        return grid.mode == BoundaryMode::periodic ? grid.n[ax] : grid.n[ax] + 1;
    }

    std::int64_t face_count(int ax) const {
        std::int64_t c = 1;
        for (int j = 0; j < D; ++j) c *= (j == ax) ? faces_along(ax) : grid.n[j];
        return c;
    }

    /// Linear index of the face with integer coordinates idx (idx[ax] in
    /// [0, faces_along(ax)), other axes in cell range), x fastest.
    std::int64_t face_index(int ax, const std::array<int, D>& idx) const {
        std::int64_t lin    = 0;
        std::int64_t stride = 1;
        for (int j = 0; j < D; ++j) {
            lin += idx[j] * stride;
            stride *= (j == ax) ? faces_along(ax) : grid.n[j];
        }
        return lin;
    }

    /// Value of component `ax` at face coordinates, folding the staggered
    /// index periodically or applying the wall convention: the wall-normal
    /// component reads stored boundary faces, while out-of-range tangential
    /// offsets reflect oddly (ghost = -mirror), consistent with no-slip.
    double at(int ax, const std::array<int, D>& idx) const { return at_in(ax, idx, comp[ax]); }

    /// Same folding logic reading from a caller-supplied buffer shaped like
    /// component `ax` (used by the implicit solves to avoid copies).
    double at_in(int ax, std::array<int, D> idx, const std::vector<double>& data) const {
        double sign = 1.0;
        for (int j = 0; j < D; ++j) {
            if (j == ax) {
                const int m = faces_along(ax);
                if (grid.mode == BoundaryMode::periodic) {
                    idx[j] %= grid.n[ax];
                    if (idx[j] < 0) idx[j] += grid.n[ax];
                } else {
                    // Normal component beyond the wall: odd reflection about
                    // the boundary face (face 0 and face n hold value 0).
                    if (idx[j] < 0) {
                        idx[j] = -idx[j];
                        sign   = -sign;
                    } else if (idx[j] >= m) {
                        idx[j] = 2 * (m - 1) - idx[j];
                        sign   = -sign;
                    }
                    if (idx[j] < 0 || idx[j] >= m) return 0.0; // far ghost
                }
            } else {
                if (grid.mode == BoundaryMode::periodic) {
                    idx[j] %= grid.n[j];
                    if (idx[j] < 0) idx[j] += grid.n[j];
                } else {
                    // Tangential ghost cells mirror oddly through the wall
                    // plane so the interpolated wall value is zero.
                    if (idx[j] < 0) {
                        idx[j] = -1 - idx[j];
                        sign   = -sign;
                    } else if (idx[j] >= grid.n[j]) {
                        idx[j] = 2 * grid.n[j] - 1 - idx[j];
                        sign   = -sign;
                    }
                    if (idx[j] < 0 || idx[j] >= grid.n[j]) return 0.0;
                }
            }
        }
        return sign * data[face_index(ax, idx)];
    }

    double& ref(int ax, const std::array<int, D>& idx) { return comp[ax][face_index(ax, idx)]; }

    /// Physical position of a face of component `ax`.
    Vec<D> face_position(int ax, const std::array<int, D>& idx) const {
        Vec<D> x{};
        for (int j = 0; j < D; ++j)
            x[j] = (j == ax) ? idx[j] * grid.dx(j) : (idx[j] + 0.5) * grid.dx(j);
        return x;
    }

    /// Visit every stored face of component `ax` in linear order.
    template <class F>
    void for_each_face(int ax, F&& f) const {
        std::array<int, D> idx{};
        const int          na = faces_along(ax);
        for (;;) {
            f(idx);
            int j = 0;
            for (; j < D; ++j) {
                const int lim = (j == ax) ? na : grid.n[j];
                if (++idx[j] < lim) break;
                idx[j] = 0;
            }
            if (j == D) break;
        }
    }
};

// ------------------------------------------------------------------ norms ---

/// L2 norm, sqrt( sum |f|^2 * cell_volume ), compensated summation in a
/// fixed serial order.
template <int D>
inline double l2_norm(const ScalarField<D>& f) {
    KahanSum s;
    for (std::int64_t i = 0; i < f.size(); ++i) s.add(f[i] * f[i]);
    return std::sqrt(s.value() * f.grid.cell_volume());
}

template <int D>
inline double l2_norm_sq(const TensorField<D>& f) {
    KahanSum s;
    for (std::int64_t i = 0; i < f.size(); ++i) s.add(inner(f[i], f[i]));
    return s.value() * f.grid.cell_volume();
}

template <int D>
inline double l2_norm(const TensorField<D>& f) {
    return std::sqrt(l2_norm_sq(f));
}

/// MAC L2 norm: every stored face carries one cell volume; in walls mode the
/// two boundary faces of the staggered axis carry half a volume each (they
/// hold no-slip zeros in simulation fields, so the choice only matters for
/// synthetic data).
template <int D>
inline double l2_norm_sq(const VectorField<D>& u) {
    KahanSum     s;
    const double vol = u.grid.cell_volume();
    for (int ax = 0; ax < D; ++ax) {
        const int last = u.faces_along(ax) - 1;
        u.for_each_face(ax, [&](const std::array<int, D>& idx) {
            const double w =
                (u.grid.mode == BoundaryMode::no_slip_walls && (idx[ax] == 0 || idx[ax] == last))
                    ? 0.5
                    : 1.0;
            const double val = u.comp[ax][u.face_index(ax, idx)];
            s.add(w * val * val);
        });
    }
    return s.value() * vol;
}

template <int D>
inline double l2_norm(const VectorField<D>& u) {
    return std::sqrt(l2_norm_sq(u));
}

template <int D>
inline double max_abs(const ScalarField<D>& f) {
    double m = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

// ------------------------------------------------------------- validation ---

/// Max |tr| over a chart field (on-demand role check for log-space tensors).
template <int D>
inline double max_trace_error(const TensorField<D>& f) {
    double m = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i].trace()));
    return m;
}

/// Max |det - 1| and min eigenvalue over an SPD-role field.
template <int D>
struct SpdValidation {
    double max_det_err = 0.0;
    double min_eigenvalue = 0.0;
};

template <int D>
inline SpdValidation<D> validate_spd_unit_det(const TensorField<D>& f) {
    SpdValidation<D> r;
    r.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < f.size(); ++i) {
        r.max_det_err = std::max(r.max_det_err, std::abs(det(f[i]) - 1.0));
        const auto dec = eig_sym(f[i]);
        r.min_eigenvalue = std::min(r.min_eigenvalue, dec.lambda[D - 1]);
    }
    return r;
}

} // namespace logvisc

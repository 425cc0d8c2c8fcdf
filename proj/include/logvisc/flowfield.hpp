// Velocity samplers feeding the transport steppers.  Transport needs two
// things from a flow: point values of u (for characteristic backtraces) and
// the gradient tensor at cell centers (for the congruence sources).  Both a
// closed-form prescribed flow and a discrete MAC field satisfy that
// interface:
//
//  * AnalyticFlow wraps closed-form u and grad u — the "given smooth u"
//    regime of the transport estimates, exact at every point;
//  * GridFlow wraps a MAC VectorField, sampling u by staggered interpolation
//    and grad u by the discrete velocity_gradient() stencil (precomputed).
#pragma once

#include <functional>

#include "operators.hpp"

namespace logvisc {

template <int D>
struct AnalyticFlow {
    Grid<D>                                    grid;
    std::function<Vec<D>(const Vec<D>&)>       velocity_fn;
    std::function<Mat<D>(const Vec<D>&)>       gradient_fn;

    Vec<D> velocity(const Vec<D>& x) const { return velocity_fn(x); }

    Mat<D> cell_gradient(std::int64_t cell) const {
        return gradient_fn(grid.cell_center(grid.cell_coords(cell)));
    }

    /// Largest velocity magnitude over cell centers (CFL bookkeeping).
    double max_speed() const {
        double m = 0.0;
        const std::int64_t nc = grid.cell_count();
        for (std::int64_t c = 0; c < nc; ++c) {
            const Vec<D> u = velocity_fn(grid.cell_center(grid.cell_coords(c)));
            double       s = 0.0;
            for (int ax = 0; ax < D; ++ax) s = std::max(s, std::abs(u[ax]));
            m = std::max(m, s);
        }
        return m;
    }
};

template <int D>
struct GridFlow {
    const VectorField<D>* u = nullptr;
    MatField<D>           grad;

    explicit GridFlow(const VectorField<D>& field) : u(&field), grad(velocity_gradient(field)) {}

    Vec<D> velocity(const Vec<D>& x) const { return sample_velocity(*u, x); }

    Mat<D> cell_gradient(std::int64_t cell) const { return grad[cell]; }

    double max_speed() const {
        double m = 0.0;
        for (int ax = 0; ax < D; ++ax)
            for (double v : u->comp[ax]) m = std::max(m, std::abs(v));
        return m;
    }
};

/// The zero flow (relaxation-only regimes).
template <int D>
inline AnalyticFlow<D> zero_flow(const Grid<D>& g) {
    return AnalyticFlow<D>{g, [](const Vec<D>&) { return Vec<D>{}; },
                           [](const Vec<D>&) { return Mat<D>{}; }};
}

} // namespace logvisc

// Conjugate-gradient solves for the two elliptic pieces of the momentum
// step: the pressure Poisson equation on cell centers and the implicit
// viscous Helmholtz equation on each MAC component.  Plain CG is enough at
// desk scale; iterations are warm-started from the previous step's solution
// and run to a 1e-10 relative residual, which keeps the post-projection
// divergence at the round-off floor of the scheme.  All reductions are
// serial and orderless-free, so solves are bit-deterministic.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "field.hpp"

namespace logvisc {

inline constexpr double kLinTol     = 1e-10;
inline constexpr int    kLinMaxIter = 20000;

/// CG on an abstract SPD operator.  Returns iterations used; throws
/// SolverError with the residual if the tolerance is not reached.
inline int conjugate_gradient(const std::function<void(const std::vector<double>&,
                                                       std::vector<double>&)>& apply,
                              const std::vector<double>& b, std::vector<double>& x,
                              const char* label) {
    const std::size_t n = b.size();
    std::vector<double> r(n), p(n), ap(n);

    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };

    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    p = r;

    const double bnorm = std::sqrt(std::max(dot(b, b), 1e-300));
    double       rr    = dot(r, r);
    if (std::sqrt(rr) <= kLinTol * bnorm) return 0;

    for (int it = 1; it <= kLinMaxIter; ++it) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0)
            throw SolverError(std::string(label) + ": operator lost positive-definiteness");
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= kLinTol * bnorm) return it;
        const double beta = rr_new / rr;
        rr                = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw SolverError(std::string(label) + ": CG failed to reach tolerance (residual = " +
                      std::to_string(std::sqrt(rr)) + ", rhs norm = " + std::to_string(bnorm) +
                      ")");
}

/// Pressure Poisson solve:  -lap p = b  on cell centers, with periodic or
/// homogeneous-Neumann (walls) boundaries.  Both variants have the constant
/// nullspace, so the right-hand side is mean-projected and the solution is
/// pinned to zero mean.  Returns iterations used.
template <int D>
inline int solve_pressure_poisson(const Grid<D>& g, const std::vector<double>& rhs,
                                  std::vector<double>& p) {
    const std::int64_t nc = g.cell_count();
    std::vector<double> b = rhs;

    auto remove_mean = [nc](std::vector<double>& v) {
        KahanSum s;
        for (double x : v) s.add(x);
        const double mean = s.value() / static_cast<double>(nc);
        for (double& x : v) x -= mean;
    };
    remove_mean(b);

    auto apply = [&g, nc](const std::vector<double>& x, std::vector<double>& out) {
        for (std::int64_t c = 0; c < nc; ++c) {
            const auto idx = g.cell_coords(c);
            double     s   = 0.0;
            for (int ax = 0; ax < D; ++ax) {
                const double inv_h2 = 1.0 / (g.dx(ax) * g.dx(ax));
                for (int dir = -1; dir <= 1; dir += 2) {
                    auto nb = idx;
                    nb[ax] += dir;
                    if (g.mode == BoundaryMode::periodic) {
                        nb[ax] = g.fold(nb[ax], ax);
                        s += (x[c] - x[g.cell_index(nb)]) * inv_h2;
                    } else if (nb[ax] >= 0 && nb[ax] < g.n[ax]) {
                        s += (x[c] - x[g.cell_index(nb)]) * inv_h2;
                    }
                    // Missing neighbor at a wall: zero-flux face, no term.
                }
            }
            out[c] = s;
        }
    };

    if (p.size() != static_cast<std::size_t>(nc)) p.assign(nc, 0.0);
    remove_mean(p); // keep the warm start in the zero-mean gauge
    const int iters = conjugate_gradient(apply, b, p, "pressure Poisson");
    remove_mean(p);
    return iters;
}

/// Implicit viscous solve on one MAC component:  (I - coef lap) x = b  over
/// the stored faces of component ax.  Boundary handling matches the field's
/// conventions: periodic wrap, or — with walls — pinned wall-normal faces
/// (Dirichlet rows) and odd tangential ghosts, so the operator acts on the
/// no-slip-admissible space.  Returns iterations used.
template <int D>
inline int solve_viscous_component(const VectorField<D>& shape, int ax, double coef,
                                   const std::vector<double>& b, std::vector<double>& x) {
    const Grid<D>&     g      = shape.grid;
    const bool         walls  = g.mode == BoundaryMode::no_slip_walls;
    const int          last   = shape.faces_along(ax) - 1;

    // Collect stored-face indices once (linear order).
    std::vector<std::array<int, D>> faces;
    faces.reserve(shape.face_count(ax));
    shape.for_each_face(ax, [&faces](const std::array<int, D>& idx) { faces.push_back(idx); });

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t k = 0; k < faces.size(); ++k) {
            const auto& idx = faces[k];
            if (walls && (idx[ax] == 0 || idx[ax] == last)) {
                out[k] = v[k]; // pinned no-slip face: identity row
                continue;
            }
            double lap = 0.0;
            for (int j = 0; j < D; ++j) {
                auto plus = idx;
                plus[j] += 1;
                auto minus = idx;
                minus[j] -= 1;
                lap += (shape.at_in(ax, plus, v) - 2.0 * v[k] + shape.at_in(ax, minus, v)) /
                       (g.dx(j) * g.dx(j));
            }
            out[k] = v[k] - coef * lap;
        }
    };
    return conjugate_gradient(apply, b, x, "viscous Helmholtz");
}

} // namespace logvisc

// Incompressible momentum stepper on the MAC grid (Chorin projection):
//
//   1. semi-Lagrangian advection of u (RK2 midpoint backtrace),
//   2. explicit body and elastic forcing,  u += dt/rho * div T_el + dt f,
//   3. implicit viscosity,  (I - eta dt / rho lap) u = rhs,
//   4. pressure projection,  lap p = rho/dt div u,  u -= dt/rho grad p.
//
// Every substep is non-expansive in the discrete kinetic energy except the
// forcing (advection interpolates, the implicit solve is dissipative, and
// the projection is an orthogonal projection in the face inner product), so
// the scheme inherits the continuous energy inequality up to the O(dt^2)
// exchange error of the splitting.
#pragma once

#include <functional>

#include "poisson.hpp"
#include "transport.hpp"

namespace logvisc {

enum class Model { solid, fluid, transport_only };

struct FlowParams {
    double rho   = 1.0;
    double eta   = 0.1;
    double kappa = 1.0;
    double tau_r = 0.0; // fluid only
    Model  model = Model::solid;
};

template <int D>
struct FlowState {
    VectorField<D> u;
    ScalarField<D> p;

    FlowState() = default;
    explicit FlowState(const Grid<D>& g) : u(g), p(g) {}
};

/// The elastic part of the stress tensor in chart variables:
///   solid:  kappa log B;   fluid:  kappa (log B - log B_ref).
/// The pressure and viscous parts are handled by the momentum stepper.
template <int D>
inline TensorField<D> elastic_stress(const TransportState<D>& st, const FlowParams& par) {
    TensorField<D> t(st.grid);
    if (par.model == Model::transport_only || par.kappa == 0.0) return t;
    if (par.model == Model::fluid) {
        for (std::int64_t c = 0; c < t.size(); ++c)
            t[c] = par.kappa * (st.chart_b[c] - st.chart_bref[c]);
    } else {
        for (std::int64_t c = 0; c < t.size(); ++c) t[c] = par.kappa * st.chart_b[c];
    }
    return t;
}

struct MomentumInfo {
    int    pressure_iters = 0;
    int    viscous_iters  = 0;
    double div_err        = 0.0; // max |div u| after projection
};

/// One projection step.  `body_force` may be empty.  The elastic stress is
/// applied through tensor_divergence (the discrete adjoint of the transport
/// gradient), keeping the energy exchange between kinetic and elastic
/// reservoirs consistent to O(dt^2) per step.
template <int D>
inline MomentumInfo momentum_step(
    FlowState<D>& fs, const TensorField<D>& stress, const FlowParams& par, double dt,
    const std::type_identity_t<std::function<Vec<D>(const Vec<D>&)>>& body_force = {}) {
    const Grid<D>& g     = fs.u.grid;
    const bool     walls = g.mode == BoundaryMode::no_slip_walls;
    MomentumInfo   info;

    // 1. Advect the velocity field along itself.
    VectorField<D> ustar(g);
    {
        const VectorField<D>& u0 = fs.u;
        for (int ax = 0; ax < D; ++ax) {
            const int last = ustar.faces_along(ax) - 1;
            ustar.for_each_face(ax, [&](const std::array<int, D>& idx) {
                if (walls && (idx[ax] == 0 || idx[ax] == last)) {
                    ustar.ref(ax, idx) = 0.0;
                    return;
                }
                const Vec<D> x    = ustar.face_position(ax, idx);
                const Vec<D> mid  = x - (0.5 * dt) * sample_velocity(u0, x);
                const Vec<D> foot = x - dt * sample_velocity(u0, mid);
                ustar.ref(ax, idx) = sample_velocity_component_cubic(u0, ax, foot);
            });
        }
    }

    // 2. Forcing.
    const bool has_stress = par.kappa != 0.0 && par.model != Model::transport_only;
    if (has_stress) {
        const VectorField<D> f_el = tensor_divergence(stress);
        for (int ax = 0; ax < D; ++ax)
            for (std::size_t k = 0; k < ustar.comp[ax].size(); ++k)
                ustar.comp[ax][k] += (dt / par.rho) * f_el.comp[ax][k];
    }
    if (body_force) {
        for (int ax = 0; ax < D; ++ax) {
            const int last = ustar.faces_along(ax) - 1;
            ustar.for_each_face(ax, [&](const std::array<int, D>& idx) {
                if (walls && (idx[ax] == 0 || idx[ax] == last)) return;
                ustar.ref(ax, idx) += dt * body_force(ustar.face_position(ax, idx))[ax];
            });
        }
    }

    // 3. Implicit viscosity, component by component (warm start from rhs).
    const double coef = par.eta * dt / par.rho;
    for (int ax = 0; ax < D; ++ax) {
        std::vector<double> sol = ustar.comp[ax];
        info.viscous_iters += solve_viscous_component(ustar, ax, coef, ustar.comp[ax], sol);
        ustar.comp[ax] = std::move(sol);
    }

    // 4. Projection.  Warm start from the previous pressure.
    {
        const ScalarField<D> div = mac_divergence(ustar);
        std::vector<double>  b(div.v.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = -(par.rho / dt) * div.v[i];
        info.pressure_iters = solve_pressure_poisson(g, b, fs.p.v);

        for (int ax = 0; ax < D; ++ax) {
            const int last = ustar.faces_along(ax) - 1;
            ustar.for_each_face(ax, [&](const std::array<int, D>& idx) {
                if (walls && (idx[ax] == 0 || idx[ax] == last)) return;
                auto cl = idx;
                cl[ax] -= 1;
                cl[ax]       = g.fold(cl[ax], ax);
                auto cr      = idx;
                cr[ax]       = g.fold(cr[ax], ax);
                const double gp =
                    (fs.p.v[g.cell_index(cr)] - fs.p.v[g.cell_index(cl)]) / g.dx(ax);
                ustar.ref(ax, idx) -= (dt / par.rho) * gp;
            });
        }
    }
    fs.u = std::move(ustar);
    info.div_err = max_abs(mac_divergence(fs.u));
    return info;
}

/// Stable-step heuristic: safety * min(advective CFL bound, elastic wave
/// bound dx sqrt(rho/kappa) / 2).  Viscosity is implicit and contributes no
/// restriction.  Returns +infinity when nothing restricts the step (the
/// caller must then supply dt explicitly).
template <int D>
inline double cfl_dt(const Grid<D>& g, double max_speed, const FlowParams& par,
                     double cfl = 0.5) {
    double dx_min = g.dx(0);
    for (int ax = 1; ax < D; ++ax) dx_min = std::min(dx_min, g.dx(ax));
    double dt = std::numeric_limits<double>::infinity();
    if (max_speed > 0.0) dt = std::min(dt, dx_min / max_speed);
    if (par.kappa > 0.0 && par.model != Model::transport_only)
        dt = std::min(dt, 0.5 * dx_min * std::sqrt(par.rho / par.kappa));
    return cfl * dt;
}

} // namespace logvisc

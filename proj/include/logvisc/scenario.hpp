#pragma once
// Initial data and driving terms for the shipped scenarios.
//
// Each scenario produces: the initial transported state (chart of B, and of
// B_ref when tau_r > 0), the initial velocity/pressure, an optional
// prescribed analytic flow (transport-only scenarios bypass the momentum
// solver entirely and advect along the exact closed-form velocity), and an
// optional body force (lid_cavity's forcing band).

#include <cmath>
#include <functional>

#include "config.hpp"
#include "flowfield.hpp"
#include "transport.hpp"

namespace logvisc {

struct ScenarioSetup {
    TransportState<2>                        state;
    FlowState<2>                             fs;
    bool                                     prescribed = false;
    AnalyticFlow<2>                          flow;  // valid iff prescribed
    std::function<Vec<2>(const Vec<2>&)>     body_force;  // may be empty

    explicit ScenarioSetup(const Grid<2>& g) : state(g), fs(g), flow(zero_flow(g)) {}
};

namespace detail {

/// Smooth, low-frequency, traceless chart bump.  Periodic in both axes so
/// it is admissible under either boundary mode.
inline SymTensor<2> chart_bump(double amp, const Vec<2>& x, const Vec<2>& box) {
    const double kx = 2.0 * M_PI / box[0];
    const double ky = 2.0 * M_PI / box[1];
    const double s1 = std::sin(kx * x[0]) * std::sin(ky * x[1]);
    const double s2 = 0.5 * std::cos(kx * x[0]) * std::sin(2.0 * ky * x[1]);
    SymTensor<2> l{};
    l.at(0, 0) = amp * s1;
    l.at(1, 1) = -amp * s1;
    l.at(0, 1) = amp * s2;
    return l;
}

inline void fill_chart_bump(TensorField<2>& chart, double amp) {
    const Grid<2>& g = chart.grid;
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
        chart[c] = chart_bump(amp, g.cell_center(g.cell_coords(c)), g.length);
}

/// Divergence-free MAC velocity from a node stream function: compact
/// differences of psi make the discrete divergence vanish by telescoping.
/// psi is zero on the boundary in wall mode, so normal wall faces get 0.
inline void fill_stream_velocity(VectorField<2>& u, double amp) {
    const Grid<2>& g  = u.grid;
    const double   dx = g.dx(0), dy = g.dx(1);
    const double   kx = 2.0 * M_PI / g.length[0];
    const double   ky = 2.0 * M_PI / g.length[1];
    // Fold periodic node indices so wrapped psi evaluations reuse the exact
    // same floating-point values and the MAC divergence cancels bitwise.
    auto psi = [&](int i, int j) {
        if (g.mode == BoundaryMode::periodic) {
            i %= g.n[0];
            j %= g.n[1];
        }
        return amp / (kx * ky) * std::sin(kx * i * dx) * std::sin(ky * j * dy);
    };
    u.for_each_face(0, [&](const std::array<int, 2>& idx) {
        u.ref(0, idx) = (psi(idx[0], idx[1] + 1) - psi(idx[0], idx[1])) / dy;
    });
    u.for_each_face(1, [&](const std::array<int, 2>& idx) {
        u.ref(1, idx) = -(psi(idx[0] + 1, idx[1]) - psi(idx[0], idx[1])) / dx;
    });
}

/// Taylor-Green initial velocity tuned so the *discrete* MAC divergence is
/// exactly zero: the y-amplitude carries the ratio of the one-sided
/// difference symbols sin(k h/2)/h of the two axes.
inline void fill_taylor_green(VectorField<2>& u) {
    const Grid<2>& g  = u.grid;
    const double   dx = g.dx(0), dy = g.dx(1);
    const double   kx = 2.0 * M_PI / g.length[0];
    const double   ky = 2.0 * M_PI / g.length[1];
    const double   alpha = (std::sin(0.5 * kx * dx) / dx) / (std::sin(0.5 * ky * dy) / dy);
    u.for_each_face(0, [&](const std::array<int, 2>& idx) {
        const Vec<2> x = u.face_position(0, idx);
        u.ref(0, idx)  = std::sin(kx * x[0]) * std::cos(ky * x[1]);
    });
    u.for_each_face(1, [&](const std::array<int, 2>& idx) {
        const Vec<2> x = u.face_position(1, idx);
        u.ref(1, idx)  = -alpha * std::cos(kx * x[0]) * std::sin(ky * x[1]);
    });
}

}  // namespace detail

inline ScenarioSetup make_scenario(const SimConfig& cfg) {
    const Grid<2> g = cfg.make_grid();
    ScenarioSetup s(g);
    const Vec<2>  box{cfg.length_x, cfg.length_y};

    switch (cfg.scenario) {
        case Scenario::rest_strained: {
            detail::fill_chart_bump(s.state.chart_b, cfg.strain_amplitude);
            if (cfg.has_bref()) {
                s.state.enable_bref();
                s.state.chart_bref = s.state.chart_b;
            }
            if (cfg.u0_amplitude != 0.0) detail::fill_stream_velocity(s.fs.u, cfg.u0_amplitude);
            break;
        }
        case Scenario::taylor_green: {
            detail::fill_taylor_green(s.fs.u);
            break;  // chart stays zero: B = I
        }
        case Scenario::lid_cavity: {
            // Compactly supported C-infinity forcing band one band-width
            // below the top wall; drives a cavity circulation like a moving
            // lid while vanishing smoothly at the wall itself.
            const double ly = cfg.length_y;
            const double w  = 0.1 * ly;
            const double f0 = cfg.lid_speed;
            s.body_force = [ly, w, f0](const Vec<2>& x) {
                const double z = (ly - x[1]) / w - 1.0;
                Vec<2>       f{};
                if (std::abs(z) < 1.0) f[0] = f0 * std::exp(1.0 - 1.0 / (1.0 - z * z));
                return f;
            };
            break;
        }
        case Scenario::uniform_shear_prescribed: {
            if (cfg.initial_strain == InitialStrain::bump)
                detail::fill_chart_bump(s.state.chart_b, cfg.strain_amplitude);
            if (cfg.has_bref()) {
                s.state.enable_bref();
                s.state.chart_bref = s.state.chart_b;
            }
            const double gdot = cfg.shear_rate;
            const double cy   = 0.5 * cfg.length_y;
            s.prescribed = true;
            s.flow       = AnalyticFlow<2>{
                g,
                [gdot, cy](const Vec<2>& x) { return Vec<2>{gdot * (x[1] - cy), 0.0}; },
                [gdot](const Vec<2>&) {
                    Mat<2> m{};
                    m(0, 1) = gdot;
                    return m;
                }};
            break;
        }
        case Scenario::rigid_rotation_prescribed: {
            SymTensor<2> l{};
            l.at(0, 0) = cfg.strain_amplitude;
            l.at(1, 1) = -cfg.strain_amplitude;
            for (std::int64_t c = 0; c < g.cell_count(); ++c) s.state.chart_b[c] = l;
            if (cfg.has_bref()) {
                s.state.enable_bref();
                s.state.chart_bref = s.state.chart_b;
            }
            const double om = cfg.rotation_rate;
            const double cx = 0.5 * cfg.length_x;
            const double cy = 0.5 * cfg.length_y;
            s.prescribed = true;
            s.flow       = AnalyticFlow<2>{
                g,
                [om, cx, cy](const Vec<2>& x) {
                    return Vec<2>{-om * (x[1] - cy), om * (x[0] - cx)};
                },
                [om](const Vec<2>&) {
                    Mat<2> m{};
                    m(0, 1) = -om;
                    m(1, 0) = om;
                    return m;
                }};
            break;
        }
        case Scenario::relaxation_uniform: {
            SymTensor<2> l{};
            l.at(0, 0) = cfg.strain_amplitude;
            l.at(1, 1) = -cfg.strain_amplitude;
            for (std::int64_t c = 0; c < g.cell_count(); ++c) s.state.chart_b[c] = l;
            s.state.enable_bref();  // starts at the zero chart: B_ref = I
            s.prescribed = true;
            s.flow       = zero_flow(g);
            break;
        }
    }
    return s;
}

}  // namespace logvisc

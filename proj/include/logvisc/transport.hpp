// Strain transport in chart (log) space.
//
// The elastic state B and relaxed state B_ref are stored as their matrix
// logarithms L = log B and L_ref = log B_ref: symmetric, traceless fields.
// A time step is a Strang split:
//
//   half advection  ->  full congruence source  ->  half advection
//
// Advection is semi-Lagrangian (RK2 midpoint backtrace, multilinear chart
// interpolation); linearity of the interpolation keeps the charts traceless,
// so interpolated states have unit determinant exactly.  The source step
// updates the SPD representatives by congruence,
//
//   B     <-  E B E^T,                 E = exp(dt grad u),
//   B_ref <-  E_ref B_ref E_ref^T,     E_ref = exp(dt A),
//   A  =  Q(B, grad u) + (log B - log B_ref) / tau_r,
//
// which solves D_t B = grad u B + B grad u^T exactly for frozen grad u and
// preserves det = 1 whenever the generator is traceless (tr Q = 0 by
// construction; the relaxation difference is traceless up to round-off).
// The B_ref generator depends on the evolving state, so it is advanced with
// an exponential midpoint rule (second order).  No determinant projection is
// ever applied behind the caller's back.
#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include "commutant.hpp"
#include "flowfield.hpp"

namespace logvisc {

template <int D>
struct TransportState {
    Grid<D>        grid;
    TensorField<D> chart_b;
    bool           has_bref = false;
    TensorField<D> chart_bref;
    bool           has_f = false;
    MatField<D>    def_grad;
    double         time = 0.0;

    explicit TransportState(const Grid<D>& g) : grid(g), chart_b(g) {}
    TransportState() = default;

    void enable_bref() {
        has_bref   = true;
        chart_bref = TensorField<D>(grid);
    }
    void enable_f() {
        has_f    = true;
        def_grad = MatField<D>(grid);
        for (std::int64_t c = 0; c < def_grad.size(); ++c) def_grad[c] = Mat<D>::identity();
    }
};

namespace detail {

/// parallel_for that captures the first exception thrown by any iteration
/// and rethrows it on the calling thread.
inline void parallel_for_throwing(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    std::mutex       mu;
    std::string      first_error;
    std::atomic_bool failed{false};
    parallel_for(n, [&](std::int64_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            fn(i);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failed.exchange(true)) first_error = e.what();
        }
    });
    if (failed) throw SolverError(first_error);
}

template <std::size_t D, class Flow>
inline std::array<double, D> backtrace(const Flow& flow, const std::array<double, D>& x,
                                       double dt) {
    const std::array<double, D> umid = flow.velocity(x - (0.5 * dt) * flow.velocity(x));
    return x - dt * umid;
}

} // namespace detail

/// Semi-Lagrangian advection of a cell-centered chart field: RK2 midpoint
/// backtrace along the flow, multilinear interpolation at the foot.
/// Unconditionally stable; callers keep u dt / dx <= 1 so feet stay within
/// one cell of the departure point.
template <int D, class Flow>
inline TensorField<D> advect_semi_lagrangian(const TensorField<D>& f, const Flow& flow,
                                             double dt) {
    TensorField<D> out(f.grid);
    detail::parallel_for_throwing(f.size(), [&](std::int64_t c) {
        const Vec<D> x = f.grid.cell_center(f.grid.cell_coords(c));
        out[c]         = sample_chart(f, detail::backtrace(flow, x, dt));
    });
    return out;
}

namespace detail {

/// Advect every active field of a state with a single backtrace per cell.
template <int D, class Flow>
inline void advect_all(TransportState<D>& st, const Flow& flow, double dt) {
    const Grid<D>& g = st.grid;
    TensorField<D> b_new(g);
    TensorField<D> r_new(st.has_bref ? g : Grid<D>{});
    MatField<D>    f_new(st.has_f ? g : Grid<D>{});
    parallel_for_throwing(st.chart_b.size(), [&](std::int64_t c) {
        const Vec<D> x    = g.cell_center(g.cell_coords(c));
        const Vec<D> foot = backtrace(flow, x, dt);
        b_new[c]          = sample_chart(st.chart_b, foot);
        if (st.has_bref) r_new[c] = sample_chart(st.chart_bref, foot);
        if (st.has_f) {
            // Componentwise multilinear sample of the deformation gradient.
            Mat<D> m;
            const Grid<D>&        gg = g;
            std::array<int, D>    base{};
            std::array<double, D> frac{};
            for (int ax = 0; ax < D; ++ax) {
                const double s  = foot[ax] / gg.dx(ax) - 0.5;
                const double fl = std::floor(s);
                base[ax] = static_cast<int>(fl);
                frac[ax] = s - fl;
            }
            for (int corner = 0; corner < (1 << D); ++corner) {
                double             w = 1.0;
                std::array<int, D> idx{};
                for (int ax = 0; ax < D; ++ax) {
                    const int bit = (corner >> ax) & 1;
                    w *= bit ? frac[ax] : 1.0 - frac[ax];
                    idx[ax] = gg.fold(base[ax] + bit, ax);
                }
                const Mat<D>& corner_val = st.def_grad[gg.cell_index(idx)];
                for (int k = 0; k < D * D; ++k) m.a[k] += w * corner_val.a[k];
            }
            f_new[c] = m;
        }
    });
    st.chart_b = std::move(b_new);
    if (st.has_bref) st.chart_bref = std::move(r_new);
    if (st.has_f) st.def_grad = std::move(f_new);
}

/// Congruence source at one cell for the full step dt.  B alone is exact
/// for frozen grad u; the (B, B_ref) pair uses an exponential midpoint for
/// the state-dependent B_ref generator.
template <int D>
inline void source_cell(SymTensor<D>& chart_b, SymTensor<D>* chart_bref, Mat<D>* f,
                        const Mat<D>& grad, double dt, double tau_r) {
    const Mat<D>       e_full = mat_exp_general(dt * grad);
    const SymTensor<D> b      = mat_exp_sym(chart_b);

    if (chart_bref) {
        const SymTensor<D> l    = chart_b;
        const SymTensor<D> lref = *chart_bref;
        const SymTensor<D> bref = mat_exp_sym(lref);

        // Midpoint states.
        const Mat<D>       e_half = mat_exp_general((0.5 * dt) * grad);
        const SymTensor<D> b_mid  = congruence(e_half, b);
        const SymTensor<D> l_mid  = mat_log_spd(b_mid);

        const Mat<D> a0 = project_Q(b, grad) + (1.0 / tau_r) * to_mat(l - lref);
        const SymTensor<D> bref_mid = congruence(mat_exp_general((0.5 * dt) * a0), bref);
        const SymTensor<D> lref_mid = mat_log_spd(bref_mid);

        const Mat<D> a_mid =
            project_Q(b_mid, grad) + (1.0 / tau_r) * to_mat(l_mid - lref_mid);
        *chart_bref = mat_log_spd(congruence(mat_exp_general(dt * a_mid), bref));
    }

    chart_b = mat_log_spd(congruence(e_full, b));
    if (f) *f = e_full * (*f);
}

} // namespace detail

/// One Strang-split transport step of all active fields (B, optionally
/// B_ref with relaxation time tau_r > 0, optionally the deformation
/// gradient F).  Exponential blow-up (chart eigenvalues beyond 300) raises
/// SolverError naming the offending cell.
template <int D, class Flow>
inline void step_transport(TransportState<D>& st, const Flow& flow, double dt, double tau_r) {
    if (st.has_bref && !(tau_r > 0.0))
        throw ConfigError("step_transport: relaxed state requires tau_r > 0");
    detail::advect_all(st, flow, 0.5 * dt);
    const Grid<D>& g = st.grid;
    detail::parallel_for_throwing(st.chart_b.size(), [&](std::int64_t c) {
        try {
            detail::source_cell<D>(st.chart_b[c],
                                   st.has_bref ? &st.chart_bref[c] : nullptr,
                                   st.has_f ? &st.def_grad[c] : nullptr,
                                   flow.cell_gradient(c), dt, tau_r);
        } catch (const SolverError& e) {
            const auto idx = g.cell_coords(c);
            std::string where = "cell (";
            for (int ax = 0; ax < D; ++ax)
                where += std::to_string(idx[ax]) + (ax + 1 < D ? ", " : ")");
            throw SolverError(std::string(e.what()) + " at " + where +
                              ", t = " + std::to_string(st.time));
        }
    });
    detail::advect_all(st, flow, 0.5 * dt);
    st.time += dt;
}

/// Convenience stepper for a lone B field.
template <int D, class Flow>
inline void step_b(TensorField<D>& chart_b, const Flow& flow, double dt) {
    TransportState<D> st(chart_b.grid);
    st.chart_b = chart_b;
    step_transport(st, flow, dt, 0.0);
    chart_b = std::move(st.chart_b);
}

// -------------------------------------------------------- rate residuals ---

enum class RateKind { corotational, lower_convected, upper_convected, contravariant };

inline const char* rate_name(RateKind k) {
    switch (k) {
        case RateKind::corotational:    return "corotational";
        case RateKind::lower_convected: return "lower_convected";
        case RateKind::upper_convected: return "upper_convected";
        case RateKind::contravariant:   return "contravariant";
    }
    return "?";
}

/// Algebraic part of an objective rate: the terms added to the material
/// derivative.  W and D are the antisymmetric/symmetric parts of grad u.
///   corotational:     + (A W - W A)
///   lower_convected:  + (A grad u + grad u^T A)
///   upper_convected:  - (grad u A + A grad u^T)   [annihilates the B law]
///   contravariant:    - (A grad u + grad u^T A)
template <int D>
inline SymTensor<D> rate_terms(RateKind kind, const SymTensor<D>& a, const Mat<D>& grad) {
    const Mat<D> am = to_mat(a);
    switch (kind) {
        case RateKind::corotational: {
            const Mat<D> w = asym_part(grad);
            return sym_part(am * w - w * am);
        }
        case RateKind::lower_convected:
            return sym_part(am * grad + grad.transposed() * am);
        case RateKind::upper_convected:
            return -1.0 * sym_part(grad * am + am * grad.transposed());
        case RateKind::contravariant:
            return -1.0 * sym_part(am * grad + grad.transposed() * am);
    }
    return SymTensor<D>{};
}

/// Discrete objective-rate residual of an SPD-role evolution, given chart
/// snapshots at t and t + dt.  The material derivative is approximated by
/// backtracing each cell center and differencing against the chart-
/// interpolated foot value; algebraic terms use the midpoint average.  For
/// a field evolved by the B law the upper-convected residual converges to
/// zero at first order in (dt, dx) jointly.
template <int D, class Flow>
inline TensorField<D> objective_rate_residual(RateKind kind, const TensorField<D>& chart_before,
                                              const TensorField<D>& chart_after,
                                              const Flow& flow, double dt) {
    const Grid<D>& g = chart_after.grid;
    TensorField<D> res(g);
    detail::parallel_for_throwing(res.size(), [&](std::int64_t c) {
        const Vec<D> x    = g.cell_center(g.cell_coords(c));
        const Vec<D> foot = detail::backtrace(flow, x, dt);
        const SymTensor<D> b_after = mat_exp_sym(chart_after[c]);
        const SymTensor<D> b_foot  = mat_exp_sym(sample_chart(chart_before, foot));
        const SymTensor<D> dt_term = (1.0 / dt) * (b_after - b_foot);
        const SymTensor<D> b_mid   = 0.5 * (b_after + b_foot);
        res[c] = dt_term + rate_terms(kind, b_mid, flow.cell_gradient(c));
    });
    return res;
}

/// Residual of the chart-space evolution law
///   D_t log B = Omega log B - log B Omega + 2 S,
/// with (Omega, K, S) from decompose_grad at the midpoint state.  Cells
/// where the split is degenerate are skipped and counted.
template <int D>
struct LogEvolutionResidual {
    TensorField<D> field;
    double         l2 = 0.0;
    std::int64_t   skipped = 0;
};

template <int D, class Flow>
inline LogEvolutionResidual<D> log_evolution_residual(const TensorField<D>& chart_before,
                                                      const TensorField<D>& chart_after,
                                                      const Flow& flow, double dt) {
    const Grid<D>& g = chart_after.grid;
    LogEvolutionResidual<D> out;
    out.field = TensorField<D>(g);
    std::atomic<std::int64_t> skipped{0};
    detail::parallel_for_throwing(out.field.size(), [&](std::int64_t c) {
        const Vec<D> x    = g.cell_center(g.cell_coords(c));
        const Vec<D> foot = detail::backtrace(flow, x, dt);
        const SymTensor<D> l_after = chart_after[c];
        const SymTensor<D> l_foot  = sample_chart(chart_before, foot);
        const SymTensor<D> l_mid   = 0.5 * (l_after + l_foot);
        try {
            const GradSplit<D> split = decompose_grad(mat_exp_sym(l_mid), flow.cell_gradient(c));
            const Mat<D> lm     = to_mat(l_mid);
            const SymTensor<D> rhs =
                sym_part(split.omega * lm - lm * split.omega) + 2.0 * split.s;
            out.field[c] = (1.0 / dt) * (l_after - l_foot) - rhs;
        } catch (const DegenerateSplit&) {
            skipped.fetch_add(1, std::memory_order_relaxed);
            out.field[c] = SymTensor<D>{};
        }
    });
    out.skipped = skipped.load();
    out.l2      = l2_norm(out.field);
    return out;
}

// ------------------------------------------------------ tangency pairing ---

/// Integral of tr(B^{-1} (grad u B + B grad u^T)) over the domain, together
/// with 2 * integral of tr grad u.  Pointwise the two integrands agree
/// identically, so for divergence-free flows the pairing vanishes: the B
/// evolution is tangent to the unit-determinant manifold.
template <int D>
struct TangencyResult {
    double pairing     = 0.0; // integral of tr(B^{-1}(G B + B G^T))
    double two_int_div = 0.0; // 2 integral tr G
    double scale       = 0.0; // integral of |G|_F, for relative thresholds
};

template <int D, class Flow>
inline TangencyResult<D> tangency_residual(const TensorField<D>& chart_b, const Flow& flow) {
    const Grid<D>& g   = chart_b.grid;
    const double   vol = g.cell_volume();
    KahanSum       pair, divsum, scale;
    for (std::int64_t c = 0; c < chart_b.size(); ++c) {
        const SpectralDecomp<D> dec = eig_sym(chart_b[c]);
        const SymTensor<D> b    = assemble_from_eigen(dec, [](double x) { return std::exp(x); });
        const SymTensor<D> binv = assemble_from_eigen(dec, [](double x) { return std::exp(-x); });
        const Mat<D>       grad = flow.cell_gradient(c);
        const Mat<D> flux = grad * to_mat(b) + to_mat(b) * grad.transposed();
        pair.add((to_mat(binv) * flux).trace());
        divsum.add(2.0 * grad.trace());
        scale.add(frobenius(grad));
    }
    TangencyResult<D> r;
    r.pairing     = pair.value() * vol;
    r.two_int_div = divsum.value() * vol;
    r.scale       = scale.value() * vol;
    return r;
}

} // namespace logvisc

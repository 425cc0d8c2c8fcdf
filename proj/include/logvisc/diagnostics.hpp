// Energy and a-priori-bound bookkeeping.
//
// Conventions (matching the continuous estimates the checks mirror):
//   kinetic   = rho * ||u||_L2^2            (note: twice the conventional KE)
//   elastic   = kappa/2 * ||log B||^2                (solid)
//             = kappa/2 * ||log B - log B_ref||^2    (fluid)
//   viscous_cum = integral_0^t 4 eta ||D||^2
//   plastic_cum = integral_0^t 2 kappa / tau_r ||log B - log B_ref||^2
//
// The two recorded a-priori bounds, with T the record time and all norms
// spatial L2:
//   b33:  max_{s<=t} ||log B||^2  <=  16 T int ||grad u||^2 + 2 ||log B_0||^2
//   b52:  max_{s<=t} ||log B_ref||^2
//           <= 32 T int ||grad u||^2 + (32 T^2 / tau_r^2) max_{s<=t} ||log B||^2
//              + 2 ||log B_0||^2
// Both hold for every horizon, so each CSV row carries a self-contained
// check.  Time integrals are trapezoid rules over steps with compensated
// accumulation.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "flow.hpp"

namespace logvisc {

struct EnergyRecord {
    double t           = 0.0;
    double kinetic     = 0.0;
    double elastic     = 0.0;
    double viscous_cum = 0.0;
    double plastic_cum = 0.0;
    double det_err_max = 0.0;
    double div_err_max = 0.0;
    double b33_lhs     = 0.0;
    double b33_rhs     = 0.0;
    double b52_lhs     = 0.0;
    double b52_rhs     = 0.0;
};

inline constexpr const char* kCsvHeader =
    "t,kinetic,elastic,viscous_cum,plastic_cum,det_err_max,div_err_max,"
    "b33_lhs,b33_rhs,b52_lhs,b52_rhs";

inline std::string csv_row(const EnergyRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  r.t, r.kinetic, r.elastic, r.viscous_cum, r.plastic_cum, r.det_err_max,
                  r.div_err_max, r.b33_lhs, r.b33_rhs, r.b52_lhs, r.b52_rhs);
    return buf;
}

/// Per-step sampled quantities feeding the accumulators.
struct StepSample {
    double gradu_sq = 0.0; // ||grad u||_L2^2 at this instant
    double d_sq     = 0.0; // ||D||_L2^2
    double logb_sq  = 0.0; // ||log B||_L2^2
    double lref_sq  = 0.0; // ||log B_ref||_L2^2
    double ldiff_sq = 0.0; // ||log B - log B_ref||_L2^2
};

struct Diagnostics {
    FlowParams par;
    double     logb0_sq = 0.0;
    double     kinetic0 = 0.0;
    double     elastic0 = 0.0;

    TrapezoidIntegral visc;    // 4 eta ||D||^2
    TrapezoidIntegral plastic; // 2 kappa / tau_r ||L - L_ref||^2
    TrapezoidIntegral gradu;   // ||grad u||^2
    double            b33_max = 0.0;
    double            b52_max = 0.0;

    void start(const StepSample& s0, double kinetic_init) {
        logb0_sq = s0.logb_sq;
        kinetic0 = kinetic_init;
        elastic0 = par.model == Model::fluid ? 0.5 * par.kappa * s0.ldiff_sq
                                             : 0.5 * par.kappa * s0.logb_sq;
        visc.start(4.0 * par.eta * s0.d_sq);
        if (par.tau_r > 0.0) plastic.start(2.0 * par.kappa / par.tau_r * s0.ldiff_sq);
        gradu.start(s0.gradu_sq);
        b33_max = s0.logb_sq;
        b52_max = s0.lref_sq;
    }

    void advance(const StepSample& s, double dt) {
        visc.advance(4.0 * par.eta * s.d_sq, dt);
        if (par.tau_r > 0.0) plastic.advance(2.0 * par.kappa / par.tau_r * s.ldiff_sq, dt);
        gradu.advance(s.gradu_sq, dt);
        b33_max = std::max(b33_max, s.logb_sq);
        b52_max = std::max(b52_max, s.lref_sq);
    }

    EnergyRecord make_record(double t, const StepSample& s, double kinetic, double det_err,
                             double div_err, bool has_bref) const {
        EnergyRecord r;
        r.t       = t;
        r.kinetic = kinetic;
        r.elastic = par.model == Model::fluid ? 0.5 * par.kappa * s.ldiff_sq
                                              : 0.5 * par.kappa * s.logb_sq;
        r.viscous_cum = visc.value();
        r.plastic_cum = par.tau_r > 0.0 ? plastic.value() : 0.0;
        r.det_err_max = det_err;
        r.div_err_max = div_err;
        r.b33_lhs     = b33_max;
        r.b33_rhs     = 16.0 * t * gradu.value() + 2.0 * logb0_sq;
        if (has_bref) {
            r.b52_lhs = b52_max;
            r.b52_rhs = 32.0 * t * gradu.value() +
                        (32.0 * t * t / (par.tau_r * par.tau_r)) * b33_max + 2.0 * logb0_sq;
        }
        return r;
    }
};

// ----------------------------------------------------------------- checks ---

struct CheckOutcome {
    bool        ok = true;
    double      worst_ratio = 0.0;
    double      worst_t     = 0.0;
    std::string detail;
};

/// Energy inequality against the initial reservoir:
///   solid:  kinetic + elastic + viscous_cum            <= kinetic0 + elastic0
///   fluid:  kinetic + elastic + viscous_cum + plastic_cum <= kinetic0 + elastic0
/// (fluid with B(0) = B_ref(0) has elastic0 = 0, reducing the right side to
/// rho ||u_0||^2).  Tolerated up to a relative margin.
inline CheckOutcome check_energy_inequality(const std::vector<EnergyRecord>& recs, Model model,
                                            double margin) {
    CheckOutcome out;
    if (recs.empty()) return out;
    const double rhs   = recs.front().kinetic + recs.front().elastic;
    const double floor = std::max(rhs, 1e-300);
    for (const auto& r : recs) {
        double lhs = r.kinetic + r.elastic + r.viscous_cum;
        if (model == Model::fluid) lhs += r.plastic_cum;
        const double ratio = lhs / floor;
        if (ratio > out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst_t     = r.t;
        }
    }
    out.ok     = out.worst_ratio <= 1.0 + margin;
    out.detail = "worst LHS/RHS = " + std::to_string(out.worst_ratio) +
                 " at t = " + std::to_string(out.worst_t);
    return out;
}

/// Per-step monotonicity of the closed-system energy (used by the solid
/// no-forcing scenario): total never rises by more than tol_rel relative to
/// the current level.
inline CheckOutcome check_energy_monotone(const std::vector<EnergyRecord>& recs, Model model,
                                          double tol_rel) {
    CheckOutcome out;
    double       prev = 0.0;
    bool         have = false;
    for (const auto& r : recs) {
        double total = r.kinetic + r.elastic + r.viscous_cum;
        if (model == Model::fluid) total += r.plastic_cum;
        if (have) {
            const double rise = (total - prev) / std::max(prev, 1e-300);
            if (rise > out.worst_ratio) {
                out.worst_ratio = rise;
                out.worst_t     = r.t;
            }
        }
        prev = total;
        have = true;
    }
    out.ok     = out.worst_ratio <= tol_rel;
    out.detail = "worst relative rise per record = " + std::to_string(out.worst_ratio) +
                 " at t = " + std::to_string(out.worst_t);
    return out;
}

/// A-priori bound columns: every record must satisfy LHS <= RHS (1+margin).
inline CheckOutcome check_apriori_bounds(const std::vector<EnergyRecord>& recs, bool has_bref,
                                         double margin) {
    CheckOutcome out;
    for (const auto& r : recs) {
        const double r33 = r.b33_lhs / std::max(r.b33_rhs, 1e-300);
        if (r33 > out.worst_ratio) {
            out.worst_ratio = r33;
            out.worst_t     = r.t;
        }
        if (has_bref) {
            const double r52 = r.b52_lhs / std::max(r.b52_rhs, 1e-300);
            if (r52 > out.worst_ratio) {
                out.worst_ratio = r52;
                out.worst_t     = r.t;
            }
        }
    }
    out.ok     = out.worst_ratio <= 1.0 + margin;
    out.detail = "worst LHS/RHS = " + std::to_string(out.worst_ratio) +
                 " at t = " + std::to_string(out.worst_t);
    return out;
}

} // namespace logvisc

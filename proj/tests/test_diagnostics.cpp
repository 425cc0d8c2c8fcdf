// Diagnostics checks: trapezoid accumulation against closed forms, the CSV
// schema frozen byte-for-byte, and the pass/fail logic of the energy and
// a-priori bound checks on hand-built records.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "logvisc/diagnostics.hpp"
#include "logvisc/verify.hpp"

using namespace logvisc;

TEST_CASE("TrapezoidIntegral: exact on piecewise-linear integrands") {
    // f(t) = 2t + 1 on [0, 1] in ten steps: integral 2.
    TrapezoidIntegral ti;
    ti.start(1.0);
    for (int k = 1; k <= 10; ++k) ti.advance(2.0 * (0.1 * k) + 1.0, 0.1);
    CHECK(ti.value() == Catch::Approx(2.0).epsilon(1e-14));

    // Constant integrand: value = c T regardless of step sizes.
    TrapezoidIntegral tc;
    tc.start(3.5);
    tc.advance(3.5, 0.25);
    tc.advance(3.5, 0.5);
    tc.advance(3.5, 0.125);
    CHECK(tc.value() == Catch::Approx(3.5 * 0.875).epsilon(1e-15));
}

TEST_CASE("CSV schema: header and row format are frozen") {
    CHECK(std::string(kCsvHeader) ==
          "t,kinetic,elastic,viscous_cum,plastic_cum,det_err_max,div_err_max,"
          "b33_lhs,b33_rhs,b52_lhs,b52_rhs");

    EnergyRecord r;
    r.t           = 1.5;
    r.kinetic     = 2.0;
    r.elastic     = 3.0;
    r.viscous_cum = 4.0;
    r.plastic_cum = 5.0;
    r.det_err_max = 6.0;
    r.div_err_max = 7.0;
    r.b33_lhs     = 8.0;
    r.b33_rhs     = 9.0;
    r.b52_lhs     = 10.0;
    r.b52_rhs     = 11.0;
    CHECK(csv_row(r) == "1.5,2,3,4,5,6,7,8,9,10,11");

    // Round-trippable precision: 17 significant digits survive.
    EnergyRecord p;
    p.t = 0.1;
    CHECK(csv_row(p).substr(0, 19) == "0.10000000000000001");
}

TEST_CASE("Diagnostics: closed forms for constant samples") {
    FlowParams par;
    par.kappa = 2.0;
    par.eta   = 0.3;
    par.tau_r = 2.0;
    par.model = Model::fluid;

    StepSample s;
    s.gradu_sq = 1.5;
    s.d_sq     = 0.7;
    s.logb_sq  = 0.9;
    s.lref_sq  = 0.4;
    s.ldiff_sq = 0.25;

    Diagnostics diag;
    diag.par = par;
    diag.start(s, 3.0);
    const double dt = 0.1;
    const int    n  = 20;
    for (int k = 0; k < n; ++k) diag.advance(s, dt);
    const double t = n * dt;

    const auto r = diag.make_record(t, s, 3.0, 0.0, 0.0, true);
    CHECK(r.viscous_cum == Catch::Approx(4.0 * 0.3 * 0.7 * t).epsilon(1e-13));
    CHECK(r.plastic_cum == Catch::Approx(2.0 * 2.0 / 2.0 * 0.25 * t).epsilon(1e-13));
    CHECK(r.elastic == Catch::Approx(0.5 * 2.0 * 0.25).epsilon(1e-15)); // fluid law
    CHECK(r.b33_lhs == Catch::Approx(0.9).epsilon(1e-15));
    CHECK(r.b33_rhs == Catch::Approx(16.0 * t * (1.5 * t) + 2.0 * 0.9).epsilon(1e-13));
    CHECK(r.b52_lhs == Catch::Approx(0.4).epsilon(1e-15));
    CHECK(r.b52_rhs ==
          Catch::Approx(32.0 * t * (1.5 * t) + (32.0 * t * t / 4.0) * 0.9 + 2.0 * 0.9)
              .epsilon(1e-13));

    // The solid law reads the full log-strain reservoir instead.
    Diagnostics ds;
    ds.par       = par;
    ds.par.model = Model::solid;
    ds.start(s, 3.0);
    CHECK(ds.make_record(0.0, s, 3.0, 0.0, 0.0, false).elastic ==
          Catch::Approx(0.5 * 2.0 * 0.9).epsilon(1e-15));
}

TEST_CASE("check_energy_inequality: pass, fail, and worst-record reporting") {
    auto rec = [](double t, double kin, double ela, double visc, double pla) {
        EnergyRecord r;
        r.t           = t;
        r.kinetic     = kin;
        r.elastic     = ela;
        r.viscous_cum = visc;
        r.plastic_cum = pla;
        return r;
    };

    // Dissipating solid run: passes with zero margin headroom needed.
    std::vector<EnergyRecord> good = {rec(0.0, 2.0, 1.0, 0.0, 0.0),
                                      rec(0.5, 1.2, 1.0, 0.7, 0.0),
                                      rec(1.0, 0.8, 1.1, 1.0, 0.0)};
    const auto ok = check_energy_inequality(good, Model::solid, 0.01);
    CHECK(ok.ok);
    CHECK(ok.worst_ratio <= 1.0);

    // A record exceeding the initial reservoir by 10% fails at 5% margin and
    // is reported with its time.
    std::vector<EnergyRecord> bad = good;
    bad.push_back(rec(1.5, 2.0, 1.1, 0.2, 0.0));
    const auto no = check_energy_inequality(bad, Model::solid, 0.05);
    CHECK_FALSE(no.ok);
    CHECK(no.worst_ratio == Catch::Approx(3.3 / 3.0).epsilon(1e-12));
    CHECK(no.worst_t == 1.5);

    // The fluid variant charges the plastic sink too.
    std::vector<EnergyRecord> fl = {rec(0.0, 2.0, 0.0, 0.0, 0.0),
                                    rec(1.0, 1.0, 0.3, 0.4, 0.5)};
    CHECK(check_energy_inequality(fl, Model::fluid, 0.2).ok);
    fl.push_back(rec(2.0, 1.0, 0.3, 0.4, 0.9));
    CHECK_FALSE(check_energy_inequality(fl, Model::fluid, 0.2).ok);
    CHECK(check_energy_inequality(fl, Model::solid, 0.2).ok); // solid ignores plastic
}

TEST_CASE("check_energy_monotone: relative rises are localized") {
    auto rec = [](double t, double kin) {
        EnergyRecord r;
        r.t       = t;
        r.kinetic = kin;
        return r;
    };
    std::vector<EnergyRecord> recs = {rec(0.0, 4.0), rec(0.1, 3.5), rec(0.2, 3.5001),
                                      rec(0.3, 3.0)};
    CHECK(check_energy_monotone(recs, Model::solid, 1e-4).ok);
    const auto out = check_energy_monotone(recs, Model::solid, 1e-6);
    CHECK_FALSE(out.ok);
    CHECK(out.worst_t == 0.2);
    CHECK(out.worst_ratio == Catch::Approx(0.0001 / 3.5).epsilon(1e-6));
}

TEST_CASE("check_apriori_bounds: both columns, with and without B_ref") {
    auto rec = [](double t, double l33, double r33, double l52, double r52) {
        EnergyRecord r;
        r.t       = t;
        r.b33_lhs = l33;
        r.b33_rhs = r33;
        r.b52_lhs = l52;
        r.b52_rhs = r52;
        return r;
    };
    std::vector<EnergyRecord> recs = {rec(0.0, 1.0, 2.0, 1.0, 2.0),
                                      rec(1.0, 1.5, 2.0, 3.0, 2.0)};
    // Without B_ref only the first column is judged: worst 0.75, passes.
    CHECK(check_apriori_bounds(recs, false, 0.05).ok);
    // With B_ref the 3.0/2.0 violation at t = 1 is caught.
    const auto out = check_apriori_bounds(recs, true, 0.05);
    CHECK_FALSE(out.ok);
    CHECK(out.worst_ratio == Catch::Approx(1.5).epsilon(1e-12));
    CHECK(out.worst_t == 1.0);
}

TEST_CASE("verification suite: diagnostics") {
    const auto suite = verify::run_suite("diagnostics");
    for (const auto& c : suite.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

#pragma once
// Run driver: the time loop with diagnostics, output files, checkpointing,
// resume, and the mollification refinement experiment.
//
// Step ordering (first-order splitting): choose dt (fixed or CFL-derived),
// advance momentum with the stress of the current strain state, then
// transport the strain state along the new velocity, then sample the
// diagnostics.  Prescribed-velocity scenarios skip the momentum solve and
// advect along the exact closed-form flow.
//
// Output tree (under `output_dir`):
//   energy.csv              one row per record (see diagnostics.hpp)
//   manifest.txt            version, config hash, step/record counts
//   snap_<step>_<kind>.bin  field snapshots at snapshot_every cadence
//   final_<kind>.bin/.csv   final state
//   checkpoint_<step>.ckpt  resumable state at checkpoint_every cadence
//
// `stop_after_steps` caps the steps of one invocation (useful to produce a
// checkpoint mid-run); resuming continues toward t_end.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "mollify.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "snapshot.hpp"

namespace logvisc {

struct RunOptions {
    bool write_files  = true;
    bool store_charts = false;  // keep chart_b copies at record times
};

struct RunResult {
    SimConfig                   cfg;
    std::vector<EnergyRecord>   records;
    std::vector<double>         record_times;
    std::vector<TensorField<2>> record_charts;
    TransportState<2>           state;
    FlowState<2>                fs;
    long long                   steps = 0;
    double                      t_final = 0.0;
    double                      det_b_max = 0.0, det_bref_max = 0.0, div_max = 0.0;
    double                      ldiff_sup_sq = 0.0;  // max_t ||log B - log B_ref||_L2^2
    double                      gradu_l2l2   = 0.0;  // int_0^T ||grad u||_L2^2
    std::string                 csv_text;

    explicit RunResult(const Grid<2>& g) : state(g), fs(g) {}
};

class SimDriver {
  public:
    SimDriver(const SimConfig& cfg, const RunOptions& opt)
        : cfg_(cfg),
          opt_(opt),
          grid_(cfg.make_grid()),
          setup_(make_scenario(cfg)),
          par_(cfg.flow_params()),
          state_(setup_.state),
          fs_(setup_.fs),
          rng_(cfg.seed) {
        diag_.par = par_;
    }

    /// Start a brand-new run: mollify initial data, seed the accumulators,
    /// emit the CSV header and the t=0 record.
    void init_fresh() {
        if (cfg_.mollify_scale > 0.0) {
            state_.chart_b = mollify(state_.chart_b, cfg_.mollify_scale);
            if (state_.has_bref)
                state_.chart_bref = mollify(state_.chart_bref, cfg_.mollify_scale);
        }
        last_sample_ = make_sample();
        diag_.start(last_sample_, kinetic_now());
        ldiff_sup_sq_ = last_sample_.ldiff_sq;
        update_det_maxima();
        csv_ = std::string(kCsvHeader) + "\n";
        if (opt_.write_files) {
            std::filesystem::create_directories(cfg_.output_dir);
            csv_file_.open(csv_path(), std::ios::binary | std::ios::trunc);
            if (!csv_file_) throw SolverError("cannot open '" + csv_path() + "' for writing");
            csv_file_ << csv_;
        }
        record();
    }

    /// Continue from a checkpoint.  The caller has already parsed `data`'s
    /// embedded config and constructed this driver from it.
    void init_resume(const CheckpointData& data) {
        adopt_fields(data);
        diag_.logb0_sq = data.logb0_sq;
        diag_.kinetic0 = data.kinetic0;
        diag_.elastic0 = data.elastic0;
        restore_trap(diag_.visc, data.visc);
        restore_trap(diag_.plastic, data.plastic);
        restore_trap(diag_.gradu, data.gradu);
        diag_.b33_max = data.b33_max;
        diag_.b52_max = data.b52_max;
        ldiff_sup_sq_ = data.ldiff_sup_sq;
        det_b_max_    = data.det_b_max;
        det_bref_max_ = data.det_bref_max;
        div_max_      = data.div_max;
        rng_.state    = data.rng_state;
        step_         = data.step;
        t_            = data.time;
        state_.time   = data.time;
        last_sample_  = make_sample();

        // Reconcile the CSV: the stored prefix must match what is on disk.
        std::ifstream in(csv_path(), std::ios::binary);
        if (!in) throw SolverError("resume: cannot open '" + csv_path() + "'");
        std::string on_disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        if (on_disk.size() < data.csv_offset)
            throw SolverError("resume: '" + csv_path() + "' is shorter than the checkpoint expects");
        csv_ = on_disk.substr(0, data.csv_offset);
        if (fnv1a64(csv_) != data.csv_hash)
            throw SolverError("resume: CSV content hash mismatch; refusing to resume");
        if (opt_.write_files) {
            csv_file_.open(csv_path(), std::ios::binary | std::ios::trunc);
            if (!csv_file_) throw SolverError("cannot reopen '" + csv_path() + "' for writing");
            csv_file_ << csv_;
        }
    }

    RunResult run() {
        while (!done()) {
            const double dt = choose_dt();
            advance_one_step(dt);
            if (step_ % cfg_.record_every == 0 || done()) record();
            if (opt_.write_files) {
                if (cfg_.snapshot_every > 0 && step_ % cfg_.snapshot_every == 0)
                    write_snapshots(step_tag(step_) + "_");
                if (cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0)
                    write_checkpoint_now();
            }
        }
        if (opt_.write_files) {
            csv_file_.flush();
            csv_file_.close();
            write_snapshots("final_");
            write_chart_csv(dir_path("final_chart_b.csv"), state_.chart_b);
            write_manifest();
        }
        RunResult r(grid_);
        r.cfg           = cfg_;
        r.records       = std::move(records_);
        r.record_times  = std::move(record_times_);
        r.record_charts = std::move(record_charts_);
        r.state         = std::move(state_);
        r.fs            = std::move(fs_);
        r.steps         = step_;
        r.t_final       = t_;
        r.det_b_max     = det_b_max_;
        r.det_bref_max  = det_bref_max_;
        r.div_max       = div_max_;
        r.ldiff_sup_sq  = ldiff_sup_sq_;
        r.gradu_l2l2    = diag_.gradu.value();
        r.csv_text      = std::move(csv_);
        return r;
    }

  private:
    SimConfig     cfg_;
    RunOptions    opt_;
    Grid<2>       grid_;
    ScenarioSetup setup_;
    FlowParams    par_;

    TransportState<2> state_;
    FlowState<2>      fs_;
    Diagnostics       diag_;
    Lcg64             rng_;

    long long  step_ = 0, steps_this_invocation_ = 0;
    double     t_    = 0.0;
    StepSample last_sample_;
    double     det_b_max_ = 0.0, det_bref_max_ = 0.0, div_max_ = 0.0;
    double     ldiff_sup_sq_ = 0.0;

    std::string                 csv_;
    std::ofstream               csv_file_;
    std::vector<EnergyRecord>   records_;
    std::vector<double>         record_times_;
    std::vector<TensorField<2>> record_charts_;

    std::string dir_path(const std::string& name) const {
        return (std::filesystem::path(cfg_.output_dir) / name).string();
    }
    std::string csv_path() const { return dir_path("energy.csv"); }
    static std::string step_tag(long long step) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%08lld", step);
        return buf;
    }

    bool done() const {
        if (cfg_.stop_after_steps > 0 && steps_this_invocation_ >= cfg_.stop_after_steps)
            return true;
        return t_ >= cfg_.t_end * (1.0 - 1e-12);
    }

    double max_speed() const {
        if (setup_.prescribed) return setup_.flow.max_speed();
        double m = 0.0;
        for (int ax = 0; ax < 2; ++ax)
            for (double v : fs_.u.comp[ax]) m = std::max(m, std::abs(v));
        return m;
    }

    double choose_dt() const {
        const double speed  = max_speed();
        const double dx_min = std::min(grid_.dx(0), grid_.dx(1));
        double       dt;
        if (cfg_.dt > 0.0) {
            dt = cfg_.dt;
            if (speed * dt / dx_min > 1.0 + 1e-9)
                throw SolverError("fixed dt violates the advective CFL limit: speed " +
                                  std::to_string(speed) + ", dt " + std::to_string(dt) +
                                  ", dx " + std::to_string(dx_min));
        } else {
            dt = cfl_dt(grid_, speed, par_, cfg_.cfl);
            if (!std::isfinite(dt))
                throw ConfigError(
                    "automatic dt is undefined here (zero velocity and no elastic wave "
                    "bound); set dt explicitly");
        }
        if (t_ + dt > cfg_.t_end) dt = cfg_.t_end - t_;
        if (!(dt > 0.0)) throw SolverError("nonpositive time step at t = " + std::to_string(t_));
        return dt;
    }

    void advance_one_step(double dt) {
        if (!setup_.prescribed) {
            const TensorField<2> stress = elastic_stress(state_, par_);
            const MomentumInfo   info =
                momentum_step(fs_, stress, par_, dt, setup_.body_force);
            div_max_ = std::max(div_max_, info.div_err);
            const GridFlow<2> gf(fs_.u);
            step_transport(state_, gf, dt, cfg_.tau_r);
        } else {
            step_transport(state_, setup_.flow, dt, cfg_.tau_r);
        }
        ++step_;
        ++steps_this_invocation_;
        t_ += dt;
        last_sample_ = make_sample();
        diag_.advance(last_sample_, dt);
        ldiff_sup_sq_ = std::max(ldiff_sup_sq_, last_sample_.ldiff_sq);
        update_det_maxima();
    }

    StepSample make_sample() const {
        StepSample   s;
        const double vol = grid_.cell_volume();
        KahanSum     lb, lr, ld;
        const auto   nc = grid_.cell_count();
        for (std::int64_t c = 0; c < nc; ++c) {
            const SymTensor<2>& l = state_.chart_b[c];
            lb.add(inner(l, l) * vol);
            if (state_.has_bref) {
                const SymTensor<2>& lref = state_.chart_bref[c];
                lr.add(inner(lref, lref) * vol);
                const SymTensor<2> diff = l + (-1.0) * lref;
                ld.add(inner(diff, diff) * vol);
            }
        }
        s.logb_sq  = lb.value();
        s.lref_sq  = lr.value();
        s.ldiff_sq = ld.value();
        if (setup_.prescribed) {
            KahanSum gg, dd;
            for (std::int64_t c = 0; c < nc; ++c) {
                const Mat<2> g = setup_.flow.gradient_fn(grid_.cell_center(grid_.cell_coords(c)));
                const Mat<2> d = 0.5 * (g + g.transposed());
                gg.add(inner(g, g) * vol);
                dd.add(inner(d, d) * vol);
            }
            s.gradu_sq = gg.value();
            s.d_sq     = dd.value();
        } else {
            const GradNorms gn = grad_norms(fs_.u);
            s.gradu_sq         = gn.gradu_sq;
            s.d_sq             = gn.d_sq;
        }
        return s;
    }

    double kinetic_now() const {
        if (setup_.prescribed) {
            KahanSum     k;
            const double vol = grid_.cell_volume();
            for (std::int64_t c = 0; c < grid_.cell_count(); ++c) {
                const Vec<2> u = setup_.flow.velocity_fn(grid_.cell_center(grid_.cell_coords(c)));
                k.add((u[0] * u[0] + u[1] * u[1]) * vol);
            }
            return par_.rho * k.value();
        }
        return par_.rho * l2_norm_sq(fs_.u);
    }

    void update_det_maxima() {
        // det B == exp(tr log B) identically for the stored chart.
        for (std::int64_t c = 0; c < grid_.cell_count(); ++c) {
            det_b_max_ = std::max(det_b_max_, std::abs(std::expm1(state_.chart_b[c].trace())));
            if (state_.has_bref)
                det_bref_max_ =
                    std::max(det_bref_max_, std::abs(std::expm1(state_.chart_bref[c].trace())));
        }
    }

    void record() {
        const EnergyRecord rec =
            diag_.make_record(t_, last_sample_, kinetic_now(),
                              std::max(det_b_max_, det_bref_max_), div_max_, state_.has_bref);
        const std::string row = csv_row(rec) + "\n";
        csv_ += row;
        if (csv_file_.is_open()) csv_file_ << row;
        records_.push_back(rec);
        record_times_.push_back(t_);
        if (opt_.store_charts) record_charts_.push_back(state_.chart_b);
    }

    void write_snapshots(const std::string& prefix) {
        write_chart_snapshot(dir_path(prefix + "chart_b.bin"), state_.chart_b, "chart_b");
        if (state_.has_bref)
            write_chart_snapshot(dir_path(prefix + "chart_bref.bin"), state_.chart_bref,
                                 "chart_bref");
        if (state_.has_f) write_defgrad_snapshot(dir_path(prefix + "def_grad.bin"), state_.def_grad);
        write_velocity_snapshot(dir_path(prefix + "velocity_x.bin"), fs_.u, 0);
        write_velocity_snapshot(dir_path(prefix + "velocity_y.bin"), fs_.u, 1);
        write_pressure_snapshot(dir_path(prefix + "pressure.bin"), fs_.p);
    }

    static void restore_trap(TrapezoidIntegral& t, const TrapezoidState& s) {
        t.acc.sum  = s.sum;
        t.acc.comp = s.comp;
        t.prev     = s.prev;
        t.started  = s.started;
    }
    static TrapezoidState pack_trap(const TrapezoidIntegral& t) {
        return TrapezoidState{t.acc.sum, t.acc.comp, t.prev, t.started};
    }

    void adopt_fields(const CheckpointData& d) {
        auto expect = [](std::size_t got, std::size_t want, const char* what) {
            if (got != want)
                throw SolverError(std::string("resume: checkpoint '") + what +
                                  "' array does not match the configured grid");
        };
        const std::size_t nc = static_cast<std::size_t>(grid_.cell_count());
        expect(d.chart_b.size(), 3 * nc, "chart_b");
        for (std::size_t c = 0; c < nc; ++c)
            for (int k = 0; k < 3; ++k) state_.chart_b[c].a[k] = d.chart_b[3 * c + k];
        if (d.has_bref) {
            if (!state_.has_bref) state_.enable_bref();
            expect(d.chart_bref.size(), 3 * nc, "chart_bref");
            for (std::size_t c = 0; c < nc; ++c)
                for (int k = 0; k < 3; ++k) state_.chart_bref[c].a[k] = d.chart_bref[3 * c + k];
        }
        if (d.has_f) {
            if (!state_.has_f) state_.enable_f();
            expect(d.def_grad.size(), 4 * nc, "def_grad");
            for (std::size_t c = 0; c < nc; ++c)
                for (int k = 0; k < 4; ++k) state_.def_grad[c].a[k] = d.def_grad[4 * c + k];
        }
        expect(d.u_x.size(), fs_.u.comp[0].size(), "u_x");
        expect(d.u_y.size(), fs_.u.comp[1].size(), "u_y");
        expect(d.pressure.size(), fs_.p.v.size(), "pressure");
        fs_.u.comp[0] = d.u_x;
        fs_.u.comp[1] = d.u_y;
        fs_.p.v       = d.pressure;
    }

    CheckpointData pack_checkpoint() const {
        CheckpointData c;
        c.config_text = cfg_.canonical_dump();
        c.step        = step_;
        c.time        = t_;
        c.rng_state   = rng_.state;
        c.has_bref    = state_.has_bref;
        c.has_f       = state_.has_f;
        const std::size_t nc = static_cast<std::size_t>(grid_.cell_count());
        c.chart_b.reserve(3 * nc);
        for (std::size_t i = 0; i < nc; ++i)
            for (int k = 0; k < 3; ++k) c.chart_b.push_back(state_.chart_b[i].a[k]);
        if (state_.has_bref) {
            c.chart_bref.reserve(3 * nc);
            for (std::size_t i = 0; i < nc; ++i)
                for (int k = 0; k < 3; ++k) c.chart_bref.push_back(state_.chart_bref[i].a[k]);
        }
        if (state_.has_f) {
            c.def_grad.reserve(4 * nc);
            for (std::size_t i = 0; i < nc; ++i)
                for (int k = 0; k < 4; ++k) c.def_grad.push_back(state_.def_grad[i].a[k]);
        }
        c.u_x      = fs_.u.comp[0];
        c.u_y      = fs_.u.comp[1];
        c.pressure = fs_.p.v;
        c.logb0_sq = diag_.logb0_sq;
        c.kinetic0 = diag_.kinetic0;
        c.elastic0 = diag_.elastic0;
        c.visc     = pack_trap(diag_.visc);
        c.plastic  = pack_trap(diag_.plastic);
        c.gradu    = pack_trap(diag_.gradu);
        c.b33_max  = diag_.b33_max;
        c.b52_max  = diag_.b52_max;
        c.ldiff_sup_sq = ldiff_sup_sq_;
        c.det_b_max    = det_b_max_;
        c.det_bref_max = det_bref_max_;
        c.div_max      = div_max_;
        c.csv_offset   = csv_.size();
        c.csv_hash     = fnv1a64(csv_);
        return c;
    }

    void write_checkpoint_now() {
        csv_file_.flush();
        write_checkpoint_file(dir_path("checkpoint_" + step_tag(step_) + ".ckpt"),
                              pack_checkpoint());
    }

    void write_manifest() const {
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                      static_cast<unsigned long long>(cfg_.hash()));
        std::ofstream out(dir_path("manifest.txt"), std::ios::binary);
        out << "logvisc-run v1\n"
            << "version = " << kVersionString << "\n"
            << "config_hash = " << hash_hex << "\n"
            << "scenario = " << to_word(cfg_.scenario) << "\n"
            << "model = " << to_word(cfg_.model) << "\n"
            << "steps = " << step_ << "\n"
            << "final_time = " << detail::format_double(t_) << "\n"
            << "records = " << records_.size() << "\n"
            << "status = ok\n";
    }
};

/// Run a configuration from scratch.
inline RunResult run_simulation(const SimConfig& cfg, const RunOptions& opt = {}) {
    SimDriver d(cfg, opt);
    d.init_fresh();
    return d.run();
}

/// Resume from a checkpoint file; continues toward t_end (the per-invocation
/// `stop_after_steps` cap starts afresh).
inline RunResult resume_simulation(const std::string& ckpt_path, const RunOptions& opt = {}) {
    const CheckpointData data = read_checkpoint_file(ckpt_path);
    const SimConfig      cfg  = parse_config_text(data.config_text, ckpt_path + " (embedded config)");
    SimDriver            d(cfg, opt);
    d.init_resume(data);
    return d.run();
}

// ----------------------------------------------------- mollify experiment ---

struct MollifyScaleResult {
    double scale       = 0.0;
    double logb0_sq    = 0.0;  // after mollification
    double sup_logb_sq = 0.0;  // max_t ||log B||_L2^2
    bool   bound_ok    = false;
};

struct MollifyReport {
    std::vector<MollifyScaleResult> scales;
    std::vector<double>             consecutive_diffs;  // L2-in-time of chart differences
    double                          rhs_common     = 0.0;
    bool                            bounds_all_ok  = false;
    bool                            diffs_monotone = false;
    std::string                     text;
};

/// Run the same configuration with the initial strain mollified at each of
/// `scales` (Gaussian stddev in cells), check the strain estimate for every
/// run against the single RHS built from the unmollified initial data, and
/// measure the distance between consecutive-scale solutions.
inline MollifyReport mollify_refinement_experiment(const SimConfig& base,
                                                   const std::vector<double>& scales,
                                                   double margin = 1.05) {
    if (scales.size() < 2) throw ConfigError("mollify experiment needs at least two scales");
    if (!base.prescribed_velocity())
        throw ConfigError(
            "mollify experiment requires a prescribed-velocity scenario so every run "
            "shares the same velocity");
    MollifyReport rep;

    // ||log B_0||^2 of the *unmollified* data: the common RHS dominates every
    // mollified run because mollification does not increase the L2 norm.
    double unmollified_sq = 0.0;
    {
        ScenarioSetup s   = make_scenario(base);
        const double  vol = s.state.grid.cell_volume();
        KahanSum      k;
        for (std::size_t c = 0; c < s.state.chart_b.size(); ++c)
            k.add(inner(s.state.chart_b[c], s.state.chart_b[c]) * vol);
        unmollified_sq = k.value();
    }

    std::vector<RunResult> runs;
    runs.reserve(scales.size());
    for (double sc : scales) {
        SimConfig cfg     = base;
        cfg.mollify_scale = sc;
        RunOptions opt;
        opt.write_files  = false;
        opt.store_charts = true;
        runs.push_back(run_simulation(cfg, opt));
    }

    double gradu_int = 0.0;
    for (const auto& r : runs) gradu_int = std::max(gradu_int, r.gradu_l2l2);
    rep.rhs_common = 16.0 * base.t_end * gradu_int + 2.0 * unmollified_sq;

    rep.bounds_all_ok = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        MollifyScaleResult sr;
        sr.scale       = scales[i];
        sr.logb0_sq    = runs[i].records.front().b33_lhs;
        sr.sup_logb_sq = runs[i].records.back().b33_lhs;
        sr.bound_ok    = sr.sup_logb_sq <= margin * rep.rhs_common;
        rep.bounds_all_ok &= sr.bound_ok;
        rep.scales.push_back(sr);
    }

    // L2-in-time, L2-in-space distance between consecutive-scale solutions.
    const double vol = runs.front().state.grid.cell_volume();
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const auto& a = runs[i];
        const auto& b = runs[i + 1];
        if (a.record_charts.size() != b.record_charts.size())
            throw SolverError("mollify experiment: record cadences diverged between scales");
        TrapezoidIntegral dist;
        for (std::size_t k = 0; k < a.record_charts.size(); ++k) {
            KahanSum sq;
            for (std::size_t c = 0; c < a.record_charts[k].size(); ++c) {
                const SymTensor<2> diff = a.record_charts[k][c] + (-1.0) * b.record_charts[k][c];
                sq.add(inner(diff, diff) * vol);
            }
            if (k == 0)
                dist.start(sq.value());
            else
                dist.advance(sq.value(), a.record_times[k] - a.record_times[k - 1]);
        }
        rep.consecutive_diffs.push_back(std::sqrt(dist.value()));
    }
    rep.diffs_monotone = true;
    for (std::size_t i = 0; i + 1 < rep.consecutive_diffs.size(); ++i)
        rep.diffs_monotone &= rep.consecutive_diffs[i + 1] < rep.consecutive_diffs[i];

    char line[256];
    rep.text = "mollification refinement experiment\n";
    std::snprintf(line, sizeof line, "common RHS (unmollified data): %.12g\n", rep.rhs_common);
    rep.text += line;
    for (const auto& sr : rep.scales) {
        std::snprintf(line, sizeof line,
                      "scale %6.3g cells: ||L0||^2 = %.12g  sup_t ||L||^2 = %.12g  bound %s\n",
                      sr.scale, sr.logb0_sq, sr.sup_logb_sq, sr.bound_ok ? "OK" : "VIOLATED");
        rep.text += line;
    }
    for (std::size_t i = 0; i < rep.consecutive_diffs.size(); ++i) {
        std::snprintf(line, sizeof line, "diff scale %g -> %g: L2L2 = %.12g\n", scales[i],
                      scales[i + 1], rep.consecutive_diffs[i]);
        rep.text += line;
    }
    rep.text += rep.bounds_all_ok ? "bounds: all OK\n" : "bounds: VIOLATION\n";
    rep.text += rep.diffs_monotone ? "consecutive diffs: monotone decreasing\n"
                                   : "consecutive diffs: NOT monotone\n";
    return rep;
}

}  // namespace logvisc

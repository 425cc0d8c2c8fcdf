#pragma once
// Checkpoint files: the complete resumable state of a run.
//
// A checkpoint stores the canonical configuration text (and its hash), the
// step counter, simulated time, RNG state, every field array, the full
// diagnostics accumulator state (compensated sums included, so resumed
// accumulation is bit-identical), the running error maxima, and the byte
// offset plus hash of the energy CSV written so far.  Resume verifies both
// hashes and refuses to continue from a file that does not match; the CSV
// is truncated to the stored offset and appended to, which makes a resumed
// run's output byte-identical to an unbroken one.
//
// Layout: ASCII magic line, then little-endian fixed-width fields; every
// array is prefixed with its u64 element count.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "snapshot.hpp"  // endianness assert + double stream helpers
#include "util.hpp"

namespace logvisc {

inline constexpr const char* kCheckpointMagic = "logvisc-ckpt v1\n";
inline constexpr const char* kCheckpointEnd   = "logvisc-ckpt-end\n";

struct TrapezoidState {
    double sum     = 0.0;
    double comp    = 0.0;
    double prev    = 0.0;
    bool   started = false;
};

struct CheckpointData {
    std::string   config_text;  // canonical form
    long long     step = 0;
    double        time = 0.0;
    std::uint64_t rng_state = 0;
    bool          has_bref = false;
    bool          has_f    = false;

    std::vector<double> chart_b;
    std::vector<double> chart_bref;
    std::vector<double> def_grad;
    std::vector<double> u_x, u_y, pressure;

    double         logb0_sq = 0.0, kinetic0 = 0.0, elastic0 = 0.0;
    TrapezoidState visc, plastic, gradu;
    double         b33_max = 0.0, b52_max = 0.0, ldiff_sup_sq = 0.0;
    double         det_b_max = 0.0, det_bref_max = 0.0, div_max = 0.0;

    std::uint64_t csv_offset = 0;
    std::uint64_t csv_hash   = 0;
};

namespace detail {

inline void ck_write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void ck_write_i64(std::ostream& out, std::int64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void ck_write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void ck_write_u8(std::ostream& out, bool v) {
    const char c = v ? 1 : 0;
    out.write(&c, 1);
}
inline void ck_write_array(std::ostream& out, const std::vector<double>& a) {
    ck_write_u64(out, a.size());
    write_doubles(out, a.data(), a.size());
}
inline void ck_write_trap(std::ostream& out, const TrapezoidState& t) {
    ck_write_f64(out, t.sum);
    ck_write_f64(out, t.comp);
    ck_write_f64(out, t.prev);
    ck_write_u8(out, t.started);
}

inline std::uint64_t ck_read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw SolverError("checkpoint truncated");
    return v;
}
inline std::int64_t ck_read_i64(std::istream& in) {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw SolverError("checkpoint truncated");
    return v;
}
inline double ck_read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw SolverError("checkpoint truncated");
    return v;
}
inline bool ck_read_u8(std::istream& in) {
    char c = 0;
    in.read(&c, 1);
    if (!in) throw SolverError("checkpoint truncated");
    return c != 0;
}
inline std::vector<double> ck_read_array(std::istream& in) {
    const std::uint64_t n = ck_read_u64(in);
    if (n > (1ull << 32)) throw SolverError("checkpoint array length is implausible");
    std::vector<double> a(n);
    if (n) read_doubles(in, a.data(), a.size());
    return a;
}
inline TrapezoidState ck_read_trap(std::istream& in) {
    TrapezoidState t;
    t.sum     = ck_read_f64(in);
    t.comp    = ck_read_f64(in);
    t.prev    = ck_read_f64(in);
    t.started = ck_read_u8(in);
    return t;
}

}  // namespace detail

inline void write_checkpoint_file(const std::string& path, const CheckpointData& c) {
    using namespace detail;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open checkpoint file '" + path + "' for writing");
    out << kCheckpointMagic;
    ck_write_u64(out, c.config_text.size());
    out.write(c.config_text.data(), static_cast<std::streamsize>(c.config_text.size()));
    ck_write_u64(out, fnv1a64(c.config_text));
    ck_write_i64(out, c.step);
    ck_write_f64(out, c.time);
    ck_write_u64(out, c.rng_state);
    ck_write_u8(out, c.has_bref);
    ck_write_u8(out, c.has_f);
    ck_write_array(out, c.chart_b);
    ck_write_array(out, c.chart_bref);
    ck_write_array(out, c.def_grad);
    ck_write_array(out, c.u_x);
    ck_write_array(out, c.u_y);
    ck_write_array(out, c.pressure);
    ck_write_f64(out, c.logb0_sq);
    ck_write_f64(out, c.kinetic0);
    ck_write_f64(out, c.elastic0);
    ck_write_trap(out, c.visc);
    ck_write_trap(out, c.plastic);
    ck_write_trap(out, c.gradu);
    ck_write_f64(out, c.b33_max);
    ck_write_f64(out, c.b52_max);
    ck_write_f64(out, c.ldiff_sup_sq);
    ck_write_f64(out, c.det_b_max);
    ck_write_f64(out, c.det_bref_max);
    ck_write_f64(out, c.div_max);
    ck_write_u64(out, c.csv_offset);
    ck_write_u64(out, c.csv_hash);
    out << kCheckpointEnd;
    if (!out) throw SolverError("failed writing checkpoint '" + path + "'");
}

inline CheckpointData read_checkpoint_file(const std::string& path) {
    using namespace detail;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SolverError("cannot open checkpoint file '" + path + "'");
    std::string magic(std::char_traits<char>::length(kCheckpointMagic), '\0');
    in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
    if (!in || magic != kCheckpointMagic)
        throw SolverError("'" + path + "' is not a logvisc-ckpt v1 checkpoint");
    CheckpointData c;
    const std::uint64_t cfg_len = ck_read_u64(in);
    if (cfg_len > (1ull << 20)) throw SolverError("checkpoint config text is implausibly large");
    c.config_text.resize(cfg_len);
    in.read(c.config_text.data(), static_cast<std::streamsize>(cfg_len));
    if (!in) throw SolverError("checkpoint truncated");
    const std::uint64_t stored_hash = ck_read_u64(in);
    if (stored_hash != fnv1a64(c.config_text))
        throw SolverError("checkpoint config hash mismatch; refusing to resume from '" + path + "'");
    c.step      = ck_read_i64(in);
    c.time      = ck_read_f64(in);
    c.rng_state = ck_read_u64(in);
    c.has_bref  = ck_read_u8(in);
    c.has_f     = ck_read_u8(in);
    c.chart_b    = ck_read_array(in);
    c.chart_bref = ck_read_array(in);
    c.def_grad   = ck_read_array(in);
    c.u_x        = ck_read_array(in);
    c.u_y        = ck_read_array(in);
    c.pressure   = ck_read_array(in);
    c.logb0_sq = ck_read_f64(in);
    c.kinetic0 = ck_read_f64(in);
    c.elastic0 = ck_read_f64(in);
    c.visc    = ck_read_trap(in);
    c.plastic = ck_read_trap(in);
    c.gradu   = ck_read_trap(in);
    c.b33_max      = ck_read_f64(in);
    c.b52_max      = ck_read_f64(in);
    c.ldiff_sup_sq = ck_read_f64(in);
    c.det_b_max    = ck_read_f64(in);
    c.det_bref_max = ck_read_f64(in);
    c.div_max      = ck_read_f64(in);
    c.csv_offset = ck_read_u64(in);
    c.csv_hash   = ck_read_u64(in);
    std::string endmark(std::char_traits<char>::length(kCheckpointEnd), '\0');
    in.read(endmark.data(), static_cast<std::streamsize>(endmark.size()));
    if (!in || endmark != kCheckpointEnd)
        throw SolverError("checkpoint '" + path + "' is missing its end marker");
    return c;
}

}  // namespace logvisc

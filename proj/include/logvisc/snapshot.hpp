#pragma once
// On-disk field snapshots.
//
// Binary format: the ASCII header line
//     logvisc-field v1 <kind> <d> <n0> <n1>\n
// followed by the payload as little-endian IEEE float64.  <n0> <n1> are the
// storage dimensions of the payload (cell dimensions for cell fields, face
// dimensions for a velocity component).  Payload ordering is row-major over
// (n1, n0) with the first axis fastest, matching in-memory layout:
//   chart_b / chart_bref : 3 doubles per cell (l_xx, l_xy, l_yy)
//   def_grad             : 4 doubles per cell (row-major 2x2)
//   pressure             : 1 double per cell
//   velocity_x/velocity_y: 1 double per face
// A per-cell CSV export (`i,j` indices then components) is provided for the
// chart fields.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "field.hpp"
#include "util.hpp"

namespace logvisc {

static_assert(std::endian::native == std::endian::little,
              "snapshot and checkpoint formats assume a little-endian host");

namespace detail {

inline void write_doubles(std::ostream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}
inline void read_doubles(std::istream& in, double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw SolverError("snapshot payload truncated");
}

}  // namespace detail

struct FieldSnapshot {
    std::string         kind;
    int                 d = 0;
    std::array<int, 2>  n{};
    std::vector<double> data;
};

inline void write_snapshot_stream(std::ostream& out, const std::string& kind, int d,
                                  const std::array<int, 2>& n, const std::vector<double>& data) {
    out << "logvisc-field v1 " << kind << ' ' << d << ' ' << n[0] << ' ' << n[1] << '\n';
    detail::write_doubles(out, data.data(), data.size());
    if (!out) throw SolverError("failed writing snapshot payload");
}

inline void write_snapshot_file(const std::string& path, const std::string& kind, int d,
                                const std::array<int, 2>& n, const std::vector<double>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open snapshot file '" + path + "' for writing");
    write_snapshot_stream(out, kind, d, n, data);
}

inline FieldSnapshot read_snapshot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SolverError("cannot open snapshot file '" + path + "'");
    std::string magic, version;
    FieldSnapshot s;
    if (!(in >> magic >> version >> s.kind >> s.d >> s.n[0] >> s.n[1]) ||
        magic != "logvisc-field" || version != "v1")
        throw SolverError("'" + path + "' is not a logvisc-field v1 snapshot");
    in.get();  // the newline terminating the header
    if (s.d != 2 || s.n[0] <= 0 || s.n[1] <= 0)
        throw SolverError("snapshot '" + path + "' has invalid dimensions");
    std::size_t per = 1;
    if (s.kind == "chart_b" || s.kind == "chart_bref") per = 3;
    else if (s.kind == "def_grad") per = 4;
    else if (s.kind == "pressure" || s.kind == "velocity_x" || s.kind == "velocity_y") per = 1;
    else throw SolverError("snapshot '" + path + "' has unknown kind '" + s.kind + "'");
    s.data.resize(per * static_cast<std::size_t>(s.n[0]) * static_cast<std::size_t>(s.n[1]));
    detail::read_doubles(in, s.data.data(), s.data.size());
    return s;
}

// Typed wrappers over the in-memory fields. -------------------------------

inline void write_chart_snapshot(const std::string& path, const TensorField<2>& f,
                                 const std::string& kind) {
    std::vector<double> data;
    data.reserve(3 * static_cast<std::size_t>(f.size()));
    for (std::int64_t c = 0; c < f.size(); ++c)
        for (int k = 0; k < SymTensor<2>::ncomp; ++k) data.push_back(f[c].a[k]);
    write_snapshot_file(path, kind, 2, {f.grid.n[0], f.grid.n[1]}, data);
}

inline void write_defgrad_snapshot(const std::string& path, const MatField<2>& f) {
    std::vector<double> data;
    data.reserve(4 * static_cast<std::size_t>(f.size()));
    for (std::int64_t c = 0; c < f.size(); ++c)
        for (int k = 0; k < 4; ++k) data.push_back(f[c].a[k]);
    write_snapshot_file(path, "def_grad", 2, {f.grid.n[0], f.grid.n[1]}, data);
}

inline void write_pressure_snapshot(const std::string& path, const ScalarField<2>& f) {
    write_snapshot_file(path, "pressure", 2, {f.grid.n[0], f.grid.n[1]}, f.v);
}

inline void write_velocity_snapshot(const std::string& path, const VectorField<2>& u, int ax) {
    std::array<int, 2> n{};
    for (int j = 0; j < 2; ++j) n[j] = (j == ax) ? u.faces_along(ax) : u.grid.n[j];
    write_snapshot_file(path, ax == 0 ? "velocity_x" : "velocity_y", 2, n, u.comp[ax]);
}

/// Per-cell CSV export of a chart field: `i,j,l_xx,l_xy,l_yy`.
inline void write_chart_csv(const std::string& path, const TensorField<2>& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open '" + path + "' for writing");
    out << "i,j,l_xx,l_xy,l_yy\n";
    const Grid<2>& g = f.grid;
    char           buf[128];
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        const auto idx = g.cell_coords(c);
        const auto& l  = f[c];
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", idx[0], idx[1],
                      l(0, 0), l(0, 1), l(1, 1));
        out << buf;
    }
}

}  // namespace logvisc

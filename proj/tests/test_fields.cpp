// Grid/field checks: norms against hand-computed values, MAC divergence and
// gradient stencils on fields with known derivatives, mollifier properties,
// and the binary snapshot round trip.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "logvisc/field.hpp"
#include "logvisc/mollify.hpp"
#include "logvisc/operators.hpp"
#include "logvisc/rng.hpp"
#include "logvisc/snapshot.hpp"
#include "logvisc/verify.hpp"

using namespace logvisc;

namespace {

Grid<2> unit_grid(int n, BoundaryMode mode = BoundaryMode::periodic) {
    return Grid<2>({n, n}, {1.0, 1.0}, mode);
}

std::filesystem::path scratch_file(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / "logvisc_test_fields";
    std::filesystem::create_directories(dir);
    return dir / name;
}

double max_face_speed(const VectorField<2>& u) {
    double m = 0.0;
    for (int ax = 0; ax < 2; ++ax)
        for (double v : u.comp[ax]) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("grid: spacing, volume, and index round trip") {
    const Grid<2> g({8, 16}, {2.0, 4.0}, BoundaryMode::periodic);
    CHECK(g.dx(0) == Catch::Approx(0.25).epsilon(1e-15));
    CHECK(g.dx(1) == Catch::Approx(0.25).epsilon(1e-15));
    CHECK(g.cell_count() == 128);
    CHECK(g.cell_volume() == Catch::Approx(0.0625).epsilon(1e-15));
    for (std::int64_t c = 0; c < g.cell_count(); c += 17)
        CHECK(g.cell_index(g.cell_coords(c)) == c);

    CHECK_THROWS_AS(Grid<2>({0, 8}, {1.0, 1.0}, BoundaryMode::periodic), ConfigError);
    CHECK_THROWS_AS(Grid<2>({8, 8}, {1.0, -1.0}, BoundaryMode::periodic), ConfigError);
}

TEST_CASE("norms: hand-computed values on the unit square") {
    const Grid<2> g = unit_grid(16);

    // Constant scalar c: ||f||_L2 = c * sqrt(area) = c.
    ScalarField<2> f(g);
    for (std::int64_t c = 0; c < f.size(); ++c) f[c] = 3.0;
    CHECK(l2_norm(f) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(max_abs(f) == 3.0);

    // Constant velocity (3, 4): ||u||_L2^2 = 9 + 16 = 25.
    VectorField<2> u(g);
    for (int ax = 0; ax < 2; ++ax)
        for (auto& val : u.comp[ax]) val = ax == 0 ? 3.0 : 4.0;
    CHECK(l2_norm_sq(u) == Catch::Approx(25.0).epsilon(1e-13));
    CHECK(l2_norm(u) == Catch::Approx(5.0).epsilon(1e-13));

    // Constant chart diag(a, -a): ||L||_L2^2 = 2 a^2 over unit area.
    TensorField<2> t(g);
    for (std::int64_t c = 0; c < t.size(); ++c) {
        t[c].at(0, 0) = 0.7;
        t[c].at(1, 1) = -0.7;
    }
    CHECK(l2_norm_sq(t) == Catch::Approx(2.0 * 0.49).epsilon(1e-13));
    CHECK(max_trace_error(t) < 1e-16);

    // Zero fields.
    CHECK(l2_norm(ScalarField<2>(g)) == 0.0);
    CHECK(l2_norm(VectorField<2>(g)) == 0.0);
    CHECK(l2_norm_sq(TensorField<2>(g)) == 0.0);
}

TEST_CASE("mac_divergence: stream-function velocities are discretely solenoidal") {
    // u = (dpsi/dy, -dpsi/dx) built from node values of psi makes the MAC
    // divergence vanish identically (telescoping differences).
    const Grid<2> g = unit_grid(24);
    const double  hx = g.dx(0), hy = g.dx(1);
    auto psi = [&](int i, int j) {
        const double x = i * hx, y = j * hy;
        return std::sin(6.283185307179586 * x) * std::cos(12.566370614359172 * y);
    };
    VectorField<2> u(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < u.faces_along(0); ++i)
            u.ref(0, {i, j}) = (psi(i, j + 1) - psi(i, j)) / hy;
    for (int j = 0; j < u.faces_along(1); ++j)
        for (int i = 0; i < g.n[0]; ++i)
            u.ref(1, {i, j}) = -(psi(i + 1, j) - psi(i, j)) / hx;

    const auto div = mac_divergence(u);
    CHECK(max_abs(div) < 1e-12 * std::max(1.0, max_face_speed(u)));
}

TEST_CASE("velocity_gradient: affine flow is reproduced in the interior") {
    // u = G (x - x0) sampled exactly on faces; centered derivatives of a
    // linear function are exact away from the walls.
    const Grid<2> g = unit_grid(16, BoundaryMode::no_slip_walls);
    Mat<2>        gm;
    gm(0, 0) = 0.4;
    gm(0, 1) = -0.9;
    gm(1, 0) = 0.6;
    gm(1, 1) = -0.4;
    VectorField<2> u(g);
    for (int ax = 0; ax < 2; ++ax)
        for (int j = 0; j < (ax == 1 ? u.faces_along(1) : g.n[1]); ++j)
            for (int i = 0; i < (ax == 0 ? u.faces_along(0) : g.n[0]); ++i) {
                const auto p = u.face_position(ax, {i, j});
                u.ref(ax, {i, j}) =
                    gm(ax, 0) * (p[0] - 0.5) + gm(ax, 1) * (p[1] - 0.5);
            }
    const auto mg = velocity_gradient(u);
    const auto dv = mac_divergence(u);
    for (int j = 2; j < g.n[1] - 2; ++j)
        for (int i = 2; i < g.n[0] - 2; ++i) {
            const auto m = mg[g.cell_index({i, j})];
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    CHECK(m(r, c) == Catch::Approx(gm(r, c)).margin(1e-12));
            // tr grad u equals the MAC divergence at the same cell.
            CHECK(m.trace() == Catch::Approx(dv[g.cell_index({i, j})]).margin(1e-12));
        }
}

TEST_CASE("tensor_divergence: constant and linear fields") {
    const Grid<2> g = unit_grid(16);
    TensorField<2> t(g);
    for (std::int64_t c = 0; c < t.size(); ++c) {
        t[c].at(0, 0) = 1.3;
        t[c].at(0, 1) = -0.4;
        t[c].at(1, 1) = 0.8;
    }
    const auto f0 = tensor_divergence(t);
    CHECK(max_face_speed(f0) < 1e-13);

    // T = [[x, 0], [0, 0]] on a walls grid: div T = (1, 0) in the interior.
    const Grid<2> gw = unit_grid(16, BoundaryMode::no_slip_walls);
    TensorField<2> tl(gw);
    for (int j = 0; j < gw.n[1]; ++j)
        for (int i = 0; i < gw.n[0]; ++i)
            tl[gw.cell_index({i, j})].at(0, 0) = gw.cell_center({i, j})[0];
    const auto f1 = tensor_divergence(tl);
    for (int j = 3; j < gw.n[1] - 3; ++j)
        for (int i = 3; i < gw.n[0] - 3; ++i)
            CHECK(f1.at(0, {i, j}) == Catch::Approx(1.0).margin(1e-11));
}

TEST_CASE("sample_scalar: nodal exactness and linear reproduction") {
    const Grid<2> g = unit_grid(16);
    ScalarField<2> f(g);
    Lcg64          rng(7);
    for (std::int64_t c = 0; c < f.size(); ++c) f[c] = rng.uniform(-2.0, 2.0);

    // Sampling at a cell center returns that cell's value.
    for (std::int64_t c = 0; c < f.size(); c += 7) {
        const auto x = g.cell_center(g.cell_coords(c));
        CHECK(sample_scalar(f, x) == Catch::Approx(f[c]).margin(1e-14));
    }

    // A field linear in x is reproduced between centers (periodic in y).
    ScalarField<2> lin(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            lin[g.cell_index({i, j})] = 2.0 * g.cell_center({i, j})[0];
    for (int k = 0; k < 50; ++k) {
        const double x = rng.uniform(0.2, 0.8), y = rng.uniform(0.0, 1.0);
        CHECK(sample_scalar(lin, Vec<2>{x, y}) == Catch::Approx(2.0 * x).margin(1e-12));
    }
}

TEST_CASE("mollify: identity at sigma = 0, mean preservation, contraction") {
    const Grid<2> g = unit_grid(32);
    ScalarField<2> f(g);
    Lcg64          rng(99);
    for (std::int64_t c = 0; c < f.size(); ++c) f[c] = rng.uniform(-1.0, 1.0);

    // sigma = 0 collapses to the single-weight kernel {1}: bitwise identity.
    const auto same = mollify(f, 0.0);
    for (std::int64_t c = 0; c < f.size(); ++c) CHECK(same[c] == f[c]);

    // Constants are fixed points (kernel normalization).
    ScalarField<2> k(g);
    for (std::int64_t c = 0; c < k.size(); ++c) k[c] = 4.25;
    const auto km = mollify(k, 2.0);
    for (std::int64_t c = 0; c < k.size(); ++c)
        CHECK(km[c] == Catch::Approx(4.25).epsilon(1e-13));

    // Smoothing is an L2 contraction, in both boundary modes.
    CHECK(l2_norm(mollify(f, 1.5)) <= l2_norm(f) * (1.0 + 1e-13));
    ScalarField<2> fw(unit_grid(32, BoundaryMode::no_slip_walls));
    for (std::int64_t c = 0; c < fw.size(); ++c) fw[c] = f[c];
    CHECK(l2_norm(mollify(fw, 1.5)) <= l2_norm(fw) * (1.0 + 1e-13));
}

TEST_CASE("snapshot: bitwise round trip and corruption rejection") {
    const Grid<2> g = unit_grid(12);
    TensorField<2> t(g);
    Lcg64          rng(4242);
    for (std::int64_t c = 0; c < t.size(); ++c) {
        t[c].at(0, 0) = rng.uniform(-0.5, 0.5);
        t[c].at(0, 1) = rng.uniform(-0.5, 0.5);
        t[c].at(1, 1) = -t[c](0, 0);
    }
    const auto path = scratch_file("chart.bin");
    write_chart_snapshot(path.string(), t, "chart_b");

    const auto s = read_snapshot_file(path.string());
    CHECK(s.kind == "chart_b");
    CHECK(s.d == 2);
    CHECK(s.n[0] == 12);
    CHECK(s.n[1] == 12);
    REQUIRE(s.data.size() == 3u * 144u);
    for (std::int64_t c = 0; c < t.size(); ++c) {
        CHECK(s.data[3 * c + 0] == t[c](0, 0));
        CHECK(s.data[3 * c + 1] == t[c](0, 1));
        CHECK(s.data[3 * c + 2] == t[c](1, 1));
    }

    // Flip the magic: the reader must refuse.
    auto bytes = [&] {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    }();
    bytes[0] = 'X';
    const auto bad = scratch_file("chart_bad.bin");
    {
        std::ofstream out(bad, std::ios::binary);
        out << bytes;
    }
    CHECK_THROWS_AS(read_snapshot_file(bad.string()), SolverError);
}

TEST_CASE("validate_spd_unit_det flags a non-unit-determinant cell") {
    const Grid<2> g = unit_grid(8);
    TensorField<2> b(g);
    for (std::int64_t c = 0; c < b.size(); ++c) b[c] = SymTensor<2>::identity();
    CHECK(validate_spd_unit_det(b).max_det_err < 1e-15);

    b[17] = 1.5 * b[17];
    const auto v = validate_spd_unit_det(b);
    CHECK(v.max_det_err == Catch::Approx(1.25).epsilon(1e-12)); // det 1.5^2 - 1
    CHECK(v.min_eigenvalue > 0.0);
}

TEST_CASE("verification suite: fields") {
    const auto suite = verify::run_suite("fields");
    for (const auto& c : suite.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

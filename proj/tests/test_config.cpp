// Configuration and persistence checks: parser defaults and line-numbered
// error reporting, canonical dump round trips, content hashing, and the
// binary checkpoint round trip.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "logvisc/checkpoint.hpp"
#include "logvisc/config.hpp"
#include "logvisc/verify.hpp"

using namespace logvisc;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kMinimal = "model = solid\nscenario = rest_strained\nt_end = 1\n";

std::filesystem::path scratch_file(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / "logvisc_test_config";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("parser: minimal config takes documented defaults") {
    const auto c = parse_config_text(kMinimal, "mem");
    CHECK(c.model == Model::solid);
    CHECK(c.scenario == Scenario::rest_strained);
    CHECK(c.t_end == 1.0);
    CHECK(c.d == 2);
    CHECK(c.nx == 64);
    CHECK(c.ny == 64);
    CHECK(c.length_x == 1.0);
    CHECK(c.boundary_mode == BoundaryMode::periodic);
    CHECK(c.rho == 1.0);
    CHECK(c.eta == 0.1);
    CHECK(c.kappa == 1.0);
    CHECK(c.tau_r == 0.0);
    CHECK_FALSE(c.has_bref());
    CHECK(c.dt == 0.0);
    CHECK(c.cfl == 0.5);
    CHECK(c.record_every == 1);
    CHECK(c.snapshot_every == 0);
    CHECK(c.checkpoint_every == 0);
    CHECK(c.stop_after_steps == 0);
    CHECK(c.output_dir == "out");
    CHECK(c.mollify_scale == 0.0);
    CHECK(c.seed == 1);
    CHECK(c.initial_strain == InitialStrain::identity);
    CHECK_FALSE(c.prescribed_velocity());
}

TEST_CASE("parser: comments, blank lines, and whitespace are tolerated") {
    const std::string text = "# full-line comment\n"
                             "\n"
                             "  model = solid   # trailing comment\n"
                             "\tscenario\t=\trest_strained\n"
                             "t_end = 2.5\n";
    const auto c = parse_config_text(text, "mem");
    CHECK(c.model == Model::solid);
    CHECK(c.t_end == 2.5);
}

TEST_CASE("parser: errors carry line numbers and every problem is listed") {
    const std::string text = "model = solid\n"
                             "scenario = rest_strained\n"
                             "t_end = 1\n"
                             "frobnicate = 3\n";
    CHECK_THROWS_WITH(parse_config_text(text, "mem"),
                      ContainsSubstring("line 4: unknown key 'frobnicate'"));

    CHECK_THROWS_WITH(parse_config_text(std::string(kMinimal) + "eta = 0.2\neta = 0.3\n", "mem"),
                      ContainsSubstring("duplicate key 'eta'"));

    CHECK_THROWS_WITH(
        parse_config_text("model = gas\nscenario = rest_strained\nt_end = 1\n", "mem"),
        ContainsSubstring("must be one of solid|fluid|transport_only"));

    CHECK_THROWS_WITH(parse_config_text(std::string(kMinimal) + "rho = fast\n", "mem"),
                      ContainsSubstring("is not a number"));

    CHECK_THROWS_WITH(parse_config_text(std::string(kMinimal) + "just some words\n", "mem"),
                      ContainsSubstring("expected 'key = value'"));

    CHECK_THROWS_WITH(parse_config_text("model = solid\nscenario = rest_strained\n", "mem"),
                      ContainsSubstring("missing required key 't_end'"));

    // Two independent problems are both reported.
    try {
        parse_config_text("model = gas\nscenario = rest_strained\nbogus = 1\nt_end = 1\n",
                          "mem");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 1") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("validation: semantic rules after a clean parse") {
    CHECK_THROWS_WITH(
        parse_config_text("model = fluid\nscenario = rest_strained\nt_end = 1\n", "mem"),
        ContainsSubstring("fluid model requires tau_r > 0"));

    CHECK_THROWS_WITH(
        parse_config_text("model = solid\nscenario = taylor_green\nt_end = 1\n", "mem"),
        ContainsSubstring("taylor_green requires kappa = 0"));

    CHECK_THROWS_WITH(
        parse_config_text(
            "model = solid\nscenario = uniform_shear_prescribed\nt_end = 1\n", "mem"),
        ContainsSubstring("prescribed-velocity scenarios require model = transport_only"));

    CHECK_THROWS_WITH(
        parse_config_text("model = solid\nscenario = lid_cavity\nt_end = 1\n", "mem"),
        ContainsSubstring("lid_cavity requires boundary_mode = no_slip_walls"));

    CHECK_THROWS_WITH(parse_config_text(std::string(kMinimal) + "cfl = 1.5\n", "mem"),
                      ContainsSubstring("cfl must lie in (0, 1]"));
}

TEST_CASE("canonical_dump: fixed point of parse, hash ignores formatting") {
    const std::string text = "t_end = 0.75\n"
                             "scenario = rest_strained\n"
                             "model = solid\n"
                             "eta = 0.25\n"
                             "nx = 32\n"
                             "ny = 32\n";
    const auto c     = parse_config_text(text, "mem");
    const auto dump  = c.canonical_dump();
    const auto again = parse_config_text(dump, "mem");
    CHECK(again.canonical_dump() == dump);
    CHECK(again.hash() == c.hash());

    // The canonical form is order- and comment-insensitive.
    const std::string shuffled = "# reordered\nnx = 32\neta = 0.25\nmodel = solid\n"
                                 "ny = 32\nscenario = rest_strained\n\nt_end = 0.75\n";
    CHECK(parse_config_text(shuffled, "mem").hash() == c.hash());

    // Any semantic change moves the hash.
    CHECK(parse_config_text(text + "seed = 2\n", "mem").hash() != c.hash());

    // Keys appear in the dump in the documented order, once each.
    CHECK(dump.substr(0, dump.find('\n')) == "model = solid");
    CHECK(dump.find("eta = 0.25\n") != std::string::npos);
    CHECK(dump.find("initial_strain = identity\n") != std::string::npos);
}

TEST_CASE("checkpoint: binary round trip preserves every field") {
    CheckpointData c;
    c.config_text = parse_config_text(kMinimal, "mem").canonical_dump();
    c.step        = 17;
    c.time        = 0.34;
    c.rng_state   = 0xdeadbeefcafe1234ull;
    c.has_bref    = true;
    c.chart_b     = {0.1, -0.2, 0.3, 0.4};
    c.chart_bref  = {0.0, 0.0, 0.0, 0.0};
    c.u_x         = {1.0, 2.0};
    c.u_y         = {3.0};
    c.pressure    = {4.0, 5.0, 6.0};
    c.logb0_sq    = 0.5;
    c.kinetic0    = 1.5;
    c.elastic0    = 2.5;
    c.visc.sum    = 0.125;
    c.visc.prev   = 0.25;
    c.visc.started = true;
    c.b33_max     = 7.0;
    c.b52_max     = 8.0;
    c.det_b_max   = 1e-12;
    c.div_max     = 1e-9;
    c.csv_offset  = 123;
    c.csv_hash    = 456;

    const auto path = scratch_file("round.ckpt");
    write_checkpoint_file(path.string(), c);
    const auto r = read_checkpoint_file(path.string());

    CHECK(r.config_text == c.config_text);
    CHECK(r.step == 17);
    CHECK(r.time == 0.34);
    CHECK(r.rng_state == c.rng_state);
    CHECK(r.has_bref);
    CHECK_FALSE(r.has_f);
    CHECK(r.chart_b == c.chart_b);
    CHECK(r.chart_bref == c.chart_bref);
    CHECK(r.u_x == c.u_x);
    CHECK(r.u_y == c.u_y);
    CHECK(r.pressure == c.pressure);
    CHECK(r.logb0_sq == 0.5);
    CHECK(r.kinetic0 == 1.5);
    CHECK(r.elastic0 == 2.5);
    CHECK(r.visc.sum == 0.125);
    CHECK(r.visc.prev == 0.25);
    CHECK(r.visc.started);
    CHECK_FALSE(r.plastic.started);
    CHECK(r.b33_max == 7.0);
    CHECK(r.b52_max == 8.0);
    CHECK(r.det_b_max == 1e-12);
    CHECK(r.div_max == 1e-9);
    CHECK(r.csv_offset == 123);
    CHECK(r.csv_hash == 456);
}

TEST_CASE("checkpoint: corruption is rejected") {
    CheckpointData c;
    c.config_text   = "model = solid\n";
    const auto path = scratch_file("bad.ckpt");
    write_checkpoint_file(path.string(), c);

    auto bytes = [&] {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    }();

    // Wrong magic.
    auto mangled = bytes;
    mangled[0] = 'Z';
    const auto p1 = scratch_file("bad_magic.ckpt");
    {
        std::ofstream out(p1, std::ios::binary);
        out << mangled;
    }
    CHECK_THROWS_AS(read_checkpoint_file(p1.string()), SolverError);

    // Truncated payload.
    const auto p2 = scratch_file("bad_trunc.ckpt");
    {
        std::ofstream out(p2, std::ios::binary);
        out << bytes.substr(0, bytes.size() / 2);
    }
    CHECK_THROWS_AS(read_checkpoint_file(p2.string()), SolverError);
}

TEST_CASE("verification suite: cli") {
    const auto suite = verify::run_suite("cli");
    for (const auto& c : suite.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

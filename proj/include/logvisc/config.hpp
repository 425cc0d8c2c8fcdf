#pragma once
// Run configuration: parsing, validation, canonical serialization.
//
// File format: one `key = value` per line; `#` starts a comment; blank
// lines are ignored.  Unknown keys, duplicate keys, malformed values and
// missing required keys are reported with line numbers.  `canonical_dump`
// emits every key in a fixed order using shortest round-trip number
// formatting, so parsing its output reproduces the exact same
// configuration and dumping again is byte-identical.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "flow.hpp"
#include "grid.hpp"
#include "util.hpp"

namespace logvisc {

inline constexpr const char* kVersionString = "logvisc 1.0.0";

enum class Scenario {
    rest_strained,
    taylor_green,
    lid_cavity,
    uniform_shear_prescribed,
    rigid_rotation_prescribed,
    relaxation_uniform,
};

enum class InitialStrain { identity, bump };

inline const char* to_word(Model m) {
    switch (m) {
        case Model::solid: return "solid";
        case Model::fluid: return "fluid";
        default: return "transport_only";
    }
}
inline const char* to_word(Scenario s) {
    switch (s) {
        case Scenario::rest_strained: return "rest_strained";
        case Scenario::taylor_green: return "taylor_green";
        case Scenario::lid_cavity: return "lid_cavity";
        case Scenario::uniform_shear_prescribed: return "uniform_shear_prescribed";
        case Scenario::rigid_rotation_prescribed: return "rigid_rotation_prescribed";
        default: return "relaxation_uniform";
    }
}
inline const char* to_word(BoundaryMode b) {
    return b == BoundaryMode::periodic ? "periodic" : "no_slip_walls";
}
inline const char* to_word(InitialStrain s) {
    return s == InitialStrain::identity ? "identity" : "bump";
}

/// Complete description of one run.  Defaults give a small periodic solid
/// box; `model`, `scenario` and `t_end` must always be set explicitly.
struct SimConfig {
    Model         model    = Model::solid;
    Scenario      scenario = Scenario::rest_strained;
    int           d  = 2;
    int           nx = 64;
    int           ny = 64;
    double        length_x      = 1.0;
    double        length_y      = 1.0;
    BoundaryMode  boundary_mode = BoundaryMode::periodic;
    double        rho   = 1.0;
    double        eta   = 0.1;
    double        kappa = 1.0;
    double        tau_r = 0.0;
    double        dt    = 0.0;  // 0: choose per step from `cfl`
    double        cfl   = 0.5;
    double        t_end = 0.0;
    long long     record_every     = 1;
    long long     snapshot_every   = 0;
    long long     checkpoint_every = 0;
    long long     stop_after_steps = 0;  // 0: run to t_end
    std::string   output_dir       = "out";
    double        mollify_scale    = 0.0;  // stddev in cells applied to initial strain
    std::uint64_t seed             = 1;
    // Scenario shape parameters (each scenario reads the ones it needs).
    double        shear_rate       = 1.0;
    double        rotation_rate    = 1.0;
    double        strain_amplitude = 1.0;
    double        u0_amplitude     = 0.0;
    double        lid_speed        = 1.0;
    InitialStrain initial_strain   = InitialStrain::identity;

    bool prescribed_velocity() const {
        return scenario == Scenario::uniform_shear_prescribed ||
               scenario == Scenario::rigid_rotation_prescribed ||
               scenario == Scenario::relaxation_uniform;
    }
    bool has_bref() const { return tau_r > 0.0; }

    FlowParams flow_params() const {
        FlowParams p;
        p.rho   = rho;
        p.eta   = eta;
        p.kappa = kappa;
        p.tau_r = tau_r;
        p.model = model;
        return p;
    }
    Grid<2> make_grid() const {
        return Grid<2>({nx, ny}, {length_x, length_y}, boundary_mode);
    }

    std::string   canonical_dump() const;
    std::uint64_t hash() const { return fnv1a64(canonical_dump()); }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}
template <class Int>
inline std::string format_int(Int v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline std::string SimConfig::canonical_dump() const {
    using detail::format_double;
    using detail::format_int;
    std::string out;
    auto put = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    put("model", to_word(model));
    put("scenario", to_word(scenario));
    put("d", format_int(d));
    put("nx", format_int(nx));
    put("ny", format_int(ny));
    put("length_x", format_double(length_x));
    put("length_y", format_double(length_y));
    put("boundary_mode", to_word(boundary_mode));
    put("rho", format_double(rho));
    put("eta", format_double(eta));
    put("kappa", format_double(kappa));
    put("tau_r", format_double(tau_r));
    put("dt", format_double(dt));
    put("cfl", format_double(cfl));
    put("t_end", format_double(t_end));
    put("record_every", format_int(record_every));
    put("snapshot_every", format_int(snapshot_every));
    put("checkpoint_every", format_int(checkpoint_every));
    put("stop_after_steps", format_int(stop_after_steps));
    put("output_dir", output_dir);
    put("mollify_scale", format_double(mollify_scale));
    put("seed", format_int(seed));
    put("shear_rate", format_double(shear_rate));
    put("rotation_rate", format_double(rotation_rate));
    put("strain_amplitude", format_double(strain_amplitude));
    put("u0_amplitude", format_double(u0_amplitude));
    put("lid_speed", format_double(lid_speed));
    put("initial_strain", to_word(initial_strain));
    return out;
}

/// Post-parse semantic validation; collects every violated rule.
inline void validate_config(const SimConfig& c) {
    std::vector<std::string> bad;
    auto req = [&bad](bool ok, const char* msg) {
        if (!ok) bad.emplace_back(msg);
    };
    req(c.d == 2, "d must be 2 (only planar scenarios are provided)");
    req(c.nx >= 8 && c.ny >= 8, "nx and ny must be at least 8");
    req(c.length_x > 0.0 && c.length_y > 0.0, "length_x and length_y must be positive");
    req(c.rho > 0.0, "rho must be positive");
    req(c.eta > 0.0, "eta must be positive");
    req(c.kappa >= 0.0, "kappa must be nonnegative");
    req(c.tau_r >= 0.0, "tau_r must be nonnegative");
    req(c.dt >= 0.0, "dt must be nonnegative (0 selects automatic stepping)");
    req(c.cfl > 0.0 && c.cfl <= 1.0, "cfl must lie in (0, 1]");
    req(c.t_end > 0.0, "t_end must be positive");
    req(c.record_every >= 1, "record_every must be at least 1");
    req(c.snapshot_every >= 0, "snapshot_every must be nonnegative");
    req(c.checkpoint_every >= 0, "checkpoint_every must be nonnegative");
    req(c.stop_after_steps >= 0, "stop_after_steps must be nonnegative");
    req(c.mollify_scale >= 0.0, "mollify_scale must be nonnegative");
    req(!c.output_dir.empty(), "output_dir must not be empty");
    if (c.model == Model::fluid)
        req(c.tau_r > 0.0, "fluid model requires tau_r > 0");
    if (c.prescribed_velocity())
        req(c.model == Model::transport_only,
            "prescribed-velocity scenarios require model = transport_only");
    else
        req(c.model != Model::transport_only,
            "model = transport_only requires a prescribed-velocity scenario");
    if (c.scenario == Scenario::relaxation_uniform) {
        req(c.tau_r > 0.0, "relaxation_uniform requires tau_r > 0");
        req(c.dt > 0.0, "relaxation_uniform requires an explicit dt (velocity is zero)");
    }
    if (c.scenario == Scenario::taylor_green) {
        req(c.kappa == 0.0, "taylor_green requires kappa = 0");
        req(c.boundary_mode == BoundaryMode::periodic, "taylor_green requires periodic boundaries");
    }
    if (c.scenario == Scenario::lid_cavity)
        req(c.boundary_mode == BoundaryMode::no_slip_walls,
            "lid_cavity requires boundary_mode = no_slip_walls");
    if (bad.empty()) return;
    std::string msg = "invalid configuration: ";
    for (std::size_t i = 0; i < bad.size(); ++i) {
        if (i) msg += "; ";
        msg += bad[i];
    }
    throw ConfigError(msg);
}

namespace detail {

struct ConfigParser {
    SimConfig                cfg;
    std::vector<std::string> errors;
    std::vector<std::string> seen;

    void error(int line, const std::string& what) {
        errors.push_back("line " + std::to_string(line) + ": " + what);
    }

    bool parse_double(int line, const std::string& key, const std::string& v, double& out) {
        double      val = 0.0;
        const char* b   = v.data();
        const char* e   = v.data() + v.size();
        auto        res = std::from_chars(b, e, val);
        if (res.ec != std::errc() || res.ptr != e) {
            error(line, "value for '" + key + "' is not a number: '" + v + "'");
            return false;
        }
        out = val;
        return true;
    }
    template <class Int>
    bool parse_integer(int line, const std::string& key, const std::string& v, Int& out) {
        Int         val = 0;
        const char* b   = v.data();
        const char* e   = v.data() + v.size();
        auto        res = std::from_chars(b, e, val);
        if (res.ec != std::errc() || res.ptr != e) {
            error(line, "value for '" + key + "' is not a valid integer: '" + v + "'");
            return false;
        }
        out = val;
        return true;
    }

    void assign(int line, const std::string& key, const std::string& value) {
        for (const auto& s : seen)
            if (s == key) {
                error(line, "duplicate key '" + key + "'");
                return;
            }
        seen.push_back(key);

        auto bad_word = [&](const char* expected) {
            error(line, "value for '" + key + "' must be one of " + expected + ", got '" + value + "'");
        };
        if (key == "model") {
            if (value == "solid") cfg.model = Model::solid;
            else if (value == "fluid") cfg.model = Model::fluid;
            else if (value == "transport_only") cfg.model = Model::transport_only;
            else bad_word("solid|fluid|transport_only");
        } else if (key == "scenario") {
            if (value == "rest_strained") cfg.scenario = Scenario::rest_strained;
            else if (value == "taylor_green") cfg.scenario = Scenario::taylor_green;
            else if (value == "lid_cavity") cfg.scenario = Scenario::lid_cavity;
            else if (value == "uniform_shear_prescribed") cfg.scenario = Scenario::uniform_shear_prescribed;
            else if (value == "rigid_rotation_prescribed") cfg.scenario = Scenario::rigid_rotation_prescribed;
            else if (value == "relaxation_uniform") cfg.scenario = Scenario::relaxation_uniform;
            else bad_word("rest_strained|taylor_green|lid_cavity|uniform_shear_prescribed|rigid_rotation_prescribed|relaxation_uniform");
        } else if (key == "boundary_mode") {
            if (value == "periodic") cfg.boundary_mode = BoundaryMode::periodic;
            else if (value == "no_slip_walls") cfg.boundary_mode = BoundaryMode::no_slip_walls;
            else bad_word("periodic|no_slip_walls");
        } else if (key == "initial_strain") {
            if (value == "identity") cfg.initial_strain = InitialStrain::identity;
            else if (value == "bump") cfg.initial_strain = InitialStrain::bump;
            else bad_word("identity|bump");
        } else if (key == "d") {
            parse_integer(line, key, value, cfg.d);
        } else if (key == "nx") {
            parse_integer(line, key, value, cfg.nx);
        } else if (key == "ny") {
            parse_integer(line, key, value, cfg.ny);
        } else if (key == "length_x") {
            parse_double(line, key, value, cfg.length_x);
        } else if (key == "length_y") {
            parse_double(line, key, value, cfg.length_y);
        } else if (key == "rho") {
            parse_double(line, key, value, cfg.rho);
        } else if (key == "eta") {
            parse_double(line, key, value, cfg.eta);
        } else if (key == "kappa") {
            parse_double(line, key, value, cfg.kappa);
        } else if (key == "tau_r") {
            parse_double(line, key, value, cfg.tau_r);
        } else if (key == "dt") {
            parse_double(line, key, value, cfg.dt);
        } else if (key == "cfl") {
            parse_double(line, key, value, cfg.cfl);
        } else if (key == "t_end") {
            parse_double(line, key, value, cfg.t_end);
        } else if (key == "record_every") {
            parse_integer(line, key, value, cfg.record_every);
        } else if (key == "snapshot_every") {
            parse_integer(line, key, value, cfg.snapshot_every);
        } else if (key == "checkpoint_every") {
            parse_integer(line, key, value, cfg.checkpoint_every);
        } else if (key == "stop_after_steps") {
            parse_integer(line, key, value, cfg.stop_after_steps);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "mollify_scale") {
            parse_double(line, key, value, cfg.mollify_scale);
        } else if (key == "seed") {
            parse_integer(line, key, value, cfg.seed);
        } else if (key == "shear_rate") {
            parse_double(line, key, value, cfg.shear_rate);
        } else if (key == "rotation_rate") {
            parse_double(line, key, value, cfg.rotation_rate);
        } else if (key == "strain_amplitude") {
            parse_double(line, key, value, cfg.strain_amplitude);
        } else if (key == "u0_amplitude") {
            parse_double(line, key, value, cfg.u0_amplitude);
        } else if (key == "lid_speed") {
            parse_double(line, key, value, cfg.lid_speed);
        } else {
            error(line, "unknown key '" + key + "'");
        }
    }

    bool saw(const char* key) const {
        for (const auto& s : seen)
            if (s == key) return true;
        return false;
    }
};

}  // namespace detail

/// Parse configuration text.  `source_name` labels error messages.
/// Throws ConfigError listing every problem with its line number.
inline SimConfig parse_config_text(const std::string& text, const std::string& source_name) {
    detail::ConfigParser p;
    std::istringstream   in(text);
    std::string          raw;
    int                  line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.error(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        std::string key   = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
            p.error(line_no, "malformed key '" + key + "'");
            continue;
        }
        if (value.empty()) {
            p.error(line_no, "missing value for key '" + key + "'");
            continue;
        }
        p.assign(line_no, key, value);
    }
    for (const char* required : {"model", "scenario", "t_end"})
        if (!p.saw(required))
            p.errors.push_back("missing required key '" + std::string(required) + "'");
    if (!p.errors.empty()) {
        std::string msg = source_name + ": ";
        for (std::size_t i = 0; i < p.errors.size(); ++i) {
            if (i) msg += "; ";
            msg += p.errors[i];
        }
        throw ConfigError(msg);
    }
    validate_config(p.cfg);
    return p.cfg;
}

inline SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace logvisc

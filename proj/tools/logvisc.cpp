// Command-line driver.
//
//   logvisc simulate <config-file>
//   logvisc resume <checkpoint-file>
//   logvisc verify <suite>|all
//   logvisc mollify-exp <config-file> --scales s1,s2,...
//   logvisc dump-config <config-file>
//
// Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
// 3 verification (or experiment acceptance) failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "logvisc/sim.hpp"
#include "logvisc/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

void print_usage(std::ostream& out) {
    out << "usage: logvisc <command> [args]\n"
           "\n"
           "commands:\n"
           "  simulate <config-file>                 run a simulation from a config file\n"
           "  resume <checkpoint-file>               continue a run from a checkpoint\n"
           "  verify <suite>|all                     run verification suites\n"
           "  mollify-exp <config-file> --scales a,b,...\n"
           "                                         mollification refinement experiment\n"
           "  dump-config <config-file>              print the canonical config\n"
           "\n"
           "suites: ";
    bool first = true;
    for (const auto& n : logvisc::verify::suite_names()) {
        out << (first ? "" : ", ") << n;
        first = false;
    }
    out << "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw logvisc::ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

logvisc::SimConfig load_config(const std::string& path) {
    return logvisc::parse_config_text(read_text_file(path), path);
}

void print_run_summary(const logvisc::RunResult& r) {
    std::printf("scenario %s, model %s: %lld steps to t = %.17g\n",
                logvisc::to_word(r.cfg.scenario), logvisc::to_word(r.cfg.model), r.steps,
                r.t_final);
    std::printf("  max |det B - 1|     = %.3g\n", r.det_b_max);
    if (r.cfg.has_bref()) std::printf("  max |det B_ref - 1| = %.3g\n", r.det_bref_max);
    std::printf("  max |div u|         = %.3g\n", r.div_max);
    if (!r.records.empty()) {
        const auto& rec = r.records.back();
        std::printf("  final energies: kinetic %.6g, elastic %.6g, viscous_cum %.6g",
                    rec.kinetic, rec.elastic, rec.viscous_cum);
        if (r.cfg.has_bref()) std::printf(", plastic_cum %.6g", rec.plastic_cum);
        std::printf("\n");
    }
    std::printf("  output: %s\n", r.cfg.output_dir.c_str());
}

int cmd_simulate(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "simulate: expected exactly one config file\n";
        return kExitUsage;
    }
    const logvisc::SimConfig cfg = load_config(args[0]);
    print_run_summary(logvisc::run_simulation(cfg));
    return kExitOk;
}

int cmd_resume(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "resume: expected exactly one checkpoint file\n";
        return kExitUsage;
    }
    print_run_summary(logvisc::resume_simulation(args[0]));
    return kExitOk;
}

int cmd_verify(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "verify: expected a suite name or 'all'\n";
        return kExitUsage;
    }
    std::vector<std::string> names;
    if (args[0] == "all") {
        names = logvisc::verify::suite_names();
    } else {
        bool known = false;
        for (const auto& n : logvisc::verify::suite_names()) known |= n == args[0];
        if (!known) {
            std::cerr << "verify: unknown suite '" << args[0] << "'\n";
            print_usage(std::cerr);
            return kExitUsage;
        }
        names.push_back(args[0]);
    }

    std::vector<logvisc::verify::SuiteResult> results;
    for (const auto& n : names) {
        results.push_back(logvisc::verify::run_suite(n));
        std::cout << logvisc::verify::format_suite(results.back());
    }
    const std::string manifest = logvisc::verify::render_verify_manifest(results);
    {
        std::ofstream out("verify_manifest.txt", std::ios::binary | std::ios::trunc);
        if (out) out << manifest;
    }
    std::cout << manifest;

    for (const auto& s : results)
        if (!s.all_pass()) return kExitVerify;
    return kExitOk;
}

int cmd_mollify_exp(const std::vector<std::string>& args) {
    std::string         config_path;
    std::vector<double> scales;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--scales") {
            if (i + 1 >= args.size()) {
                std::cerr << "mollify-exp: --scales needs a comma-separated list\n";
                return kExitUsage;
            }
            std::stringstream ss(args[++i]);
            std::string       tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    std::size_t pos = 0;
                    const double v = std::stod(tok, &pos);
                    if (pos != tok.size()) throw std::invalid_argument(tok);
                    scales.push_back(v);
                } catch (const std::exception&) {
                    std::cerr << "mollify-exp: bad scale '" << tok << "'\n";
                    return kExitUsage;
                }
            }
        } else if (config_path.empty()) {
            config_path = args[i];
        } else {
            std::cerr << "mollify-exp: unexpected argument '" << args[i] << "'\n";
            return kExitUsage;
        }
    }
    if (config_path.empty() || scales.size() < 2) {
        std::cerr << "mollify-exp: expected a config file and --scales with at least two values\n";
        return kExitUsage;
    }
    const logvisc::SimConfig    cfg = load_config(config_path);
    const logvisc::MollifyReport rep = logvisc::mollify_refinement_experiment(cfg, scales);
    std::cout << rep.text;
    return (rep.bounds_all_ok && rep.diffs_monotone) ? kExitOk : kExitVerify;
}

int cmd_dump_config(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "dump-config: expected exactly one config file\n";
        return kExitUsage;
    }
    std::cout << load_config(args[0]).canonical_dump();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        print_usage(std::cerr);
        return kExitUsage;
    }
    const std::string        cmd = args[0];
    std::vector<std::string> rest(args.begin() + 1, args.end());
    try {
        if (cmd == "simulate") return cmd_simulate(rest);
        if (cmd == "resume") return cmd_resume(rest);
        if (cmd == "verify") return cmd_verify(rest);
        if (cmd == "mollify-exp") return cmd_mollify_exp(rest);
        if (cmd == "dump-config") return cmd_dump_config(rest);
        if (cmd == "--help" || cmd == "-h" || cmd == "help") {
            print_usage(std::cout);
            return kExitOk;
        }
        std::cerr << "unknown command '" << cmd << "'\n";
        print_usage(std::cerr);
        return kExitUsage;
    } catch (const logvisc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const logvisc::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

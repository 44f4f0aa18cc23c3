#include "commands.hpp"

#include "todalab/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

using namespace todalab::cli;

namespace {

void add_out(CLI::App* app, Options& opt) { app->add_option("--out", opt.out, "Run directory")->capture_default_str(); }

void add_tol(CLI::App* app, Options& opt) { app->add_option("--tol", opt.tol, "Override the pass tolerance"); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cyclic Toda / Higgs bundle laboratory"};
    app.require_subcommand(1);
    Options opt;
    int threads = 0;
    app.add_option("--threads", threads, "Worker cap (falls back to TODA_LAB_THREADS)");

    auto* solve = app.add_subcommand("solve", "Solve the Toda system for a config");
    solve->add_option("--config", opt.config, "Config JSON")->required();
    add_out(solve, opt);
    add_tol(solve, opt);

    auto* verify = app.add_subcommand("verify", "Check a solution");
    verify->add_option("--check", opt.checks, "toda,star,divisor,hitchin,gauge,g2")->delimiter(',');
    add_out(verify, opt);
    add_tol(verify, opt);

    auto* frame = app.add_subcommand("frame", "Integrate frames of a solution");
    add_out(frame, opt);
    add_tol(frame, opt);

    auto* gauss = app.add_subcommand("gauss", "Gauss map checks on integrated frames");
    add_out(gauss, opt);
    add_tol(gauss, opt);

    auto* variation = app.add_subcommand("variation", "Second-variation signs and Jacobi kernel");
    variation->add_option("--samples", opt.samples, "Random normal fields")->capture_default_str();
    variation->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    add_out(variation, opt);

    auto* certify = app.add_subcommand("certify", "Maximum-principle inequality scan");
    certify->add_option("--n", opt.n, "Rank n");
    certify->add_option("--step", opt.step, "Grid step (10/step must be an integer)");
    certify->add_option("--eps", opt.eps, "Feasibility slack")->capture_default_str();
    certify->add_option("--a-max", opt.a_max, "Upper end of the scan")->capture_default_str();
    certify->add_flag("--from-solution", opt.from_solution, "Also evaluate field maxima of the solution in --out");
    add_out(certify, opt);

    auto* algebra = app.add_subcommand("algebra", "Exact algebra");
    algebra->require_subcommand(1);
    auto* selftest = algebra->add_subcommand("selftest", "Run the exact-arithmetic self-test");
    selftest->add_option("--samples", opt.samples, "Random samples")->capture_default_str();
    selftest->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    add_out(selftest, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    if (threads == 0) {
        if (const char* env = std::getenv("TODA_LAB_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                std::cerr << "input error: TODA_LAB_THREADS must be an integer\n";
                return kInputError;
            }
        }
    }
    if (threads < 0) {
        std::cerr << "input error: --threads must be nonnegative\n";
        return kInputError;
    }
    todalab::set_max_threads(threads);

    if (*solve) return guarded(cmd_solve, opt);
    if (*verify) return guarded(cmd_verify, opt);
    if (*frame) return guarded(cmd_frame, opt);
    if (*gauss) return guarded(cmd_gauss, opt);
    if (*variation) return guarded(cmd_variation, opt);
    if (*certify) return guarded(cmd_certify, opt);
    if (*selftest) return guarded(cmd_algebra_selftest, opt);
    return kInputError;
}

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace todalab::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kInputError = 2 };

struct Options {
    std::string config;
    std::string out = "run";
    std::vector<std::string> checks;
    int samples = 100;
    unsigned seed = 1;
    std::optional<int> n;
    std::optional<double> step;
    double eps = 1e-9;
    double a_max = 2.0;
    std::optional<double> tol;
    bool from_solution = false;
};

int cmd_solve(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_frame(const Options& opt);
int cmd_gauss(const Options& opt);
int cmd_variation(const Options& opt);
int cmd_certify(const Options& opt);
int cmd_algebra_selftest(const Options& opt);

/// Runs a command, mapping exceptions to exit codes and printing them.
int guarded(int (*cmd)(const Options&), const Options& opt);

}  // namespace todalab::cli

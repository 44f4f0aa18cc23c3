#include "commands.hpp"

#include "todalab/algebra.hpp"
#include "todalab/certify.hpp"
#include "todalab/config.hpp"
#include "todalab/frame.hpp"
#include "todalab/gauss.hpp"
#include "todalab/higgs.hpp"
#include "todalab/variation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

namespace todalab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// smallest singular values below this count as a kernel
constexpr double kKernelFloor = 1e-10;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_json(const std::string& dir, const std::string& name, const json& j) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InputError("missing " + path.string());
    try {
        json j;
        is >> j;
        return j;
    } catch (const json::exception& e) {
        throw InputError("malformed " + path.string() + ": " + e.what());
    }
}

std::string field_name(int k) { return "w" + std::to_string(k); }

struct Solution {
    RunConfig config;
    TodaState state;
    double solve_tol = 0.0;
};

Solution load_solution(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("no solution directory " + dir + " (run solve first)");
    Solution s;
    s.config = load_config((fs::path(dir) / "config.json").string());
    const json report = read_json(fs::path(dir) / "solve_report.json");
    if (!report.value("converged", false)) throw InputError(dir + " holds an unconverged solve");
    s.solve_tol = report.at("tol").get<double>();
    const DomainGrid& g = s.config.data.grid;
    for (int k = 1; k <= s.config.data.n; ++k) s.state.w.push_back(read_field(dir, field_name(k), g));
    return s;
}

bool report_line(bool ok, const std::string& what, const std::string& detail) {
    (ok ? std::cout : std::cerr) << (ok ? "ok   " : "FAIL ") << what << ": " << detail << '\n';
    return ok;
}

std::string num(double v) { return format_double(v); }

// Tolerance for a residual of a solution that converged to solve_tol.
double toda_tolerance(const Options& opt, const Solution& s) { return opt.tol.value_or(10.0 * s.solve_tol); }

}  // namespace

int cmd_solve(const Options& opt) {
    if (opt.config.empty()) throw InputError("solve needs --config");
    RunConfig cfg = load_config(opt.config);
    if (opt.tol) {
        if (!(*opt.tol > 0.0)) throw InputError("--tol must be positive");
        cfg.solver.tol = *opt.tol;
    }
    json report = {{"tol", cfg.solver.tol}};
    SolveResult res;
    try {
        res = solve_toda(cfg.data, std::nullopt, cfg.solver);
    } catch (const SolverError& e) {
        report["iterations"] = e.report.iterations;
        report["residual_history"] = e.report.residual_history;
        report["converged"] = false;
        report["error"] = e.what();
        write_json(opt.out, "solve_report.json", report);
        report_line(false, "solve", e.what());
        return kCheckFailed;
    }
    for (int k = 1; k <= cfg.data.n; ++k) write_field(res.state.w[k - 1], opt.out, field_name(k));
    write_json(opt.out, "config.json", config_to_json(cfg));
    const double residual = max_residual(toda_residual(res.state, cfg.data));
    report["iterations"] = res.report.iterations;
    report["residual_history"] = res.report.residual_history;
    report["converged"] = res.report.converged;
    report["final_residual"] = residual;
    write_json(opt.out, "solve_report.json", report);
    report_line(true, "solve",
                std::to_string(res.report.iterations) + " Newton steps, residual " + num(residual) + " -> " + opt.out);
    return kOk;
}

int cmd_verify(const Options& opt) {
    const Solution s = load_solution(opt.out);
    const CyclicData& d = s.config.data;
    const TodaState& st = s.state;
    std::vector<std::string> checks = opt.checks;
    if (checks.empty()) {
        checks = {"toda", "star", "divisor", "hitchin", "gauge"};
        if (d.n == 2) checks.erase(checks.begin() + 1);
    }
    const std::set<std::string> known{"toda", "star", "divisor", "hitchin", "gauge", "g2"};
    for (const auto& c : checks)
        if (!known.count(c)) throw InputError("unknown check '" + c + "' (toda, star, divisor, hitchin, gauge, g2)");
    if (std::count(checks.begin(), checks.end(), "g2") && d.n != 3) throw InputError("the g2 check needs n = 3");

    json out = json::object();
    json higgs = json::object();
    bool all = true;
    const double toda_tol = toda_tolerance(opt, s);
    std::vector<ScalarField> toda_r;
    auto toda_res = [&]() -> const std::vector<ScalarField>& {
        if (toda_r.empty()) toda_r = toda_residual(st, d);
        return toda_r;
    };

    for (const auto& c : checks) {
        bool ok = false;
        json r;
        if (c == "toda") {
            const double m = max_residual(toda_res());
            ok = m <= toda_tol;
            r = {{"max_residual", m}, {"tol", toda_tol}};
            report_line(ok, "toda", "max residual " + num(m) + " (tol " + num(toda_tol) + ")");
        } else if (c == "star" && d.n == 2) {
            r = {{"applicable", false}};
            report_line(true, "star", "not applicable for n = 2");
        } else if (c == "star") {
            const auto star = check_star(st, d);
            ok = star.holds;
            r = {{"holds", star.holds},
                 {"borderline", star.borderline},
                 {"min_values", star.min_values},
                 {"positive_fraction", star.positive_fraction}};
            double lo = star.min_values.empty() ? 0.0 : *std::min_element(star.min_values.begin(), star.min_values.end());
            report_line(ok, "star", std::string(star.holds ? "holds" : "fails") + ", smallest chain value " + num(lo));
        } else if (c == "divisor") {
            const auto chain = check_divisor_chain(d);
            ok = chain.holds;
            json pairs = json::array();
            for (const auto& p : chain.pairs)
                pairs.push_back({{"lhs", p.lhs},
                                 {"rhs", p.rhs},
                                 {"lhs_divisor", describe(p.lhs_divisor)},
                                 {"rhs_divisor", describe(p.rhs_divisor)},
                                 {"precedes", p.precedes}});
            r = {{"holds", chain.holds}, {"pairs", pairs}};
            report_line(ok, "divisor", chain.holds ? "chain holds" : "chain fails");
        } else if (c == "hitchin") {
            const auto hr = hitchin_residual(st, d);
            const auto& tr = toda_res();
            double diff = 0.0, scale = 1.0;
            for (std::size_t k = 0; k < hr.size(); ++k)
                for (std::size_t p = 0; p < hr[k].values.size(); ++p) {
                    diff = std::max(diff, std::abs(hr[k].values[p] - tr[k].values[p]));
                    scale = std::max(scale, std::abs(tr[k].values[p]));
                }
            const auto shape = commutator_shape(st, d);
            const double hmax = max_residual(hr);
            ok = diff <= 1e-12 * scale && hmax <= toda_tol && shape.max_off_diagonal <= 1e-12;
            r = {{"max_residual", hmax},
                 {"toda_difference", diff},
                 {"commutator_off_diagonal", shape.max_off_diagonal},
                 {"commutator_dual_defect", shape.max_dual_defect},
                 {"commutator_unit_entry", shape.max_unit_entry},
                 {"tol", toda_tol}};
            higgs["hitchin"] = r;
            report_line(ok, "hitchin", "residual " + num(hmax) + ", differs from toda by " + num(diff));
        } else if (c == "gauge") {
            const auto gr = gauge_identity(st, d);
            const double h = d.grid.h();
            const double tol = opt.tol.value_or(d.grid.mode == DomainMode::Torus ? 1e-10 : 10.0 * h * h);
            ok = gr.max_residual <= tol && gr.max_imaginary <= tol;
            r = {{"max_residual", gr.max_residual}, {"max_imaginary", gr.max_imaginary}, {"tol", tol}};
            higgs["gauge"] = r;
            report_line(ok, "gauge", "max residual " + num(gr.max_residual) + " (tol " + num(tol) + ")");
        } else if (c == "g2") {
            const double tol = opt.tol.value_or(1e-8);
            const auto g2 = g2_checks(st, d, tol);
            ok = g2.pattern_holds && g2.constraint <= tol;
            r = {{"constraint", g2.constraint},
                 {"varpi_residual", g2.varpi_residual},
                 {"pattern_residual", g2.pattern_residual},
                 {"so_q_residual", g2.so_q_residual},
                 {"pattern_holds", g2.pattern_holds},
                 {"tol", tol}};
            higgs["g2"] = r;
            report_line(ok, "g2", "h3 - h1 h2/4 = " + num(g2.constraint) + ", pattern " + (g2.pattern_holds ? "holds" : "fails"));
        }
        r["passed"] = ok;
        out[c] = r;
        all = all && ok;
    }
    out["passed"] = all;
    write_json(opt.out, "verify_report.json", out);
    if (!higgs.empty()) write_json(opt.out, "higgs_report.json", higgs);
    return all ? kOk : kCheckFailed;
}

int cmd_frame(const Options& opt) {
    const Solution s = load_solution(opt.out);
    const CyclicData& d = s.config.data;
    const double residual = max_residual(toda_residual(s.state, d));
    if (residual > 10.0 * s.solve_tol)
        throw InputError("refusing to build frames: toda residual " + num(residual) + " exceeds 10x the solve tolerance " +
                         num(s.solve_tol));
    const ConnectionForm omega = assemble_omega(s.state, d);
    const auto gc = gauss_codazzi_residual(omega);
    const DomainGrid& g = d.grid;
    const int base = g.mode == DomainMode::Torus ? 0 : g.N / 2;
    const FrameField frames = integrate_frame(omega, base, base);
    const auto drift = frame_drift(frames);
    const double h = g.h();
    const double stol = opt.tol.value_or(g.mode == DomainMode::Torus ? 1e-6 : 10.0 * h * h);
    const auto structure = verify_structure(frames, s.state, d, stol);
    write_frames(frames, (fs::path(opt.out) / "frames.bin").string());

    json rep = {{"base", {base, base}},
                {"so_defect", so_defect(omega)},
                {"gauss_codazzi",
                 {{"max_total", gc.max_total},
                  {"max_diagonal", gc.max_diagonal},
                  {"max_first_off", gc.max_first_off},
                  {"max_second_off", gc.max_second_off}}},
                {"drift", {{"position_norm", drift.position_norm}, {"gram", drift.gram}}},
                {"structure",
                 {{"position_norm", structure.position_norm},
                  {"gram", structure.gram},
                  {"tangent_span", structure.tangent_span},
                  {"first_fundamental", structure.first_fundamental},
                  {"block_pattern", structure.block_pattern},
                  {"second_fundamental", structure.second_fundamental},
                  {"tol", structure.tol},
                  {"passed", structure.passed()}}},
                {"toda_residual", residual}};
    bool ok = true;
    ok &= report_line(drift.position_norm < 1e-8 && drift.gram < 1e-8, "frame drift",
                      "|<F,F>+1| " + num(drift.position_norm) + ", gram " + num(drift.gram));
    ok &= report_line(structure.passed(), "frame structure", "tol " + num(stol));
    // torus solutions are constant, so the connection is flat to roundoff; on the
    // disk the plaquette curvature is a second-order discretization error
    if (g.mode == DomainMode::Torus)
        ok &= report_line(gc.max_total < 1e-10, "gauss-codazzi", "max curvature " + num(gc.max_total));
    else
        report_line(true, "gauss-codazzi",
                    "max curvature " + num(gc.max_total) + ", " + num(gc.max_total / (h * h)) + " h^2 (not gated)");
    if (g.mode == DomainMode::Torus) {
        const auto m = monodromy(omega, &s.state);
        rep["monodromy"] = {{"commutator", m.commutator},
                            {"metric_x", m.metric_x},
                            {"metric_y", m.metric_y},
                            {"has_phi", m.has_phi},
                            {"phi_residual", m.phi_residual}};
        ok &= report_line(m.commutator < 1e-6 && m.metric_x < 1e-8 && m.metric_y < 1e-8, "monodromy",
                          "commutator " + num(m.commutator));
    } else {
        rep["monodromy"] = nullptr;
    }
    rep["passed"] = ok;
    write_json(opt.out, "frame_report.json", rep);
    return ok ? kOk : kCheckFailed;
}

int cmd_gauss(const Options& opt) {
    const Solution s = load_solution(opt.out);
    const CyclicData& d = s.config.data;
    const fs::path fpath = fs::path(opt.out) / "frames.bin";
    if (!fs::exists(fpath)) throw InputError("no frames in " + opt.out + " (run frame first)");
    const FrameField frames = read_frames(fpath.string());
    require_same_grid(frames.grid, d.grid, "gauss: frames");
    // disk solutions carry an O(h^2) discretization error in both quantities
    const double h = d.grid.h();
    const double tol = opt.tol.value_or(d.grid.mode == DomainMode::Torus ? 1e-4 : h * h);
    const auto pm = pullback_metric(frames, s.state, d);
    json rep = {{"conformality_max", pm.conformality}, {"formula_rel_err", pm.formula_rel_err}, {"tol", tol}};
    bool ok = true;
    ok &= report_line(pm.formula_rel_err < tol, "pullback formula", "relative error " + num(pm.formula_rel_err));
    ok &= report_line(pm.conformality < tol, "conformality", "defect " + num(pm.conformality));
    if (d.n == 3 && g2_constraint_holds(s.state, 1e-8)) {
        const auto jh = jholo_residual(frames, s.state, d);
        rep["jholo_max"] = jh.max_residual;
        rep["jholo_anti_max"] = jh.max_anti_residual;
        rep["phi_residual_max"] = jh.phi_residual_max;
        ok &= report_line(jh.max_residual < 1e-6, "J-holomorphy", "|F x U1 - V1| " + num(jh.max_residual));
    } else {
        rep["jholo_max"] = nullptr;
        rep["phi_residual_max"] = nullptr;
    }
    rep["passed"] = ok;
    write_json(opt.out, "gauss_report.json", rep);

    std::ofstream csv(fs::path(opt.out) / "pullback.csv");
    if (!csv) throw std::runtime_error("cannot write pullback.csv");
    csv << "i,j,x,y,factor_difference,factor_formula\n";
    const DomainGrid& g = d.grid;
    for (int j = 0; j < g.N; ++j)
        for (int i = 0; i < g.N; ++i) {
            if (g.is_boundary(i, j)) continue;
            const std::size_t p = g.index(i, j);
            csv << i << ',' << j << ',' << num(g.x(i)) << ',' << num(g.y(j)) << ','
                << num(0.5 * pm.finite_difference[p].trace()) << ',' << num(pm.formula[p]) << '\n';
        }
    return ok ? kOk : kCheckFailed;
}

int cmd_variation(const Options& opt) {
    if (opt.samples < 1) throw InputError("--samples must be positive");
    const Solution s = load_solution(opt.out);
    const CyclicData& d = s.config.data;
    // for n = 2 the sign claim needs no hypothesis
    const bool hypothesis = d.n == 2 || check_star(s.state, d).holds;
    const auto mask = collar_mask(d.grid);
    const auto geom = NormalGeometry::build(s.state, d);
    std::mt19937_64 rng(opt.seed);
    json samples = json::array();
    int violations = 0;
    double vmin = INFINITY, vmax = -INFINITY;
    for (int k = 0; k < opt.samples; ++k) {
        const Parity parity = (d.n == 2 || k % 2 == 1) ? Parity::Minus : Parity::Plus;
        const auto xi = random_bump(d.grid, d.n, parity, rng, mask);
        const double v = second_variation(xi, geom);
        const int claimed = claimed_sign(xi);
        const bool ok = (claimed > 0 && v > 0.0) || (claimed < 0 && v < 0.0);
        if (!ok) ++violations;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        samples.push_back({{"parity", parity_name(parity)}, {"value", v}, {"claimed_sign", claimed}, {"ok", ok}});
    }
    const auto op = assemble_jacobi(geom, mask);
    const double smin = jacobi_min_singular(op);
    json rep = {{"seed", opt.seed},
                {"star_holds", hypothesis},
                {"samples", samples},
                {"violations", violations},
                {"min_value", vmin},
                {"max_value", vmax},
                {"min_singular_value", smin},
                {"unknowns", op.weight.size()}};
    bool ok = true;
    ok &= report_line(hypothesis, "hypothesis",
                      d.n == 2 ? "none needed for n = 2"
                               : (hypothesis ? "norm chain holds" : "norm chain fails; signs are not claimed"));
    ok &= report_line(violations == 0, "second variation signs",
                      std::to_string(violations) + " violations in " + std::to_string(opt.samples) + " samples");
    ok &= report_line(smin > kKernelFloor, "Jacobi kernel", "min singular value " + num(smin));
    rep["passed"] = ok;
    write_json(opt.out, "variation_report.json", rep);
    return ok ? kOk : kCheckFailed;
}

int cmd_certify(const Options& opt) {
    std::optional<Solution> sol;
    int n = opt.n.value_or(3);
    if (opt.from_solution) {
        sol = load_solution(opt.out);
        if (opt.n && *opt.n != sol->config.data.n) throw InputError("--n disagrees with the solution's n");
        n = sol->config.data.n;
    }
    if (n < 2 || n > 8) throw InputError("--n must lie in 2..8");
    const double step = opt.step.value_or(n <= 3 ? 1e-3 : n == 4 ? 1e-2 : 2.5e-2);
    DichotomyReport rep;
    try {
        rep = dichotomy_scan(n, opt.a_max, step, opt.eps);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    json out = {{"n", n},
                {"step", step},
                {"a_max", opt.a_max},
                {"eps", opt.eps},
                {"axis_points", rep.axis_points},
                {"grid_tuples", rep.grid_tuples},
                {"feasible", rep.feasible},
                {"unit_feasible", rep.unit_feasible},
                {"counterexample_count", rep.counterexample_count},
                {"counterexamples", rep.counterexamples},
                {"exact_failures", rep.exact_failures},
                {"margins",
                 {{"max_feasible_a", rep.max_feasible_a},
                  {"below_one_margin", rep.below_one_margin},
                  {"closest_tuple", rep.closest_tuple},
                  {"delta", rep.delta},
                  {"delta_allowed", rep.delta_allowed}}},
                {"field_A_values", nullptr},
                {"maximizer_points", nullptr}};
    bool ok = true;
    ok &= report_line(rep.counterexample_count == 0 && rep.delta <= rep.delta_allowed, "dichotomy",
                      std::to_string(rep.counterexample_count) + " counterexamples in " +
                          std::to_string(rep.grid_tuples) + " tuples");
    ok &= report_line(rep.exact_failures == 0, "rational re-check",
                      std::to_string(rep.exact_failures) + " of " + std::to_string(rep.feasible) + " feasible tuples fail");
    if (sol) {
        const auto fm = field_maxima(sol->state, sol->config.data);
        const DomainGrid& g = sol->config.data.grid;
        json points = json::array();
        for (const auto& r : fm.ratios)
            points.push_back({{"name", r.name},
                              {"value", r.value},
                              {"i", r.i},
                              {"j", r.j},
                              {"x", g.x(r.i)},
                              {"y", g.y(r.j)},
                              {"laplacian", r.laplacian},
                              {"predicted", r.predicted},
                              {"interior", r.interior},
                              {"at_zero", r.at_zero},
                              {"mp_holds", r.mp_holds}});
        out["field_A_values"] = fm.tuple.A;
        out["maximizer_points"] = points;
        out["field_residuals"] = fm.residuals;
        out["a2_prime"] = fm.a2_prime;
        out["spot_checks_pass"] = fm.spot_checks_pass;
        ok &= report_line(fm.spot_checks_pass, "maximum principle spot checks",
                          fm.spot_checks_pass ? "hold at interior maximizers" : "fail at some maximizer");
    }
    out["passed"] = ok;
    write_json(opt.out, "certify_report.json", out);
    return ok ? kOk : kCheckFailed;
}

int cmd_algebra_selftest(const Options& opt) {
    if (opt.samples < 1) throw InputError("--samples must be positive");
    const auto rep = algebra_selftest(opt.seed, opt.samples);
    for (const auto& p : rep.passed) report_line(true, "algebra", p);
    for (const auto& f : rep.failures) report_line(false, "algebra", f);
    write_json(opt.out, "algebra_report.json",
               {{"seed", opt.seed}, {"samples", opt.samples}, {"passed", rep.passed}, {"failures", rep.failures}});
    return rep.ok() ? kOk : kCheckFailed;
}

int guarded(int (*cmd)(const Options&), const Options& opt) {
    try {
        return cmd(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kInputError;
}

}  // namespace todalab::cli

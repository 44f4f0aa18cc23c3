#include "todalab/config.hpp"

#include <fstream>
#include <set>

namespace todalab {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

const json& required(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key \"" + key + "\"");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<int>();
}

cplx complex_value(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected [re, im]");
    return {number(v[0], where), number(v[1], where)};
}

Poly polynomial(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty coefficient array");
    std::vector<cplx> c;
    for (std::size_t k = 0; k < v.size(); ++k) c.push_back(complex_value(v[k], where + "[" + std::to_string(k) + "]"));
    return Poly(std::move(c));
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json poly_json(const Poly& p) {
    json a = json::array();
    for (cplx c : p.coeffs) a.push_back(complex_json(c));
    return a;
}

}  // namespace

RunConfig parse_config(const json& j) {
    only_keys(j, {"n", "mode", "grid", "alpha", "solver", "deg_Ln_negative"}, "config");
    RunConfig c;
    CyclicData& d = c.data;
    d.n = integer(required(j, "n", "config"), "config.n");
    if (d.n < 2) throw ConfigError("config.n: must be at least 2");

    const json& mode = required(j, "mode", "config");
    if (!mode.is_string()) throw ConfigError("config.mode: expected \"torus\" or \"disk\"");
    DomainMode m;
    try {
        m = parse_mode(mode.get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config.mode: ") + e.what());
    }

    const json& grid = required(j, "grid", "config");
    only_keys(grid, {"N", "L"}, "config.grid");
    const int N = integer(required(grid, "N", "config.grid"), "config.grid.N");
    const double L = number(required(grid, "L", "config.grid"), "config.grid.L");
    try {
        d.grid = DomainGrid::make(m, N, L);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config.grid: ") + e.what());
    }

    const json& alpha = required(j, "alpha", "config");
    only_keys(alpha, {"a1", "a", "an_plus", "an_minus"}, "config.alpha");
    if (alpha.contains("a1")) d.alpha1 = complex_value(alpha.at("a1"), "config.alpha.a1");
    if (alpha.contains("a")) {
        const json& a = alpha.at("a");
        if (!a.is_array()) throw ConfigError("config.alpha.a: expected an array of polynomials");
        for (std::size_t k = 0; k < a.size(); ++k)
            d.alpha.push_back(polynomial(a[k], "config.alpha.a[" + std::to_string(k) + "]"));
    } else if (d.n > 2) {
        throw ConfigError("config.alpha: missing required key \"a\"");
    }
    if (static_cast<int>(d.alpha.size()) != d.n - 2)
        throw ConfigError("config.alpha.a: expected " + std::to_string(d.n - 2) + " polynomials for n = " +
                          std::to_string(d.n));
    d.alpha_plus = polynomial(required(alpha, "an_plus", "config.alpha"), "config.alpha.an_plus");
    d.alpha_minus = polynomial(required(alpha, "an_minus", "config.alpha"), "config.alpha.an_minus");

    if (j.contains("deg_Ln_negative")) {
        if (!j.at("deg_Ln_negative").is_boolean()) throw ConfigError("config.deg_Ln_negative: expected a boolean");
        d.deg_Ln_negative = j.at("deg_Ln_negative").get<bool>();
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        only_keys(s, {"tol", "max_iter", "damping"}, "config.solver");
        if (s.contains("tol")) c.solver.tol = number(s.at("tol"), "config.solver.tol");
        if (s.contains("max_iter")) c.solver.max_iter = integer(s.at("max_iter"), "config.solver.max_iter");
        if (s.contains("damping")) c.solver.damping = number(s.at("damping"), "config.solver.damping");
        if (!(c.solver.tol > 0.0)) throw ConfigError("config.solver.tol: must be positive");
        if (c.solver.max_iter < 1) throw ConfigError("config.solver.max_iter: must be at least 1");
        if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0))
            throw ConfigError("config.solver.damping: must lie in (0, 1]");
    }

    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const RunConfig& c) {
    const CyclicData& d = c.data;
    json a = json::array();
    for (const auto& p : d.alpha) a.push_back(poly_json(p));
    return {{"n", d.n},
            {"mode", to_string(d.grid.mode)},
            {"grid", {{"N", d.grid.N}, {"L", d.grid.L}}},
            {"alpha",
             {{"a1", complex_json(d.alpha1)},
              {"a", a},
              {"an_plus", poly_json(d.alpha_plus)},
              {"an_minus", poly_json(d.alpha_minus)}}},
            {"solver", {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"damping", c.solver.damping}}},
            {"deg_Ln_negative", d.deg_Ln_negative}};
}

}  // namespace todalab

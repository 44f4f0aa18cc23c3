#include "todalab/field.hpp"
#include "todalab/parallel.hpp"

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace todalab {

std::string to_string(DomainMode m) { return m == DomainMode::Torus ? "torus" : "disk"; }

DomainMode parse_mode(const std::string& s) {
    if (s == "torus") return DomainMode::Torus;
    if (s == "disk") return DomainMode::Disk;
    throw std::invalid_argument("unknown domain mode '" + s + "' (expected torus or disk)");
}

DomainGrid DomainGrid::make(DomainMode mode, int N, double L) {
    if (N < 8) throw std::invalid_argument("DomainGrid: N must be >= 8");
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("DomainGrid: L must be positive");
    return DomainGrid{mode, N, L};
}

void require_same_grid(const DomainGrid& a, const DomainGrid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max_abs_interior() const {
    double m = 0.0;
    for (int j = 0; j < grid.N; ++j)
        for (int i = 0; i < grid.N; ++i)
            if (!grid.is_boundary(i, j)) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

double MatrixForm2::max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
}

double diff(const ScalarField& f, int i, int j, Axis axis, int order) {
    return grid_derivative(f.grid, i, j, axis, order, [&](int a, int b) { return f(a, b); });
}

double laplace_zzbar_at(const ScalarField& f, int i, int j) {
    const DomainGrid& g = f.grid;
    const double h = g.h();
    const double c = f(i, j);
    const double e = f(g.wrap(i + 1), j), w = f(g.wrap(i - 1), j);
    const double n = f(i, g.wrap(j + 1)), s = f(i, g.wrap(j - 1));
    return (e + w + n + s - 4.0 * c) / (4.0 * h * h);
}

ScalarField laplace_zzbar(const ScalarField& f) {
    ScalarField out(f.grid, 0.0);
    const DomainGrid& g = f.grid;
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        if (!g.is_boundary(i, j)) out.values[p] = laplace_zzbar_at(f, i, j);
    });
    return out;
}

Form1 dc_form(const ScalarField& w) {
    Form1 out{ScalarField(w.grid), ScalarField(w.grid)};
    const DomainGrid& g = w.grid;
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        out.x.values[p] = diff(w, i, j, Axis::Y);
        out.y.values[p] = -diff(w, i, j, Axis::X);
    });
    return out;
}

namespace {

using Mat = Eigen::MatrixXd;

// exp(m) - I, summed directly so that small transports keep relative accuracy.
Mat expm1_matrix(const Mat& m) {
    const double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (nrm > 0.5) return Mat(m.exp()) - Mat::Identity(m.rows(), m.cols());
    Mat term = m;
    Mat sum = m;
    for (int k = 2; k < 40; ++k) {
        term = term * m / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-30) break;
    }
    return sum;
}

// log(I + e) for small e; falls back to the Schur-based logarithm otherwise.
Mat log1p_matrix(const Mat& e) {
    const double nrm = e.cwiseAbs().rowwise().sum().maxCoeff();
    if (nrm > 0.25) return Mat((Mat::Identity(e.rows(), e.cols()) + e).log());
    Mat term = e;
    Mat sum = e;
    for (int k = 2; k < 80; ++k) {
        term = -term * e;
        sum += term / static_cast<double>(k);
        if (term.cwiseAbs().maxCoeff() < 1e-30) break;
    }
    return sum;
}

// (I + a)(I + b) - I
Mat compose_increments(const Mat& a, const Mat& b) { return a + b + a * b; }

}  // namespace

MatrixForm2 plaquette_curvature(const MatrixForm1& a) {
    const DomainGrid& g = a.grid;
    if (a.d <= 0) throw std::invalid_argument("plaquette_curvature: matrices must be square with d > 0");
    if (a.xdata.size() != g.points() * a.d * a.d || a.ydata.size() != a.xdata.size())
        throw std::invalid_argument("plaquette_curvature: component size mismatch");
    MatrixForm2 out(g, a.d);
    const int m = g.plaquettes_per_side();
    const double h = g.h();
    parallel_for(static_cast<std::size_t>(m) * m, [&](std::size_t k) {
        const int i = static_cast<int>(k % m), j = static_cast<int>(k / m);
        const std::size_t p00 = g.index(i, j), p10 = g.index(g.wrap(i + 1), j);
        const std::size_t p11 = g.index(g.wrap(i + 1), g.wrap(j + 1)), p01 = g.index(i, g.wrap(j + 1));
        const Mat t1 = expm1_matrix(0.5 * h * (Mat(a.x(p00)) + Mat(a.x(p10))));
        const Mat t2 = expm1_matrix(0.5 * h * (Mat(a.y(p10)) + Mat(a.y(p11))));
        const Mat s3 = expm1_matrix(-0.5 * h * (Mat(a.x(p01)) + Mat(a.x(p11))));
        const Mat s4 = expm1_matrix(-0.5 * h * (Mat(a.y(p00)) + Mat(a.y(p01))));
        const Mat e = compose_increments(compose_increments(compose_increments(t1, t2), s3), s4);
        out.at(k) = log1p_matrix(e) / (h * h);
    });
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_csv(const std::vector<double>& vals, int n, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) os << ',';
            os << format_double(vals[static_cast<std::size_t>(j) * n + i]);
        }
        os << '\n';
    }
}

void write_meta(const DomainGrid& g, const std::string& kind, const fs::path& path) {
    json meta = {{"mode", to_string(g.mode)}, {"N", g.N}, {"L", g.L}, {"kind", kind}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << meta.dump(2) << '\n';
}

DomainGrid read_meta(const fs::path& path, const std::string& want_kind) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("missing field sidecar " + path.string());
    json meta;
    try {
        is >> meta;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed field header " + path.string() + ": " + e.what());
    }
    for (const char* key : {"mode", "N", "L", "kind"})
        if (!meta.contains(key)) throw std::invalid_argument("malformed field header: missing '" + std::string(key) + "'");
    if (!meta["N"].is_number_integer() || !meta["L"].is_number() || !meta["mode"].is_string() ||
        !meta["kind"].is_string())
        throw std::invalid_argument("malformed field header " + path.string());
    if (meta["kind"].get<std::string>() != want_kind)
        throw std::invalid_argument("field kind mismatch in " + path.string() + ": expected " + want_kind);
    return DomainGrid::make(parse_mode(meta["mode"].get<std::string>()), meta["N"].get<int>(), meta["L"].get<double>());
}

std::vector<double> read_csv(const fs::path& path, int n) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("missing field data " + path.string());
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n) * n);
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ++rows;
        if (rows > n) throw std::invalid_argument("dimension mismatch in " + path.string() + ": more than N rows");
        int cols = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            double v = 0.0;
            auto res = std::from_chars(p, comma, v);
            if (res.ec != std::errc() || res.ptr != comma)
                throw std::invalid_argument("malformed number in " + path.string() + " row " + std::to_string(rows));
            vals.push_back(v);
            ++cols;
            p = comma + 1;
        }
        if (cols != n)
            throw std::invalid_argument("dimension mismatch in " + path.string() + ": row " + std::to_string(rows) +
                                        " has " + std::to_string(cols) + " values, expected " + std::to_string(n));
    }
    if (rows != n)
        throw std::invalid_argument("dimension mismatch in " + path.string() + ": " + std::to_string(rows) +
                                    " rows, expected " + std::to_string(n));
    return vals;
}

void check_expected(const DomainGrid& got, const std::optional<DomainGrid>& expected, const std::string& name) {
    if (!expected) return;
    if (got.mode != expected->mode)
        throw std::invalid_argument("field " + name + ": mode mismatch (" + to_string(got.mode) + " vs " +
                                    to_string(expected->mode) + ")");
    if (got.N != expected->N || got.L != expected->L)
        throw std::invalid_argument("field " + name + ": grid size mismatch");
}

}  // namespace

void write_field(const ScalarField& f, const std::string& dir, const std::string& name, const std::string& kind) {
    fs::create_directories(dir);
    write_csv(f.values, f.grid.N, fs::path(dir) / (name + ".csv"));
    write_meta(f.grid, kind, fs::path(dir) / (name + ".meta.json"));
}

ScalarField read_field(const std::string& dir, const std::string& name, const std::optional<DomainGrid>& expected) {
    const DomainGrid g = read_meta(fs::path(dir) / (name + ".meta.json"), "scalar");
    check_expected(g, expected, name);
    ScalarField f(g);
    f.values = read_csv(fs::path(dir) / (name + ".csv"), g.N);
    return f;
}

void write_complex_field(const ComplexField& f, const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    std::vector<double> re(f.values.size()), im(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        re[k] = f.values[k].real();
        im[k] = f.values[k].imag();
    }
    write_csv(re, f.grid.N, fs::path(dir) / (name + "_re.csv"));
    write_meta(f.grid, "complex-re", fs::path(dir) / (name + "_re.meta.json"));
    write_csv(im, f.grid.N, fs::path(dir) / (name + "_im.csv"));
    write_meta(f.grid, "complex-im", fs::path(dir) / (name + "_im.meta.json"));
}

ComplexField read_complex_field(const std::string& dir, const std::string& name,
                                const std::optional<DomainGrid>& expected) {
    const DomainGrid g = read_meta(fs::path(dir) / (name + "_re.meta.json"), "complex-re");
    const DomainGrid gi = read_meta(fs::path(dir) / (name + "_im.meta.json"), "complex-im");
    if (g != gi) throw std::invalid_argument("field " + name + ": real and imaginary grids differ");
    check_expected(g, expected, name);
    const auto re = read_csv(fs::path(dir) / (name + "_re.csv"), g.N);
    const auto im = read_csv(fs::path(dir) / (name + "_im.csv"), g.N);
    ComplexField f(g);
    for (std::size_t k = 0; k < re.size(); ++k) f.values[k] = {re[k], im[k]};
    return f;
}

}  // namespace todalab

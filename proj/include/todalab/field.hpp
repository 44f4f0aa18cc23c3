#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace todalab {

enum class DomainMode { Torus, Disk };

std::string to_string(DomainMode m);
DomainMode parse_mode(const std::string& s);

/// Square grid: periodic torus of period L, or the square [-L/2, L/2]^2 with
/// a Dirichlet boundary ring.
struct DomainGrid {
    DomainMode mode = DomainMode::Torus;
    int N = 0;
    double L = 1.0;

    static DomainGrid make(DomainMode mode, int N, double L);

    double h() const { return mode == DomainMode::Torus ? L / N : L / (N - 1); }
    double x(int i) const { return mode == DomainMode::Torus ? i * h() : -0.5 * L + i * h(); }
    double y(int j) const { return x(j); }
    std::complex<double> z(int i, int j) const { return {x(i), y(j)}; }
    std::size_t points() const { return static_cast<std::size_t>(N) * N; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * N + i; }
    int wrap(int i) const { return ((i % N) + N) % N; }
    bool is_boundary(int i, int j) const {
        return mode == DomainMode::Disk && (i == 0 || j == 0 || i == N - 1 || j == N - 1);
    }
    /// Plaquettes are indexed by their lower-left corner.
    int plaquettes_per_side() const { return mode == DomainMode::Torus ? N : N - 1; }

    friend bool operator==(const DomainGrid& a, const DomainGrid& b) {
        return a.mode == b.mode && a.N == b.N && a.L == b.L;
    }
    friend bool operator!=(const DomainGrid& a, const DomainGrid& b) { return !(a == b); }
};

void require_same_grid(const DomainGrid& a, const DomainGrid& b, const char* what);

/// Row-major values: entry (i, j) is x-index i, y-index j, stored at j*N + i.
struct ScalarField {
    DomainGrid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const DomainGrid& g, double v = 0.0) : grid(g), values(g.points(), v) {}

    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double max_abs() const;
    double max_abs_interior() const;
};

struct ComplexField {
    DomainGrid grid;
    std::vector<std::complex<double>> values;

    ComplexField() = default;
    explicit ComplexField(const DomainGrid& g) : grid(g), values(g.points()) {}

    std::complex<double>& operator()(int i, int j) { return values[grid.index(i, j)]; }
    std::complex<double> operator()(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Scalar 1-form: components along dx and dy.
struct Form1 {
    ScalarField x;
    ScalarField y;
};

/// d x d matrix-valued 1-form with per-point dx and dy components.
struct MatrixForm1 {
    DomainGrid grid;
    int d = 0;
    std::vector<double> xdata;
    std::vector<double> ydata;

    MatrixForm1() = default;
    MatrixForm1(const DomainGrid& g, int dim)
        : grid(g), d(dim), xdata(g.points() * dim * dim, 0.0), ydata(g.points() * dim * dim, 0.0) {}

    using Map = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    Map x(std::size_t p) { return Map(xdata.data() + p * d * d, d, d); }
    Map y(std::size_t p) { return Map(ydata.data() + p * d * d, d, d); }
    ConstMap x(std::size_t p) const { return ConstMap(xdata.data() + p * d * d, d, d); }
    ConstMap y(std::size_t p) const { return ConstMap(ydata.data() + p * d * d, d, d); }
};

/// d x d matrix-valued 2-form: curvature density per plaquette.
struct MatrixForm2 {
    DomainGrid grid;
    int d = 0;
    std::vector<double> data;

    MatrixForm2() = default;
    MatrixForm2(const DomainGrid& g, int dim)
        : grid(g), d(dim),
          data(static_cast<std::size_t>(g.plaquettes_per_side()) * g.plaquettes_per_side() * dim * dim, 0.0) {}

    std::size_t count() const { return data.size() / (static_cast<std::size_t>(d) * d); }
    MatrixForm1::Map at(std::size_t k) { return MatrixForm1::Map(data.data() + k * d * d, d, d); }
    MatrixForm1::ConstMap at(std::size_t k) const { return MatrixForm1::ConstMap(data.data() + k * d * d, d, d); }
    double max_abs() const;
};

enum class Axis { X, Y };

/// First derivative along an axis at (i, j). Central differences of the given
/// order (2 or 4) in the interior and on the torus; one-sided stencils of the
/// same order next to the disk boundary. `get(i, j)` returns the sample.
template <class Get>
auto grid_derivative(const DomainGrid& g, int i, int j, Axis axis, int order, Get&& get) -> decltype(get(i, j)) {
    using T = decltype(get(i, j));
    const double h = g.h();
    const int k = axis == Axis::X ? i : j;
    auto at = [&](int kk) -> T {
        if (g.mode == DomainMode::Torus) kk = g.wrap(kk);
        return axis == Axis::X ? get(kk, j) : get(i, kk);
    };
    const bool torus = g.mode == DomainMode::Torus;
    const int n = g.N;
    if (order == 4) {
        if (torus || (k >= 2 && k <= n - 3))
            return T((8.0 * (at(k + 1) - at(k - 1)) - (at(k + 2) - at(k - 2))) / (12.0 * h));
        if (k == 0)
            return T((-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h));
        if (k == 1)
            return T((-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h));
        if (k == n - 1)
            return T((25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) + 3.0 * at(n - 5)) /
                     (12.0 * h));
        return T((3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) - at(n - 5)) / (12.0 * h));
    }
    if (torus || (k >= 1 && k <= n - 2)) return T((at(k + 1) - at(k - 1)) / (2.0 * h));
    if (k == 0) return T((-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h));
    return T((3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h));
}

double diff(const ScalarField& f, int i, int j, Axis axis, int order = 2);

/// d^2/dz dzbar = (Laplacian)/4 with the 5-point stencil; zero on the disk boundary.
ScalarField laplace_zzbar(const ScalarField& f);

/// 5-point value at one point (no boundary handling for the disk).
double laplace_zzbar_at(const ScalarField& f, int i, int j);

/// (d_y w, -d_x w).
Form1 dc_form(const ScalarField& w);

/// Curvature density log(T_x T_y T_x'^{-1} T_y'^{-1}) / h^2 per plaquette,
/// where the edge transports are exp(h A(midpoint)) for dP = P A.
MatrixForm2 plaquette_curvature(const MatrixForm1& a);

void write_field(const ScalarField& f, const std::string& dir, const std::string& name,
                 const std::string& kind = "scalar");
ScalarField read_field(const std::string& dir, const std::string& name,
                       const std::optional<DomainGrid>& expected = std::nullopt);
void write_complex_field(const ComplexField& f, const std::string& dir, const std::string& name);
ComplexField read_complex_field(const std::string& dir, const std::string& name,
                                const std::optional<DomainGrid>& expected = std::nullopt);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace todalab

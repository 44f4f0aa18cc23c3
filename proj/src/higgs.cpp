#include "todalab/higgs.hpp"

#include "todalab/algebra.hpp"
#include "todalab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace todalab {

namespace {

const cplx I(0.0, 1.0);

std::vector<double> logs_at(const TodaState& s, std::size_t p) {
    std::vector<double> w(s.n());
    for (int k = 0; k < s.n(); ++k) w[k] = s.w[k].values[p];
    return w;
}

void require_match(const TodaState& s, const CyclicData& d) {
    if (s.n() != d.n) throw std::invalid_argument("higgs: state and data disagree on n");
    for (const auto& f : s.w) require_same_grid(f.grid, d.grid, "higgs state");
}

// d_z w = (w_x - i w_y) / 2 for every component.
std::vector<cplx> dz_logs(const TodaState& s, int i, int j, int order) {
    std::vector<cplx> out(s.n());
    for (int k = 0; k < s.n(); ++k) {
        const auto& f = s.w[k];
        const auto get = [&](int a, int b) { return f(a, b); };
        const double wx = grid_derivative(f.grid, i, j, Axis::X, order, get);
        const double wy = grid_derivative(f.grid, i, j, Axis::Y, order, get);
        out[k] = 0.5 * cplx(wx, -wy);
    }
    return out;
}

DenseMatrix<cplx> to_dense(const CMatrix& m) {
    DenseMatrix<cplx> d(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int r = 0; r < d.rows; ++r)
        for (int c = 0; c < d.cols; ++c) d(r, c) = m(r, c);
    return d;
}

}  // namespace

CMatrix higgs_field_at(int n, const std::vector<cplx>& alpha) {
    if (n < 2) throw std::invalid_argument("higgs_field needs n >= 2");
    if (static_cast<int>(alpha.size()) != n + 1) throw std::invalid_argument("higgs_field: expected n + 1 alpha values");
    const int d = 2 * n + 1;
    CMatrix phi = CMatrix::Zero(d, d);
    // alpha[k - 1] maps l_{k-1} to l_k and l_k^{-1} to l_{k-1}^{-1}; alpha[n - 1] is alpha_n^+
    for (int k = 1; k <= n; ++k) {
        phi(line_index(n, k), line_index(n, k - 1)) = alpha[k - 1];
        phi(dual_line_index(n, k - 1), dual_line_index(n, k)) = alpha[k - 1];
    }
    phi(dual_line_index(n, n), line_index(n, n - 1)) = alpha[n];
    phi(dual_line_index(n, n - 1), line_index(n, n)) = alpha[n];
    return phi;
}

CMatrix higgs_field(const CyclicData& data, int i, int j) { return higgs_field_at(data.n, alpha_values_at(data, i, j)); }

Eigen::VectorXd harmonic_metric_at(const std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    Eigen::VectorXd h(2 * n + 1);
    h(n) = 1.0;
    for (int i = 1; i <= n; ++i) {
        h(line_index(n, i)) = std::exp(w[i - 1]);
        h(dual_line_index(n, i)) = std::exp(-w[i - 1]);
    }
    return h;
}

CMatrix higgs_adjoint(const CMatrix& phi, const Eigen::VectorXd& metric) {
    const Eigen::VectorXcd h = metric.cast<cplx>();
    return h.cwiseInverse().asDiagonal() * phi.adjoint() * h.asDiagonal();
}

CMatrix gauge_matrix_at(const std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    const int d = 2 * n + 1;
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix r = CMatrix::Zero(d, d);
    r(n, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double up = std::exp(0.5 * w[i - 1]), down = std::exp(-0.5 * w[i - 1]);
        r(dual_line_index(n, i), u_index(i)) = s * up;
        r(line_index(n, i), u_index(i)) = s * down;
        r(dual_line_index(n, i), v_index(i)) = -I * s * up;
        r(line_index(n, i), v_index(i)) = I * s * down;
    }
    return r;
}

HiggsMatrices higgs_matrices(const TodaState& state, const CyclicData& data, int i, int j, int order) {
    require_match(state, data);
    const int n = data.n;
    const std::size_t p = data.grid.index(i, j);
    const auto w = logs_at(state, p);
    HiggsMatrices m;
    m.phi = higgs_field(data, i, j);
    m.metric = harmonic_metric_at(w);
    m.phi_star = higgs_adjoint(m.phi, m.metric);
    const auto dz = dz_logs(state, i, j, order);
    // d_z log H: -d_z w_i on l_i^{-1}, +d_z w_i on l_i
    Eigen::VectorXcd dlog = Eigen::VectorXcd::Zero(2 * n + 1);
    for (int k = 1; k <= n; ++k) {
        dlog(line_index(n, k)) = dz[k - 1];
        dlog(dual_line_index(n, k)) = -dz[k - 1];
    }
    // dz = dx + i dy, dzbar = dx - i dy
    const CMatrix chern = dlog.asDiagonal();
    m.omega_x = chern + m.phi + m.phi_star;
    m.omega_y = I * chern + I * m.phi - I * m.phi_star;
    m.gauge = gauge_matrix_at(w);
    return m;
}

ComplexConnection hitchin_connection(const TodaState& state, const CyclicData& data, int order) {
    require_match(state, data);
    const DomainGrid& g = data.grid;
    ComplexConnection c;
    c.grid = g;
    c.d = 2 * data.n + 1;
    c.x.resize(g.points());
    c.y.resize(g.points());
    parallel_for(g.points(), [&](std::size_t p) {
        const auto m = higgs_matrices(state, data, static_cast<int>(p % g.N), static_cast<int>(p / g.N), order);
        c.x[p] = m.omega_x;
        c.y[p] = m.omega_y;
    });
    return c;
}

std::vector<ScalarField> hitchin_residual(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    std::vector<ScalarField> r;
    for (int k = 0; k < n; ++k) r.push_back(laplace_zzbar(state.w[k]));
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        if (g.is_boundary(i, j)) return;
        const CMatrix phi = higgs_field(data, i, j);
        const CMatrix star = higgs_adjoint(phi, harmonic_metric_at(logs_at(state, p)));
        const CMatrix comm = phi * star - star * phi;
        for (int k = 1; k <= n; ++k) r[k - 1].values[p] -= comm(line_index(n, k), line_index(n, k)).real();
    });
    return r;
}

CommutatorShape commutator_shape(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    CommutatorShape out;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const CMatrix phi = higgs_field(data, i, j);
        const CMatrix star = higgs_adjoint(phi, harmonic_metric_at(logs_at(state, p)));
        CMatrix comm = phi * star - star * phi;
        const double scale = std::max(1.0, comm.cwiseAbs().maxCoeff());
        for (int k = 1; k <= n; ++k)
            out.max_dual_defect = std::max(
                out.max_dual_defect,
                std::abs(comm(line_index(n, k), line_index(n, k)) + comm(dual_line_index(n, k), dual_line_index(n, k))) /
                    scale);
        out.max_unit_entry = std::max(out.max_unit_entry, std::abs(comm(n, n)) / scale);
        comm.diagonal().setZero();
        out.max_off_diagonal = std::max(out.max_off_diagonal, comm.cwiseAbs().maxCoeff() / scale);
    }
    return out;
}

GaugeReport gauge_identity(const TodaState& state, const CyclicData& data, const ConnectionForm& omega, int order) {
    require_match(state, data);
    const DomainGrid& g = data.grid;
    require_same_grid(omega.grid, g, "gauge_identity");
    if (omega.d != 2 * data.n + 1) throw std::invalid_argument("gauge_identity: connection has the wrong size");
    std::vector<CMatrix> gauge(g.points());
    parallel_for(g.points(), [&](std::size_t p) { gauge[p] = gauge_matrix_at(logs_at(state, p)); });
    GaugeReport rep;
    rep.residual = ScalarField(g);
    std::vector<double> imag(g.points(), 0.0);
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const auto m = higgs_matrices(state, data, i, j, order);
        const auto get = [&](int a, int b) -> CMatrix { return gauge[g.index(a, b)]; };
        const CMatrix dx = grid_derivative(g, i, j, Axis::X, order, get);
        const CMatrix dy = grid_derivative(g, i, j, Axis::Y, order, get);
        const Eigen::PartialPivLU<CMatrix> lu(m.gauge);
        const CMatrix gx = lu.solve(m.omega_x * m.gauge + dx);
        const CMatrix gy = lu.solve(m.omega_y * m.gauge + dy);
        const CMatrix ox = Eigen::MatrixXd(omega.x(p)).cast<cplx>();
        const CMatrix oy = Eigen::MatrixXd(omega.y(p)).cast<cplx>();
        rep.residual.values[p] = std::max((gx - ox).cwiseAbs().maxCoeff(), (gy - oy).cwiseAbs().maxCoeff());
        imag[p] = std::max(gx.imag().cwiseAbs().maxCoeff(), gy.imag().cwiseAbs().maxCoeff());
    });
    rep.max_residual = rep.residual.max_abs();
    rep.max_imaginary = *std::max_element(imag.begin(), imag.end());
    return rep;
}

GaugeReport gauge_identity(const TodaState& state, const CyclicData& data, int order) {
    return gauge_identity(state, data, assemble_omega(state, data), order);
}

double gauge_identity_residual(const TodaState& state, const CyclicData& data) {
    return gauge_identity(state, data).max_residual;
}

G2HiggsReport g2_checks(const TodaState& state, const CyclicData& data, double tol) {
    if (data.n != 3) throw std::invalid_argument("g2_checks needs n = 3");
    require_match(state, data);
    const DomainGrid& g = data.grid;
    const auto conn = hitchin_connection(state, data);
    G2HiggsReport rep;
    rep.pattern_holds = true;
    for (std::size_t p = 0; p < g.points(); ++p) {
        rep.constraint = std::max(rep.constraint, std::abs(state.h(3, p) - state.h(1, p) * state.h(2, p) / 4.0));
        for (const CMatrix* m : {&conn.x[p], &conn.y[p]}) {
            const auto match = g2c_pattern(to_dense(*m), tol);
            rep.varpi_residual = std::max(rep.varpi_residual, match.varpi_residual);
            rep.pattern_residual = std::max(rep.pattern_residual, match.pattern_residual);
            rep.so_q_residual = std::max(rep.so_q_residual, match.so_q_residual);
            rep.pattern_holds = rep.pattern_holds && match.member;
        }
    }
    return rep;
}

}  // namespace todalab

#include "todalab/toda.hpp"
#include "todalab/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace todalab {

namespace {

// One exponential term of the system: E = |alpha|^2 exp(sum grad_m w_m),
// entering equation rows with coefficient +1 or -1.
struct Edge {
    std::vector<std::pair<int, double>> grad;
    std::vector<std::pair<int, double>> rows;
};

std::vector<Edge> edges_for(int n) {
    std::vector<Edge> e;
    e.push_back({{{0, 1.0}}, {{0, 1.0}}});
    for (int j = 2; j <= n - 1; ++j) e.push_back({{{j - 1, 1.0}, {j - 2, -1.0}}, {{j - 1, 1.0}, {j - 2, -1.0}}});
    e.push_back({{{n - 1, 1.0}, {n - 2, -1.0}}, {{n - 1, 1.0}, {n - 2, -1.0}}});
    e.push_back({{{n - 1, -1.0}, {n - 2, -1.0}}, {{n - 1, -1.0}, {n - 2, -1.0}}});
    return e;
}

void require_n(int n) {
    if (n < 2) throw std::invalid_argument("Toda system needs n >= 2");
}

void require_match(const TodaState& s, const CyclicData& d) {
    require_n(d.n);
    if (s.n() != d.n)
        throw std::invalid_argument("Toda state has " + std::to_string(s.n()) + " components, expected " +
                                    std::to_string(d.n));
    for (const auto& f : s.w) require_same_grid(f.grid, d.grid, "Toda state");
}

std::vector<double> logs_at(const TodaState& s, std::size_t p) {
    std::vector<double> w(s.n());
    for (int k = 0; k < s.n(); ++k) w[k] = s.w[k].values[p];
    return w;
}

}  // namespace

double TodaState::h(int i, std::size_t p) const { return std::exp(w.at(i - 1).values[p]); }

TodaState TodaState::constant(const DomainGrid& grid, const std::vector<double>& h) {
    TodaState s;
    for (double v : h) {
        if (!(v > 0.0)) throw std::invalid_argument("TodaState::constant: h_i must be positive");
        s.w.emplace_back(grid, std::log(v));
    }
    return s;
}

std::vector<double> toda_edge_terms(const std::vector<double>& w, const std::vector<double>& alpha_sq) {
    const int n = static_cast<int>(w.size());
    require_n(n);
    if (static_cast<int>(alpha_sq.size()) != n + 1)
        throw std::invalid_argument("toda_edge_terms: expected n + 1 squared moduli");
    const auto edges = edges_for(n);
    std::vector<double> e(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        double s = 0.0;
        for (const auto& [m, c] : edges[k].grad) s += c * w[m];
        e[k] = alpha_sq[k] == 0.0 ? 0.0 : alpha_sq[k] * std::exp(s);
    }
    return e;
}

std::vector<double> toda_rhs(const std::vector<double>& w, const std::vector<double>& alpha_sq) {
    const int n = static_cast<int>(w.size());
    const auto edges = edges_for(n);
    const auto e = toda_edge_terms(w, alpha_sq);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t k = 0; k < edges.size(); ++k)
        for (const auto& [row, c] : edges[k].rows) rhs[row] += c * e[k];
    return rhs;
}

std::vector<ScalarField> toda_residual(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    std::vector<ScalarField> r;
    for (int k = 0; k < n; ++k) r.push_back(laplace_zzbar(state.w[k]));
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        if (g.is_boundary(i, j)) return;
        const auto rhs = toda_rhs(logs_at(state, p), alpha_squares_at(data, i, j));
        for (int k = 0; k < n; ++k) r[k].values[p] -= rhs[k];
    });
    return r;
}

double max_residual(const std::vector<ScalarField>& r) {
    double m = 0.0;
    for (const auto& f : r) m = std::max(m, f.max_abs());
    return m;
}

std::vector<double> constant_solution(int n, const std::vector<double>& magnitudes, double alpha1_abs) {
    require_n(n);
    if (static_cast<int>(magnitudes.size()) != n)
        throw std::invalid_argument("constant_solution: expected n magnitudes");
    if (!(alpha1_abs > 0.0)) throw std::invalid_argument("constant_solution: |alpha_1| must be positive");
    for (double m : magnitudes)
        if (!(m > 0.0)) throw std::invalid_argument("constant_solution: magnitudes must be positive");
    std::vector<double> asq{alpha1_abs * alpha1_abs};
    for (double m : magnitudes) asq.push_back(m * m);
    const auto edges = edges_for(n);

    // F_k = log(positive part of RHS_k) - log(negative part)
    auto eval = [&](const Eigen::VectorXd& w, Eigen::VectorXd* f, Eigen::MatrixXd* jac) {
        const auto e = toda_edge_terms(std::vector<double>(w.data(), w.data() + n), asq);
        Eigen::VectorXd pos = Eigen::VectorXd::Zero(n), neg = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd dpos = Eigen::MatrixXd::Zero(n, n), dneg = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t k = 0; k < edges.size(); ++k)
            for (const auto& [row, c] : edges[k].rows) {
                (c > 0 ? pos : neg)(row) += e[k];
                for (const auto& [m, gm] : edges[k].grad) (c > 0 ? dpos : dneg)(row, m) += e[k] * gm;
            }
        *f = pos.array().log() - neg.array().log();
        if (jac) *jac = pos.asDiagonal().inverse() * dpos - neg.asDiagonal().inverse() * dneg;
    };

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n), f(n);
    Eigen::MatrixXd jac(n, n);
    eval(w, &f, &jac);
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
        const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
        double t = 1.0;
        Eigen::VectorXd trial(n), ft(n);
        for (int b = 0; b < 40; ++b, t *= 0.5) {
            trial = w + t * step;
            eval(trial, &ft, nullptr);
            if (ft.allFinite() && ft.norm() < f.norm()) break;
        }
        if (!(ft.allFinite() && ft.norm() < f.norm())) {
            done = f.lpNorm<Eigen::Infinity>() < 1e-14;
            break;
        }
        w = trial;
        eval(w, &f, &jac);
        if (f.lpNorm<Eigen::Infinity>() < 1e-16) done = true;
    }
    if (!done) throw std::runtime_error("constant_solution: Newton did not converge in 200 iterations");
    const std::vector<double> wv(w.data(), w.data() + n);
    const auto e = toda_edge_terms(wv, asq);
    const double scale = std::max(1.0, *std::max_element(e.begin(), e.end()));
    for (double r : toda_rhs(wv, asq))
        if (std::abs(r) > 1e-14 * scale) throw std::runtime_error("constant_solution: residual above 1e-14");
    std::vector<double> h(n);
    for (int k = 0; k < n; ++k) h[k] = std::exp(w(k));
    return h;
}

Eigen::VectorXd stacked_residual(const TodaState& state, const CyclicData& data, const TodaState* boundary) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    Eigen::VectorXd r(static_cast<Eigen::Index>(g.points()) * n);
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        if (g.is_boundary(i, j)) {
            for (int k = 0; k < n; ++k)
                r(p * n + k) = boundary ? state.w[k].values[p] - boundary->w[k].values[p] : 0.0;
            return;
        }
        const auto rhs = toda_rhs(logs_at(state, p), alpha_squares_at(data, i, j));
        for (int k = 0; k < n; ++k) r(p * n + k) = laplace_zzbar_at(state.w[k], i, j) - rhs[k];
    });
    return r;
}

Eigen::SparseMatrix<double> toda_jacobian(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    const auto edges = edges_for(n);
    const std::size_t slots = 5 + n;
    std::vector<Eigen::Triplet<double>> trip(g.points() * n * slots);
    const double c = 1.0 / (4.0 * g.h() * g.h());
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        Eigen::Triplet<double>* out = trip.data() + p * n * slots;
        const int base = static_cast<int>(p * n);
        if (g.is_boundary(i, j)) {
            for (int k = 0; k < n; ++k) {
                out[k * slots] = {base + k, base + k, 1.0};
                for (std::size_t s = 1; s < slots; ++s) out[k * slots + s] = {base + k, base + k, 0.0};
            }
            return;
        }
        const auto e = toda_edge_terms(logs_at(state, p), alpha_squares_at(data, i, j));
        Eigen::MatrixXd drhs = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < edges.size(); ++q)
            for (const auto& [row, cr] : edges[q].rows)
                for (const auto& [m, gm] : edges[q].grad) drhs(row, m) += cr * e[q] * gm;
        const int nb[4] = {static_cast<int>(g.index(g.wrap(i + 1), j)), static_cast<int>(g.index(g.wrap(i - 1), j)),
                           static_cast<int>(g.index(i, g.wrap(j + 1))), static_cast<int>(g.index(i, g.wrap(j - 1)))};
        for (int k = 0; k < n; ++k) {
            Eigen::Triplet<double>* o = out + k * slots;
            o[0] = {base + k, base + k, -4.0 * c};
            for (int s = 0; s < 4; ++s) o[1 + s] = {base + k, nb[s] * n + k, c};
            for (int m = 0; m < n; ++m) o[5 + m] = {base + k, base + m, -drhs(k, m)};
        }
    });
    const Eigen::Index dim = static_cast<Eigen::Index>(g.points()) * n;
    Eigen::SparseMatrix<double> jac(dim, dim);
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
}

TodaState default_initial_state(const CyclicData& data) {
    data.validate();
    const DomainGrid& g = data.grid;
    const int n = data.n;
    const double a1 = std::abs(data.alpha1);
    if (g.mode == DomainMode::Torus) {
        auto mags = alpha_squares_at(data, 0, 0);
        std::vector<double> m;
        for (int k = 1; k <= n; ++k) m.push_back(std::sqrt(mags[k]));
        return TodaState::constant(g, constant_solution(n, m, a1));
    }
    TodaState s;
    for (int k = 0; k < n; ++k) s.w.emplace_back(g);
    for (int j = 0; j < g.N; ++j)
        for (int i = 0; i < g.N; ++i) {
            const auto sq = alpha_squares_at(data, i, j);
            std::vector<double> m;
            for (int k = 1; k <= n; ++k) {
                double v = std::sqrt(sq[k]);
                if (g.is_boundary(i, j)) {
                    if (v < 1e-12)
                        throw std::invalid_argument("disk boundary data undefined: an alpha vanishes at z = (" +
                                                    format_double(g.x(i)) + ", " + format_double(g.y(j)) + ")");
                } else {
                    v = std::max(v, 1e-2);
                }
                m.push_back(v);
            }
            const auto h = constant_solution(n, m, a1);
            for (int k = 0; k < n; ++k) s.w[k](i, j) = std::log(h[k]);
        }
    return s;
}

SolveResult solve_toda(const CyclicData& data, const std::optional<TodaState>& init, const SolverOptions& opts) {
    data.validate();
    if (!(opts.tol > 0.0) || opts.max_iter < 0 || !(opts.damping > 0.0 && opts.damping <= 1.0))
        throw std::invalid_argument("solver options: need tol > 0, max_iter >= 0, 0 < damping <= 1");
    TodaState state = init ? *init : default_initial_state(data);
    require_match(state, data);
    const TodaState boundary = state;
    const DomainGrid& g = data.grid;
    const int n = data.n;
    const TodaState* bc = g.mode == DomainMode::Disk ? &boundary : nullptr;

    SolveReport report;
    Eigen::VectorXd r = stacked_residual(state, data, bc);
    report.residual_history.push_back(r.lpNorm<Eigen::Infinity>());
    if (report.residual_history.back() <= opts.tol) {
        report.converged = true;
        return {state, report};
    }

    auto apply = [&](const TodaState& from, const Eigen::VectorXd& step, double t) {
        TodaState out = from;
        for (std::size_t p = 0; p < g.points(); ++p)
            for (int k = 0; k < n; ++k) out.w[k].values[p] += t * step(p * n + k);
        return out;
    };

    for (int it = 1; it <= opts.max_iter; ++it) {
        const Eigen::SparseMatrix<double> jac = toda_jacobian(state, data);
        Eigen::VectorXd step;
        if (g.N <= 128) {
            Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
            lu.compute(jac);
            if (lu.info() != Eigen::Success) throw SolverError("Toda Newton: singular Jacobian", report);
            step = lu.solve(-r);
        } else {
            Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
            krylov.setTolerance(1e-13);
            krylov.setMaxIterations(2000);
            krylov.compute(jac);
            step = krylov.solve(-r);
        }
        const double phi0 = 0.5 * r.squaredNorm();
        double t = opts.damping;
        bool accepted = false;
        for (int b = 0; b <= 30; ++b, t *= 0.5) {
            TodaState trial = apply(state, step, t);
            Eigen::VectorXd rt = stacked_residual(trial, data, bc);
            if (rt.allFinite() && 0.5 * rt.squaredNorm() <= (1.0 - 2e-4 * t) * phi0) {
                state = std::move(trial);
                r = std::move(rt);
                accepted = true;
                break;
            }
        }
        report.iterations = it;
        if (!accepted) throw SolverError("Toda Newton: line search failed to reduce the residual", report);
        report.residual_history.push_back(r.lpNorm<Eigen::Infinity>());
        if (report.residual_history.back() <= opts.tol) {
            report.converged = true;
            return {state, report};
        }
    }
    throw SolverError("Toda Newton: no convergence after " + std::to_string(opts.max_iter) + " iterations", report);
}

NormFields norms(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    const int n = data.n;
    const DomainGrid& g = data.grid;
    NormFields out{std::vector<ScalarField>(n - 2, ScalarField(g)), ScalarField(g), ScalarField(g)};
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const auto w = logs_at(state, p);
        const auto e = toda_edge_terms(w, alpha_squares_at(data, i, j));
        const double h1 = std::exp(w[0]);
        for (int k = 0; k < n - 2; ++k) out.alpha[k].values[p] = e[k + 1] / h1;
        out.plus.values[p] = e[n - 1] / h1;
        out.minus.values[p] = e[n] / h1;
    });
    return out;
}

StarReport check_star(const TodaState& state, const CyclicData& data, double tol, double tol_frac) {
    if (data.n < 3) throw std::invalid_argument("check_star needs n >= 3");
    const int n = data.n;
    const DomainGrid& g = data.grid;
    const NormFields nf = norms(state, data);
    StarReport rep;
    for (int c = 0; c < n - 1; ++c) rep.chains.emplace_back(g);
    for (std::size_t p = 0; p < g.points(); ++p) {
        rep.chains[0].values[p] = 0.5 - nf.alpha[0].values[p];
        for (int k = 2; k <= n - 2; ++k)
            rep.chains[k - 1].values[p] = nf.alpha[k - 2].values[p] - nf.alpha[k - 1].values[p];
        rep.chains[n - 2].values[p] = nf.alpha[n - 3].values[p] - nf.plus.values[p] - nf.minus.values[p];
    }
    rep.holds = true;
    bool nonneg = true;
    for (const auto& ch : rep.chains) {
        double mn = std::numeric_limits<double>::infinity();
        std::size_t count = 0, pos = 0;
        for (int j = 0; j < g.N; ++j)
            for (int i = 0; i < g.N; ++i) {
                if (g.is_boundary(i, j)) continue;
                const double v = ch(i, j);
                mn = std::min(mn, v);
                ++count;
                if (v > tol) ++pos;
            }
        const double frac = count ? static_cast<double>(pos) / count : 0.0;
        rep.min_values.push_back(mn);
        rep.positive_fraction.push_back(frac);
        if (mn < -tol) nonneg = false;
        if (!(frac >= 1.0 - tol_frac && mn >= -tol)) rep.holds = false;
    }
    rep.borderline = !rep.holds && nonneg;
    return rep;
}

DivisorChainReport check_divisor_chain(const CyclicData& data, double tol) {
    data.validate();
    std::vector<std::pair<std::string, Divisor>> chain;
    for (int j = 2; j <= data.n - 1; ++j)
        chain.emplace_back("alpha_" + std::to_string(j), divisor_in_domain(data.alpha_j(j), data.grid));
    chain.emplace_back("min(alpha_n^+, alpha_n^-)",
                       divisor_min(divisor_in_domain(data.alpha_plus, data.grid),
                                   divisor_in_domain(data.alpha_minus, data.grid), tol));
    DivisorChainReport rep;
    rep.holds = true;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        DivisorPair pr{chain[k].first, chain[k + 1].first, chain[k].second, chain[k + 1].second, false};
        pr.precedes = divisor_precedes(pr.lhs_divisor, pr.rhs_divisor, tol);
        rep.holds = rep.holds && pr.precedes;
        rep.pairs.push_back(std::move(pr));
    }
    return rep;
}

std::pair<TodaState, CyclicData> hidden_symmetry(const TodaState& state, const CyclicData& data) {
    require_match(state, data);
    TodaState s = state;
    for (auto& v : s.w.back().values) v = -v;
    return {s, swap_alpha_n(data)};
}

}  // namespace todalab

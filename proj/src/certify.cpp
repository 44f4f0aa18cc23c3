#include "todalab/certify.hpp"

#include "todalab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace todalab {

std::vector<double> MaxTuple::B() const {
    validate();
    std::vector<double> b;
    for (int k = 3; k <= n; ++k) b.push_back((1.0 - 1.0 / a(k)) - (a(k - 1) - 1.0));
    return b;
}

void MaxTuple::validate() const {
    if (n < 2) throw std::invalid_argument("MaxTuple: n must be at least 2");
    if (static_cast<int>(A.size()) != n - 1) throw std::invalid_argument("MaxTuple: expected A_2..A_n");
    for (double v : A)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("MaxTuple: A_k must be positive and finite");
}

std::vector<double> inequality_residuals(const MaxTuple& t) {
    t.validate();
    return inequality_residuals_of<double>(t.n, t.A);
}

namespace {

// Grid values k / M with M = 10 / step, so 1 is the node k = M.
struct Axis1 {
    std::vector<long> k;
    std::vector<double> v;
    std::vector<double> inv;
};

Axis1 make_axis(double a_max, long M) {
    Axis1 ax;
    const long top = static_cast<long>(std::floor(a_max * M + 1e-9));
    const long lo = static_cast<long>(std::ceil(0.9 * M - 1e-9)), hi = static_cast<long>(std::floor(1.1 * M + 1e-9));
    for (long k = 1; k <= top; ++k)
        if (k % 10 == 0 || (k >= lo && k <= hi)) ax.k.push_back(k);
    for (long k : ax.k) {
        ax.v.push_back(static_cast<double>(k) / static_cast<double>(M));
        ax.inv.push_back(static_cast<double>(M) / static_cast<double>(k));
    }
    return ax;
}

struct SlotResult {
    std::uint64_t feasible = 0;
    bool unit = false;
    std::uint64_t counterexamples = 0;
    std::vector<std::vector<double>> listed;
    double max_a = 0.0;
    double best_below = 0.0;
    std::vector<double> best_tuple;
    double delta = 0.0;
    std::uint64_t exact_failures = 0;
};

constexpr std::size_t kListed = 100;

class Scanner {
public:
    Scanner(int n, const Axis1& ax, long M, double eps) : n_(n), ax_(ax), M_(M), eps_(eps), eps_q_(eps) {}

    SlotResult run(std::size_t first) const {
        SlotResult out;
        std::vector<std::size_t> idx(n_ - 1);
        idx[0] = first;
        if (n_ == 2) {
            if (ax_.v[first] - 1.0 <= eps_) record(idx, out);
            return out;
        }
        descend(1, idx, out);
        return out;
    }

private:
    double val(const std::vector<std::size_t>& idx, int k) const { return ax_.v[idx[k - 2]]; }
    double inv(const std::vector<std::size_t>& idx, int k) const { return ax_.inv[idx[k - 2]]; }

    // residual r_k once A_{k-1}, A_k and (for k < n) A_{k+1} are assigned
    double residual(const std::vector<std::size_t>& idx, int k) const {
        if (k == 2) return 2.0 * (val(idx, 2) - 1.0) - (1.0 - inv(idx, 3));
        double r = -val(idx, k) * (val(idx, k - 1) - 1.0) + 2.0 * (val(idx, k) - 1.0);
        if (k < n_) r -= 1.0 - inv(idx, k + 1);
        return r;
    }

    void descend(int pos, std::vector<std::size_t>& idx, SlotResult& out) const {
        // pos holds A_{pos+2}; assigning it completes r_{pos+1}
        for (std::size_t a = 0; a < ax_.v.size(); ++a) {
            idx[pos] = a;
            if (residual(idx, pos + 1) > eps_) continue;
            if (pos + 1 < n_ - 1) {
                descend(pos + 1, idx, out);
            } else if (residual(idx, n_) <= eps_) {
                record(idx, out);
            }
        }
    }

    bool exact_feasible(const std::vector<std::size_t>& idx) const {
        std::vector<Rational> A;
        for (std::size_t t : idx) A.emplace_back(ax_.k[t], M_);
        for (auto& a : A) a.canonicalize();
        for (const auto& r : inequality_residuals_of<Rational>(n_, A))
            if (r > eps_q_) return false;
        return true;
    }

    void record(const std::vector<std::size_t>& idx, SlotResult& out) const {
        ++out.feasible;
        if (!exact_feasible(idx)) ++out.exact_failures;
        std::vector<double> A;
        bool near_one = false, all_unit = true;
        double top = 0.0;
        for (std::size_t t : idx) {
            A.push_back(ax_.v[t]);
            top = std::max(top, ax_.v[t]);
            if (ax_.v[t] >= 1.0 - eps_) near_one = true;
            if (ax_.k[t] != M_) all_unit = false;
        }
        out.max_a = std::max(out.max_a, top);
        bool bad = top > 1.0 + eps_;
        if (all_unit) out.unit = true;
        if (near_one) {
            double dev = 0.0;
            for (double v : A) dev = std::max(dev, std::abs(v - 1.0));
            out.delta = std::max(out.delta, dev);
            if (!all_unit) bad = true;
        } else if (top > out.best_below) {
            out.best_below = top;
            out.best_tuple = A;
        }
        if (bad) {
            ++out.counterexamples;
            if (out.listed.size() < kListed) out.listed.push_back(A);
        }
    }

    int n_;
    const Axis1& ax_;
    long M_;
    double eps_;
    Rational eps_q_;
};

}  // namespace

DichotomyReport dichotomy_scan(int n, double a_max, double step, double eps) {
    if (n < 2 || n > 8) throw std::invalid_argument("dichotomy_scan: n must be in 2..8");
    if (!(step > 0.0) || !(a_max >= 1.1) || !(eps >= 0.0))
        throw std::invalid_argument("dichotomy_scan: needs step > 0, a_max >= 1.1, eps >= 0");
    const double ratio = 10.0 / step;
    const long M = std::lround(ratio);
    if (M < 10 || std::abs(ratio - static_cast<double>(M)) > 1e-9 * ratio)
        throw std::invalid_argument("dichotomy_scan: 10 / step must be an integer");
    const Axis1 ax = make_axis(a_max, M);

    DichotomyReport rep;
    rep.n = n;
    rep.a_max = a_max;
    rep.step = step;
    rep.eps = eps;
    rep.axis_points = ax.v.size();
    rep.grid_tuples = 1;
    for (int k = 2; k <= n; ++k) rep.grid_tuples *= rep.axis_points;
    rep.delta_allowed = 0.5 / static_cast<double>(M);

    const Scanner scan(n, ax, M, eps);
    std::vector<SlotResult> slots(ax.v.size());
    parallel_for(ax.v.size(), [&](std::size_t a) { slots[a] = scan.run(a); });

    double best = 0.0;
    for (const auto& s : slots) {
        rep.feasible += s.feasible;
        rep.unit_feasible = rep.unit_feasible || s.unit;
        rep.counterexample_count += s.counterexamples;
        for (const auto& c : s.listed)
            if (rep.counterexamples.size() < kListed) rep.counterexamples.push_back(c);
        rep.max_feasible_a = std::max(rep.max_feasible_a, s.max_a);
        rep.delta = std::max(rep.delta, s.delta);
        rep.exact_failures += s.exact_failures;
        if (s.best_below > best) {
            best = s.best_below;
            rep.closest_tuple = s.best_tuple;
        }
    }
    rep.below_one_margin = 1.0 - best;
    return rep;
}

namespace {

// Exponentials e^{u_0..u_n} of the relabeled system: u_0 from alpha^-,
// u_1 from alpha^+, u_j from alpha_{n+1-j}. Each is a Toda edge term.
std::vector<double> relabeled_exponentials(const std::vector<double>& edges, int n) {
    std::vector<double> e(n + 1);
    e[0] = edges[n];
    e[1] = edges[n - 1];
    for (int j = 2; j <= n; ++j) e[j] = edges[n - j];
    return e;
}

// d^2/dzdzbar of each u_j away from zeros, from the Toda right-hand sides.
std::vector<double> relabeled_laplacians(const std::vector<double>& rhs, int n) {
    // log E_1 = w_1 + c; log E_m = w_m - w_{m-1} + c; log E^+ = w_n - w_{n-1} + c; log E^- = -w_{n-1} - w_n + c
    std::vector<double> edge(n + 1);
    edge[0] = rhs[0];
    for (int m = 2; m <= n - 1; ++m) edge[m - 1] = rhs[m - 1] - rhs[m - 2];
    edge[n - 1] = rhs[n - 1] - rhs[n - 2];
    edge[n] = -rhs[n - 2] - rhs[n - 1];
    return relabeled_exponentials(edge, n);
}

}  // namespace

FieldMaxima field_maxima(const TodaState& state, const CyclicData& data, double tol) {
    if (state.n() != data.n) throw std::invalid_argument("field_maxima: state and data disagree on n");
    for (const auto& f : state.w) require_same_grid(f.grid, data.grid, "field_maxima");
    const int n = data.n;
    const DomainGrid& g = data.grid;
    const std::size_t P = g.points();

    std::vector<std::vector<double>> ex(P), lap(P);
    parallel_for(P, [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        std::vector<double> w(n);
        for (int k = 0; k < n; ++k) w[k] = state.w[k].values[p];
        const auto sq = alpha_squares_at(data, i, j);
        ex[p] = relabeled_exponentials(toda_edge_terms(w, sq), n);
        lap[p] = relabeled_laplacians(toda_rhs(w, sq), n);
    });

    // ratio k: numerator and denominator of e^{u_{k-1} - u_k} (k = 2 uses e^{u_0} + e^{u_1})
    auto numer = [&](std::size_t p, int k) { return k == 2 ? ex[p][0] + ex[p][1] : ex[p][k - 1]; };
    auto denom = [&](std::size_t p, int k) { return ex[p][k]; };

    FieldMaxima out;
    out.n = n;
    out.tuple.n = n;
    const int lo = g.mode == DomainMode::Disk ? 1 : 0, hi = g.mode == DomainMode::Disk ? g.N - 2 : g.N - 1;

    for (int k = 2; k <= n; ++k) {
        double dmax = 0.0;
        for (std::size_t p = 0; p < P; ++p) dmax = std::max(dmax, denom(p, k));
        ScalarField logr(g, 0.0);
        for (std::size_t p = 0; p < P; ++p) {
            const double d = denom(p, k), m = numer(p, k);
            logr.values[p] = (d > 0.0 && m > 0.0) ? std::log(m / d) : std::numeric_limits<double>::quiet_NaN();
        }
        RatioMaximum best;
        best.name = "A_" + std::to_string(k);
        best.value = -1.0;
        for (int j = lo; j <= hi; ++j)
            for (int i = lo; i <= hi; ++i) {
                const std::size_t p = g.index(i, j);
                if (!(denom(p, k) > 0.0)) continue;
                const double r = numer(p, k) / denom(p, k);
                if (r > best.value) {
                    best.value = r;
                    best.i = i;
                    best.j = j;
                }
            }
        if (best.value < 0.0) throw std::runtime_error("field_maxima: " + best.name + " has no admissible point");

        const std::size_t p = g.index(best.i, best.j);
        auto small = [&](int a, int b) { return denom(g.index(g.wrap(a), g.wrap(b)), k) <= 1e-14 * dmax; };
        best.at_zero = small(best.i, best.j) || small(best.i - 1, best.j) || small(best.i + 1, best.j) ||
                       small(best.i, best.j - 1) || small(best.i, best.j + 1);
        best.interior = g.mode == DomainMode::Torus ||
                        (best.i >= 2 && best.j >= 2 && best.i <= g.N - 3 && best.j <= g.N - 3);
        best.laplacian = laplace_zzbar_at(logr, best.i, best.j);

        const auto& e = ex[p];
        const auto& L = lap[p];
        double bound;
        if (k == 2) {
            // log-sum-exp is convex: d dbar log(e^{u_0} + e^{u_1}) >= the weighted mean of d dbar u_0, d dbar u_1
            const double s = e[0] + e[1];
            bound = (e[0] * L[0] + e[1] * L[1]) / s - L[2];
        } else {
            bound = L[k - 1] - L[k];
        }
        best.predicted = bound / e[k];
        best.mp_holds = best.predicted <= tol;
        if (best.interior && !best.at_zero && !best.mp_holds) out.spot_checks_pass = false;
        out.tuple.A.push_back(best.value);
        out.ratios.push_back(best);
    }

    for (int j = lo; j <= hi; ++j)
        for (int i = lo; i <= hi; ++i) {
            const std::size_t p = g.index(i, j);
            if (ex[p][2] > 0.0) out.a2_prime = std::max(out.a2_prime, ex[p][1] / ex[p][2]);
        }
    out.residuals = inequality_residuals(out.tuple);
    return out;
}

}  // namespace todalab

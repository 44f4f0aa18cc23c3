#include "doctest.h"

#include "todalab/toda.hpp"

#include <cmath>
#include <random>

using namespace todalab;

namespace {

CyclicData torus_data(int n, int N, const std::vector<double>& mags) {
    return CyclicData::constant(n, DomainGrid::make(DomainMode::Torus, N, 1.0), mags);
}

CyclicData disk_data(int N, Poly a2, Poly plus, Poly minus, double L = 1.0) {
    CyclicData d;
    d.n = 3;
    d.grid = DomainGrid::make(DomainMode::Disk, N, L);
    d.alpha = {std::move(a2)};
    d.alpha_plus = std::move(plus);
    d.alpha_minus = std::move(minus);
    d.validate();
    return d;
}

Poly monomial(int k) {
    std::vector<cplx> c(k + 1, 0.0);
    c[k] = 1.0;
    return Poly(c);
}

// Smooth periodic bump with amplitude 0.2 in log space (about +-20% in h).
TodaState bumped(const TodaState& s, double sign) {
    TodaState out = s;
    const DomainGrid& g = s.grid();
    const double pi = std::acos(-1.0);
    for (int k = 0; k < s.n(); ++k)
        for (int j = 0; j < g.N; ++j)
            for (int i = 0; i < g.N; ++i)
                out.w[k](i, j) +=
                    sign * 0.2 * std::sin(2 * pi * (g.x(i) + 0.3 * k)) * std::cos(2 * pi * g.y(j)) * (k % 2 ? -1 : 1);
    return out;
}

double max_diff(const TodaState& a, const std::vector<double>& h) {
    double m = 0;
    for (int k = 0; k < a.n(); ++k)
        for (double v : a.w[k].values) m = std::max(m, std::abs(std::exp(v) - h[k]));
    return m;
}

}  // namespace

TEST_CASE("constant solutions") {
    const auto h2 = constant_solution(2, {1, 1});
    CHECK(h2[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(h2[1] == doctest::Approx(1.0).epsilon(1e-14));
    const auto h3 = constant_solution(3, {1, 1, 1});
    CHECK(h3[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(h3[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(h3[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(h3[2] - h3[0] * h3[1] / 4) < 1e-14);

    // n = 4, ones: h1^2 = 2 h2, h2^2 = h1 h3, h3^2 = 2 h2 h4, h4^2 = 1
    const auto h4 = constant_solution(4, {1, 1, 1, 1});
    CHECK(h4[3] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(h4[0] * h4[0] == doctest::Approx(2 * h4[1]).epsilon(1e-13));
    CHECK(h4[1] * h4[1] == doctest::Approx(h4[0] * h4[2]).epsilon(1e-13));

    CHECK_THROWS_AS(constant_solution(3, {1, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(constant_solution(3, {1, 1}), std::invalid_argument);
}

TEST_CASE("residual vanishes on the constant solutions") {
    const auto d2 = torus_data(2, 16, {1, 1});
    CHECK(max_residual(toda_residual(TodaState::constant(d2.grid, {2, 1}), d2)) < 1e-15);
    const auto d3 = torus_data(3, 16, {1, 1, 1});
    CHECK(max_residual(toda_residual(TodaState::constant(d3.grid, {2, 2, 1}), d3)) < 1e-15);
}

TEST_CASE("residual of a shifted constant state") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    const double delta = 0.3;
    auto s = TodaState::constant(d.grid, {2, 2, 1});
    for (auto& v : s.w[0].values) v += delta;
    // E1 = e^delta, E2 = e^-delta, E+ = E- = 1/2
    const auto r = toda_residual(s, d);
    CHECK(r[0](3, 4) == doctest::Approx(-(std::exp(delta) - std::exp(-delta))).epsilon(1e-13));
    CHECK(r[1](3, 4) == doctest::Approx(-(std::exp(-delta) - 1.0)).epsilon(1e-13));
    CHECK(std::abs(r[2](3, 4)) < 1e-15);
    CHECK(r[0](0, 0) < 0);
    CHECK(r[1](0, 0) > 0);
}

TEST_CASE("rhs follows the displayed system for n = 4") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> w(4), a(5);
        for (auto& v : w) v = u(rng);
        for (auto& v : a) v = u(rng) * u(rng);
        const double h1 = std::exp(w[0]), h2 = std::exp(w[1]), h3 = std::exp(w[2]), h4 = std::exp(w[3]);
        const auto rhs = toda_rhs(w, a);
        CHECK(rhs[0] == doctest::Approx(h1 * a[0] - h2 / h1 * a[1]).epsilon(1e-13));
        CHECK(rhs[1] == doctest::Approx(h2 / h1 * a[1] - h3 / h2 * a[2]).epsilon(1e-13));
        CHECK(rhs[2] == doctest::Approx(h3 / h2 * a[2] - h4 / h3 * a[3] - a[4] / (h3 * h4)).epsilon(1e-13));
        CHECK(rhs[3] == doctest::Approx(h4 / h3 * a[3] - a[4] / (h3 * h4)).epsilon(1e-13));
    }
}

TEST_CASE("analytic Jacobian matches finite differences") {
    const auto d = disk_data(12, Poly(cplx(1.0, 0.5)), Poly(std::vector<cplx>{0.7, 0.4}), monomial(1));
    auto s = default_initial_state(d);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& f : s.w)
        for (auto& v : f.values) v += u(rng);
    const auto jac = toda_jacobian(s, d);
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd dir(jac.cols());
        for (Eigen::Index k = 0; k < dir.size(); ++k) dir(k) = u(rng);
        const double eps = 1e-6;
        auto shifted = [&](double t) {
            TodaState x = s;
            for (std::size_t p = 0; p < d.grid.points(); ++p)
                for (int k = 0; k < 3; ++k) x.w[k].values[p] += t * dir(p * 3 + k);
            return stacked_residual(x, d, nullptr);
        };
        const Eigen::VectorXd fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
        Eigen::VectorXd an = jac * dir;
        for (int j = 0; j < d.grid.N; ++j)
            for (int i = 0; i < d.grid.N; ++i)
                if (d.grid.is_boundary(i, j))
                    for (int k = 0; k < 3; ++k) an(d.grid.index(i, j) * 3 + k) = 0;
        CHECK((an - fd).norm() / fd.norm() < 1e-6);
    }
}

TEST_CASE("torus solver recovers the constant solutions") {
    SUBCASE("n = 3") {
        const auto d = torus_data(3, 32, {1, 1, 1});
        for (double sign : {1.0, -1.0}) {
            const auto res = solve_toda(d, bumped(TodaState::constant(d.grid, {2, 2, 1}), sign));
            CHECK(res.report.converged);
            CHECK(max_residual(toda_residual(res.state, d)) < 1e-10);
            CHECK(max_diff(res.state, {2, 2, 1}) < 1e-8);
        }
    }
    SUBCASE("n = 2") {
        const auto d = torus_data(2, 32, {1, 1});
        const auto res = solve_toda(d, bumped(TodaState::constant(d.grid, {2, 1}), 1.0));
        CHECK(res.report.converged);
        CHECK(max_diff(res.state, {2, 1}) < 1e-8);
        CHECK(res.report.residual_history.size() == static_cast<std::size_t>(res.report.iterations + 1));
    }
}

TEST_CASE("disk solver converges with a zero of alpha_n^-") {
    const auto d = disk_data(32, Poly(1.0), Poly(1.0), monomial(1));
    const auto res = solve_toda(d);
    CHECK(res.report.converged);
    CHECK(max_residual(toda_residual(res.state, d)) < 1e-9);
    const auto init = default_initial_state(d);
    for (int k = 0; k < 3; ++k) CHECK(res.state.w[k](0, 7) == init.w[k](0, 7));
}

TEST_CASE("solver and boundary errors") {
    const auto d = torus_data(3, 16, {1, 1, 1});
    SolverOptions opts;
    opts.max_iter = 0;
    try {
        solve_toda(d, TodaState::constant(d.grid, {1, 1, 1}), opts);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.report.residual_history.size() == 1);
        CHECK_FALSE(e.report.converged);
    }
    // alpha_3^- = z + 1/2 vanishes at the boundary grid point (-1/2, 0)
    const auto bad = disk_data(17, Poly(1.0), Poly(1.0), Poly(std::vector<cplx>{0.5, 1.0}), 1.0);
    CHECK_THROWS_AS(solve_toda(bad), std::invalid_argument);
    CHECK_THROWS_AS(toda_residual(TodaState::constant(d.grid, {1, 1}), d), std::invalid_argument);
}

TEST_CASE("norms on the constant solution") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    const auto s = TodaState::constant(d.grid, {2, 2, 1});
    const auto nf = norms(s, d);
    CHECK(nf.alpha[0](2, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nf.plus(2, 2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(nf.minus(2, 2) == doctest::Approx(0.25).epsilon(1e-14));
    auto z = d;
    z.alpha_minus = Poly(0.0);
    CHECK(norms(s, z).minus.max_abs() == 0.0);
}

TEST_CASE("hypothesis star on constant and disk solutions") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    auto s = TodaState::constant(d.grid, {2, 2, 1});
    const auto rep = check_star(s, d);
    CHECK_FALSE(rep.holds);
    CHECK(rep.borderline);
    for (double m : rep.min_values) CHECK(std::abs(m) < 1e-14);

    auto doubled = s;
    for (auto& v : doubled.w[0].values) v += std::log(2.0);
    const auto rep2 = check_star(doubled, d);
    for (std::size_t p = 0; p < d.grid.points(); ++p) CHECK(rep2.chains[0].values[p] > rep.chains[0].values[p]);

    CHECK_THROWS_AS(check_star(TodaState::constant(d.grid, {2, 1}), torus_data(2, 8, {1, 1})),
                    std::invalid_argument);
}

TEST_CASE("divisors of polynomials") {
    const auto g = DomainGrid::make(DomainMode::Disk, 16, 2.0);
    // (z - 0.1)^2 (z + 0.2i) z^3, plus a root at 5 outside the square
    std::vector<cplx> c{1.0};
    auto mul = [&](cplx r) {
        std::vector<cplx> out(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            out[k + 1] += c[k];
            out[k] -= r * c[k];
        }
        c = out;
    };
    for (cplx r : {cplx(0.1), cplx(0.1), cplx(0, -0.2), cplx(0), cplx(0), cplx(0), cplx(5.0)}) mul(r);
    const auto dv = divisor_in_domain(Poly(c), g);
    CHECK(dv.points.size() == 3);
    CHECK(dv.multiplicity_at(0.0, 1e-6) == 3);
    CHECK(dv.multiplicity_at(0.1, 1e-6) == 2);
    CHECK(dv.multiplicity_at(cplx(0, -0.2), 1e-6) == 1);
    CHECK(divisor_in_domain(Poly(0.0), g).infinite);
    CHECK(divisor_in_domain(Poly(3.0), g).empty());
}

TEST_CASE("divisor chain examples") {
    CHECK(check_divisor_chain(torus_data(3, 8, {1, 1, 1})).holds);
    CHECK(check_divisor_chain(disk_data(16, Poly(1.0), monomial(1), monomial(2))).holds);
    const auto bad = check_divisor_chain(disk_data(16, monomial(1), monomial(1), Poly(1.0)));
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.pairs.size() == 1);
    CHECK(bad.pairs[0].lhs == "alpha_2");
    CHECK(check_divisor_chain(disk_data(16, monomial(1), monomial(2), monomial(3))).holds);
    CHECK(check_divisor_chain(disk_data(16, monomial(1), monomial(2), Poly(0.0))).holds);
}

TEST_CASE("hidden symmetry exchanges alpha_n^+ and alpha_n^-") {
    const auto d = disk_data(16, Poly(std::vector<cplx>{1.0, 0.3}), Poly(std::vector<cplx>{0.8, 0.2}),
                             Poly(std::vector<cplx>{0.5, -0.4}));
    auto s = default_initial_state(d);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& f : s.w)
        for (auto& v : f.values) v += u(rng);
    const auto r = toda_residual(s, d);
    const auto [s2, d2] = hidden_symmetry(s, d);
    const auto r2 = toda_residual(s2, d2);
    double err = 0;
    for (std::size_t p = 0; p < d.grid.points(); ++p) {
        err = std::max(err, std::abs(r2[0].values[p] - r[0].values[p]));
        err = std::max(err, std::abs(r2[1].values[p] - r[1].values[p]));
        err = std::max(err, std::abs(r2[2].values[p] + r[2].values[p]));
    }
    CHECK(err < 1e-12);
}

#include "doctest.h"

#include "todalab/certify.hpp"
#include "todalab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace todalab;

namespace {

std::vector<Rational> random_tuple(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<long> num(1, 400), den(1, 97);
    std::vector<Rational> A;
    for (int k = 2; k <= n; ++k) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        A.push_back(q);
    }
    return A;
}

// alpha_2 = 1, alpha^+ = z, alpha^- = z^2
CyclicData disk3(int N) {
    CyclicData d;
    d.n = 3;
    d.grid = DomainGrid::make(DomainMode::Disk, N, 2.0);
    d.alpha = {Poly(1.0)};
    d.alpha_plus = Poly(std::vector<cplx>{0.0, 1.0});
    d.alpha_minus = Poly(std::vector<cplx>{0.0, 0.0, 1.0});
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("inequality residuals") {
    const auto r = inequality_residuals(MaxTuple{3, {0.5, 0.5}});
    REQUIRE(r.size() == 2);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == -0.75);
    const auto q = inequality_residuals(MaxTuple{3, {1.2, 1.0}});
    CHECK(std::abs(q[0] - 0.4) < 1e-15);
    CHECK(std::abs(q[1] - -0.2) < 1e-15);
    CHECK(inequality_residuals(MaxTuple{2, {0.7}})[0] == doctest::Approx(-0.3));
    for (int n = 2; n <= 6; ++n)
        for (double v : inequality_residuals(MaxTuple{n, std::vector<double>(n - 1, 1.0)})) CHECK(v == 0.0);

    CHECK_THROWS_AS(inequality_residuals(MaxTuple{3, {0.5, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(inequality_residuals(MaxTuple{3, {-1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(inequality_residuals(MaxTuple{3, {0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(inequality_residuals(MaxTuple{1, {}}), std::invalid_argument);

    const MaxTuple t{4, {0.5, 0.8, 0.9}};
    const auto b = t.B();
    REQUIRE(b.size() == 2);
    CHECK(b[0] == doctest::Approx((1 - 1 / 0.8) - (0.5 - 1)));
    CHECK(b[1] == doctest::Approx((1 - 1 / 0.9) - (0.8 - 1)));
}

TEST_CASE("B-form and telescoping identities in rationals") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 3 + trial % 5;
        const auto A = random_tuple(rng, n);
        const auto r = inequality_residuals_of<Rational>(n, A);
        const auto b = b_form_residuals<Rational>(n, A);
        REQUIRE(r.size() == b.size());
        for (std::size_t k = 0; k < r.size(); ++k) REQUIRE(r[k] == b[k]);
        REQUIRE(telescoping_defect<Rational>(n, A) == 0);
    }
    std::vector<Rational> A{Rational(1, 2), Rational(2, 3), Rational(3, 4)};
    CHECK(telescoping_defect<Rational>(4, A) == 0);
    // the left side alone is not zero, so the identity is not vacuous
    CHECK(Rational(1) - Rational(1) / A[2] != 0);
    CHECK(telescoping_defect<double>(4, {0.5, 2.0 / 3.0, 0.75}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(telescoping_defect<Rational>(2, {Rational(1)}), std::invalid_argument);
}

TEST_CASE("dichotomy scan") {
    const auto r3 = dichotomy_scan(3, 2.0, 1e-2);
    CHECK(r3.counterexample_count == 0);
    CHECK(r3.exact_failures == 0);
    CHECK(r3.unit_feasible);
    CHECK(r3.max_feasible_a <= 1.0 + r3.eps);
    CHECK(r3.delta <= r3.delta_allowed);
    CHECK(r3.feasible > 0);
    CHECK(r3.below_one_margin > 0.0);
    // 200 coarse nodes plus the refined band: 201 nodes in [0.9, 1.1], 21 shared
    CHECK(r3.axis_points == 200 + 201 - 21);
    CHECK(r3.grid_tuples == r3.axis_points * r3.axis_points);

    const auto r2 = dichotomy_scan(2, 2.0, 0.1);
    CHECK(r2.counterexample_count == 0);
    CHECK(r2.feasible == 10 + 9);  // 0.1..1.0 coarse, 0.91..0.99 refined

    for (int n : {4, 5}) {
        const auto r = dichotomy_scan(n, 2.0, 5e-2);
        CHECK(r.counterexample_count == 0);
        CHECK(r.exact_failures == 0);
        CHECK(r.unit_feasible);
    }

    // same result on one thread
    set_max_threads(1);
    const auto one = dichotomy_scan(3, 2.0, 1e-2);
    set_max_threads(0);
    CHECK(one.feasible == r3.feasible);
    CHECK(one.closest_tuple == r3.closest_tuple);

    CHECK_THROWS_AS(dichotomy_scan(3, 2.0, 0.003), std::invalid_argument);
    CHECK_THROWS_AS(dichotomy_scan(1, 2.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(dichotomy_scan(3, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("dichotomy scan reports violations when the tolerance is loose") {
    // eps = 0.2 admits tuples such as (1.05, 1.05), off the node 1 but within eps of it
    const auto r = dichotomy_scan(3, 1.2, 0.1, 0.2);
    CHECK(r.counterexample_count > 0);
    REQUIRE(!r.counterexamples.empty());
    const auto& c = r.counterexamples[0];
    CHECK(std::any_of(c.begin(), c.end(), [](double v) { return v != 1.0; }));
    CHECK(r.delta > r.delta_allowed);
}

TEST_CASE("field maxima on disk solutions") {
    // alpha_2 = 1, alpha^+ = 1, alpha^- = z
    auto data = [](int N) {
        CyclicData d;
        d.n = 3;
        d.grid = DomainGrid::make(DomainMode::Disk, N, 2.0);
        d.alpha = {Poly(1.0)};
        d.alpha_plus = Poly(1.0);
        d.alpha_minus = Poly(std::vector<cplx>{0.0, 1.0});
        d.validate();
        return d;
    };
    double worst[2] = {0.0, 0.0};
    int slot = 0;
    for (int N : {33, 65}) {
        const auto d = data(N);
        const auto fm = field_maxima(solve_toda(d).state, d);
        REQUIRE(fm.ratios.size() == 2);
        for (const auto& r : fm.ratios) {
            MESSAGE("N " << N << ": " << r.name << " = " << r.value << " at (" << r.i << ", " << r.j << ") predicted "
                         << r.predicted << " interior " << r.interior);
            CHECK(r.value > 0.0);
            CHECK(r.value < 1.0);
        }
        CHECK(fm.spot_checks_pass);
        CHECK(fm.a2_prime <= fm.tuple.a(2));
        // the maxima sit next to the Dirichlet ring, so the residuals are
        // only nonpositive up to the discretization error
        for (double v : fm.residuals) worst[slot] = std::max(worst[slot], v);
        ++slot;
    }
    MESSAGE("largest residual: " << worst[0] << " -> " << worst[1]);
    CHECK(worst[1] < 1e-3);
    if (worst[1] > 0.0) CHECK(worst[0] / worst[1] > 3.0);
}

TEST_CASE("relabeled Laplacians follow the chain equations") {
    const auto d = disk3(33);
    const auto sol = solve_toda(d).state;
    // d dbar (u_2 - u_3) = -e^{u_0} - e^{u_1} + 3 e^{u_2} - 2 e^{u_3} for n = 3
    const auto& g = d.grid;
    for (auto [i, j] : {std::pair{20, 13}, std::pair{5, 28}}) {
        const std::size_t p = g.index(i, j);
        std::vector<double> w{sol.w[0].values[p], sol.w[1].values[p], sol.w[2].values[p]};
        const auto sq = alpha_squares_at(d, i, j);
        const auto e = toda_edge_terms(w, sq);
        const double u0 = e[3], u1 = e[2], u2 = e[1], u3 = e[0];
        const auto rhs = toda_rhs(w, sq);
        // u_2 - u_3 = log E_2 - log E_1 = w_2 - 2 w_1 + const
        CHECK(rhs[1] - 2.0 * rhs[0] == doctest::Approx(-u0 - u1 + 3.0 * u2 - 2.0 * u3));
        // u_1 - u_2 = log E^+ - log E_2 = w_3 - 2 w_2 + w_1 + const
        CHECK(rhs[2] - 2.0 * rhs[1] + rhs[0] == doctest::Approx(u0 + 3.0 * u1 - 3.0 * u2 + u3));
    }
}

TEST_CASE("field maxima: torus constants and a non-solution") {
    const auto g = DomainGrid::make(DomainMode::Torus, 8, 1.0);
    const auto d = CyclicData::constant(3, g, {0.3, 0.2, 0.1});
    const auto s = TodaState::constant(g, constant_solution(3, {0.3, 0.2, 0.1}));
    const auto fm = field_maxima(s, d);
    CHECK(fm.spot_checks_pass);
    for (const auto& r : fm.ratios) {
        CHECK(r.interior);
        CHECK(std::abs(r.predicted) < 1e-12);
        CHECK(std::abs(r.laplacian) < 1e-12);
    }

    // constant metric off the solution: some predicted Laplacian is positive at the maximum
    const auto bad = TodaState::constant(g, {1.0, 4.0, 1.0});
    const auto fb = field_maxima(bad, d);
    CHECK_FALSE(fb.spot_checks_pass);

    CHECK_THROWS_AS(field_maxima(s, CyclicData::constant(2, g, {0.3, 0.1})), std::invalid_argument);
}

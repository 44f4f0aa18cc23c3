#include "doctest.h"

#include "todalab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace todalab;
using Mat = Eigen::MatrixXd;

namespace {

CyclicData torus_data(int n, int N, const std::vector<double>& mags) {
    return CyclicData::constant(n, DomainGrid::make(DomainMode::Torus, N, 1.0), mags);
}

// alpha_2 = 1, alpha^+ = z, alpha^- = z^2: a strict divisor chain
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

CyclicData disk2(int N) {
    CyclicData d;
    d.n = 2;
    d.grid = DomainGrid::make(DomainMode::Disk, N, 2.0);
    d.alpha_plus = Poly(0.5);
    d.alpha_minus = Poly(std::vector<cplx>{0.0, 1.0});
    d.validate();
    return d;
}

std::vector<double> point_logs(const TodaState& s, std::size_t p) {
    std::vector<double> w;
    for (const auto& f : s.w) w.push_back(f.values[p]);
    return w;
}

}  // namespace

TEST_CASE("normal fields, masks and bumps") {
    CHECK(block_parity(2) == Parity::Minus);
    CHECK(block_parity(3) == Parity::Plus);
    CHECK(normal_signs(4) == std::vector<double>{-1, -1, 1, 1, -1, -1});

    const auto g = DomainGrid::make(DomainMode::Disk, 33, 2.0);
    const auto mask = collar_mask(g);
    CHECK(mask[g.index(3, 16)] == 0.0);
    CHECK(mask[g.index(16, 16)] == 1.0);
    CHECK(std::all_of(mask.begin(), mask.end(), [](double m) { return m >= 0.0 && m <= 1.0; }));
    const auto t = DomainGrid::make(DomainMode::Torus, 16, 1.0);
    const auto tm = collar_mask(t);
    CHECK(std::all_of(tm.begin(), tm.end(), [](double m) { return m == 1.0; }));

    std::mt19937_64 rng(3);
    const auto xi = random_bump(g, 4, Parity::Plus, rng, mask);
    CHECK_NOTHROW(xi.validate());
    CHECK(claimed_sign(xi) == 1);
    double minus_part = 0.0, plus_part = 0.0;
    for (std::size_t p = 0; p < g.points(); ++p) {
        minus_part += std::abs(xi.at(p)[0]) + std::abs(xi.at(p)[4]);
        plus_part += std::abs(xi.at(p)[2]);
    }
    CHECK(minus_part == 0.0);
    CHECK(plus_part > 0.0);

    auto bad = xi;
    bad.at(g.index(16, 16))[0] = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = xi;
    bad.at(g.index(1, 16))[2] = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.parity = Parity::Mixed;
    CHECK_THROWS_AS(claimed_sign(bad), std::invalid_argument);
}

TEST_CASE("Gamma_0 blocks") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    const auto s = TodaState::constant(d.grid, {2, 2, 1});
    const auto b = gamma0_blocks(s, d, 1, 1);
    const Mat om = assemble_omega(s, d).x(d.grid.index(1, 1));
    // n = 3: Gamma_0^+ is the transposed alpha_3 block from L_3 to L_2
    CHECK((b.plus_x - om.block(u_index(2), u_index(3), 2, 2)).norm() < 1e-15);
    CHECK((b.minus_x - b.plus_x.transpose()).norm() == 0.0);
    CHECK((b.minus_y - b.plus_y.transpose()).norm() == 0.0);
    CHECK(b.plus_x.norm() > 0.1);
    CHECK_THROWS_AS(gamma0_blocks(TodaState::constant(torus_data(2, 8, {1, 1}).grid, {2, 1}),
                                  torus_data(2, 8, {1, 1}), 0, 0),
                    std::invalid_argument);

    const std::vector<double> w{0.3, -0.2, 0.1, 0.5};
    const auto z = gamma0_blocks_at(4, w, {cplx(1 / std::sqrt(2.0)), 0.0, 0.0, 0.0, 0.0});
    CHECK(z.plus_x.norm() == 0.0);
    CHECK(z.plus_y.norm() == 0.0);

    // the same blocks read off the normal connection of a nonconstant solution
    const auto dd = disk3(17);
    const auto sol = solve_toda(dd).state;
    const auto geom = NormalGeometry::build(sol, dd);
    const std::size_t p = dd.grid.index(5, 9);
    const auto bb = gamma0_blocks(sol, dd, 5, 9);
    // normal components (u_2, v_2, u_3, v_3): N- rows 0..1, N+ columns 2..3
    CHECK((geom.normal_x[p].block(0, 2, 2, 2) - bb.plus_x).norm() < 1e-14);
    CHECK((geom.normal_y[p].block(2, 0, 2, 2) - bb.minus_y).norm() < 1e-14);
}

TEST_CASE("trace eigenvalue list") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    const auto e = trg_eigenvalues(TodaState::constant(d.grid, {2, 2, 1}), d, 0, 0);
    CHECK(e.max_deviation < 1e-12);
    CHECK(std::any_of(e.analytic.begin(), e.analytic.end(), [](double v) { return std::abs(v - 2.0) < 1e-12; }));
    CHECK(std::any_of(e.analytic.begin(), e.analytic.end(), [](double v) { return std::abs(v) < 1e-12; }));
    CHECK(*std::max_element(e.numeric.begin(), e.numeric.end()) == doctest::Approx(2.0));

    // alpha^- = 0: the pair collapses to a double eigenvalue 2 |alpha^+|^2
    const std::vector<double> w{std::log(2.0), std::log(2.0), 0.0};
    const auto e0 = trg_eigenvalues_at(3, w, {cplx(1 / std::sqrt(2.0)), 1.0, 1.0, 0.0});
    const double plus = 1.0 * 1.0 / (2.0 * 2.0);
    int hits = 0;
    for (double v : e0.numeric)
        if (std::abs(v - 2.0 * plus) < 1e-12) ++hits;
    CHECK(hits == 4);
    CHECK(e0.max_deviation < 1e-12);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    int strict = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 3 + trial % 4;
        std::vector<double> lw(n);
        for (auto& v : lw) v = u(rng);
        std::vector<cplx> alpha{cplx(1 / std::sqrt(2.0))};
        for (int k = 1; k <= n; ++k) alpha.emplace_back(0.5 * u(rng), 0.5 * u(rng));
        const auto ev = trg_eigenvalues_at(n, lw, alpha);
        REQUIRE(ev.max_deviation < 1e-10);
        if (strict_norm_chain_at(n, lw, alpha)) {
            ++strict;
            for (double v : ev.numeric) REQUIRE(v < 2.0);
        }
    }
    MESSAGE("strict chains sampled: " << strict);
}

TEST_CASE("second variation signs on disk solutions") {
    const auto d = disk3(33);
    const auto sol = solve_toda(d).state;
    const auto star = check_star(sol, d);
    for (double m : star.min_values) REQUIRE(m > 0.0);
    const auto geom = NormalGeometry::build(sol, d);
    const auto mask = collar_mask(d.grid);
    CHECK(second_variation(NormalField::zero(d.grid, 3, Parity::Plus), geom) == 0.0);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        const auto xp = random_bump(d.grid, 3, Parity::Plus, rng, mask);
        const auto xm = random_bump(d.grid, 3, Parity::Minus, rng, mask);
        CHECK(second_variation(xp, geom) > 0.0);
        CHECK(second_variation(xm, geom) < 0.0);
    }

    const auto d2 = disk2(33);
    const auto s2 = solve_toda(d2).state;
    const auto g2 = NormalGeometry::build(s2, d2);
    for (int k = 0; k < 10; ++k) CHECK(second_variation(random_bump(d2.grid, 2, Parity::Minus, rng, mask), g2) < 0.0);

    NormalField edge = NormalField::zero(d.grid, 3, Parity::Plus);
    edge.at(d.grid.index(1, 10))[2] = 1.0;
    CHECK_THROWS_AS(second_variation(edge, geom), std::invalid_argument);
}

TEST_CASE("Jacobi operator") {
    const auto d = disk3(17);
    const auto sol = solve_toda(d).state;
    const auto geom = NormalGeometry::build(sol, d);
    const auto mask = collar_mask(d.grid);
    const auto op = assemble_jacobi(geom, mask);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 5; ++k) {
        const auto a = random_bump(d.grid, 3, Parity::Mixed, rng, mask);
        const auto b = random_bump(d.grid, 3, Parity::Mixed, rng, mask);
        const Eigen::VectorXd va = op.pack(a), vb = op.pack(b);
        const double lab = op.inner(op.apply(va), vb), alb = op.inner(va, op.apply(vb));
        CHECK(std::abs(lab - alb) < 1e-10 * std::max(1.0, std::abs(lab)));
        const double q = -op.inner(op.apply(va), va);
        const double sv = second_variation(a, geom);
        CHECK(std::abs(q - sv) < 1e-8 * std::abs(sv));
    }
    const auto xp = random_bump(d.grid, 3, Parity::Plus, rng, mask);
    const auto xm = random_bump(d.grid, 3, Parity::Minus, rng, mask);
    const Eigen::VectorXd vp = op.pack(xp), vm = op.pack(xm);
    const double c1 = op.inner(op.apply(vm), vp), c2 = op.inner(op.apply(vp), vm);
    CHECK(std::abs(c1 - c2) < 1e-10 * std::max(1.0, std::abs(c1)));

    const auto applied = jacobi_apply(xp, sol, d);
    const Eigen::VectorXd direct = op.apply(vp);
    CHECK((op.pack(applied) - direct).norm() == 0.0);

    const double smin = jacobi_min_singular(op);
    MESSAGE("min singular value on the disk: " << smin);
    CHECK(smin > 0.0);
    CHECK(jacobi_min_singular_dense(op) == smin);
    const double iter = jacobi_min_singular_iterative(op);
    CHECK(std::abs(iter - smin) < 1e-8 * smin);

    const auto t2 = torus_data(2, 12, {1, 1});
    const auto s2 = TodaState::constant(t2.grid, constant_solution(2, {1, 1}));
    CHECK(jacobi_min_singular(s2, t2, {}) > 0.0);
}

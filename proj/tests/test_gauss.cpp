#include "doctest.h"

#include "todalab/gauss.hpp"

#include <cmath>
#include <random>

using namespace todalab;
using Mat = Eigen::MatrixXd;

namespace {

CyclicData torus_data(int n, int N, const std::vector<double>& mags) {
    return CyclicData::constant(n, DomainGrid::make(DomainMode::Torus, N, 1.0), mags);
}

CyclicData disk_data(int N) {
    CyclicData d;
    d.n = 3;
    d.grid = DomainGrid::make(DomainMode::Disk, N, 1.0);
    d.alpha = {Poly(1.0)};
    d.alpha_plus = Poly(1.0);
    d.alpha_minus = Poly(std::vector<cplx>{0.0, 1.0});
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("lift order and signature") {
    CHECK(gauss_lift_order(3) == std::vector<int>{1, 2, 5, 6, 0, 3, 4});
    CHECK(gauss_lift_order(2) == std::vector<int>{1, 2, 0, 3, 4});
    CHECK(gauss_lift_order(4) == std::vector<int>{1, 2, 5, 6, 0, 3, 4, 7, 8});
    CHECK(lift_spacelike_size(3) == 4);
    CHECK(lift_spacelike_size(4) == 4);
    for (int n : {2, 3, 4, 5}) {
        const Mat perm = gauss_lift_permutation(n);
        CHECK((perm.transpose() * signature_matrix(n) * perm - lift_signature(n)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(gauss_lift_order(1), std::invalid_argument);

    const auto d = torus_data(3, 32, {1, 1, 1});
    const auto f = integrate_frame(assemble_omega(TodaState::constant(d.grid, {2, 2, 1}), d), 0, 0);
    CHECK(lift_gram_defect(gauss_lift(f)) < 1e-6);
}

TEST_CASE("Gamma of the n = 3 constant solution") {
    const auto d = torus_data(3, 8, {1, 1, 1});
    const auto s = TodaState::constant(d.grid, {2, 2, 1});
    const auto gm = gamma_matrix(s, d, 2, 3);
    REQUIRE(gm.x.rows() == 3);
    REQUIRE(gm.x.cols() == 4);
    // theta^T row: sqrt(h1) (dx, dy)
    CHECK(gm.x(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(gm.x(0, 1) == 0.0);
    CHECK(gm.y(0, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(gm.x.block(0, 2, 1, 2).norm() == 0.0);
    CHECK(gm.y.block(0, 2, 1, 2).norm() == 0.0);
    // alpha_2 block and transposed alpha_3 block
    CHECK(gm.x.block(1, 0, 2, 2).norm() > 0.1);
    CHECK(gm.x.block(1, 2, 2, 2).norm() > 0.1);

    // only theta: all other alphas vanish
    CyclicData z = d;
    z.alpha = {Poly(0.0)};
    z.alpha_plus = Poly(0.0);
    z.alpha_minus = Poly(0.0);
    const auto g0 = gamma_matrix(TodaState::constant(z.grid, {2, 3, 5}), z, 0, 0);
    CHECK(g0.x.bottomRows(2).norm() == 0.0);
    CHECK(g0.y.bottomRows(2).norm() == 0.0);
    CHECK(g0.x(0, 0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("trace of Gamma^T Gamma is 2 (1/2 + sum of norms) g") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {2, 3, 4, 5}) {
        CyclicData d;
        d.n = n;
        d.grid = DomainGrid::make(DomainMode::Torus, 8, 1.0);
        for (int j = 2; j <= n - 1; ++j) d.alpha.push_back(Poly(cplx(u(rng), u(rng))));
        d.alpha_plus = Poly(cplx(u(rng), u(rng)));
        d.alpha_minus = Poly(cplx(u(rng), u(rng)));
        TodaState s;
        for (int k = 0; k < n; ++k) {
            s.w.emplace_back(d.grid);
            for (auto& v : s.w[k].values) v = u(rng);
        }
        for (std::size_t p = 0; p < d.grid.points(); ++p) {
            const int i = static_cast<int>(p % 8), j = static_cast<int>(p / 8);
            const auto gm = gamma_matrix(s, d, i, j);
            const double expect = 2.0 * norm_sum(s, d, p) * s.h(1, p);
            CHECK((gm.x.transpose() * gm.x).trace() == doctest::Approx(expect).epsilon(1e-12));
            CHECK((gm.y.transpose() * gm.y).trace() == doctest::Approx(expect).epsilon(1e-12));
            CHECK(std::abs((gm.x.transpose() * gm.y).trace()) < 1e-12 * expect);
        }
    }
}

TEST_CASE("pullback metric of constant solutions") {
    const auto d = torus_data(3, 64, {1, 1, 1});
    const auto s = TodaState::constant(d.grid, {2, 2, 1});
    CHECK(norm_sum(s, d, 0) == doctest::Approx(1.5));
    const auto pm = pullback_metric(integrate_frame(assemble_omega(s, d), 0, 0), s, d);
    CHECK(pm.formula[0] == doctest::Approx(60.0));
    // fourth-order differences of the RK4 frames
    CHECK(pm.formula_rel_err < 1e-5);
    CHECK(pm.conformality < 1e-5);

    const auto h = constant_solution(2, {1.0, 1.0});
    const auto d2 = torus_data(2, 64, {1.0, 1.0});
    const auto s2 = TodaState::constant(d2.grid, h);
    const auto pm2 = pullback_metric(integrate_frame(assemble_omega(s2, d2), 0, 0), s2, d2);
    CHECK(pm2.formula[5] == doctest::Approx(12.0 * norm_sum(s2, d2, 5) * h[0]));
    CHECK(pm2.formula_rel_err < 1e-5);

    // theta only: the formula reduces to (8n - 4) / 2 times h_1
    CyclicData z = torus_data(3, 8, {1, 1, 1});
    z.alpha = {Poly(0.0)};
    z.alpha_plus = Poly(0.0);
    z.alpha_minus = Poly(0.0);
    const auto sz = TodaState::constant(z.grid, {2, 3, 5});
    CHECK(norm_sum(sz, z, 3) == 0.5);
}

TEST_CASE("pullback metric of disk solutions converges to the formula") {
    std::vector<double> errs;
    for (int N : {33, 65}) {
        const auto d = disk_data(N);
        const auto s = solve_toda(d).state;
        const auto pm = pullback_metric(integrate_frame(assemble_omega(s, d), N / 2, N / 2), s, d);
        errs.push_back(pm.formula_rel_err);
        CHECK(pm.conformality < 1e-3);
    }
    CHECK(errs[1] < 1e-3);
    CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("J-holomorphy of the G2' constant solution") {
    const auto d = torus_data(3, 64, {1, 1, 1});
    const auto s = TodaState::constant(d.grid, {2, 2, 1});
    const auto f = integrate_frame(assemble_omega(s, d), 0, 0);
    const auto rep = jholo_residual(f, s, d);
    CHECK(rep.residual(0, 0) == 0.0);
    CHECK(rep.max_residual < 1e-6);
    CHECK(rep.phi_residual_max < 1e-6);
    CHECK(rep.max_anti_residual > 1.0);

    const auto fa = antipodal_frames(f);
    const auto anti = jholo_residual(fa, s, d, 1e-8, Mat(f.at(0)));
    CHECK(anti.max_anti_residual < 1e-6);
    CHECK(anti.max_residual > 1.0);

    const auto bad = TodaState::constant(d.grid, {2, 2, 2});
    const auto fb = integrate_frame(assemble_omega(bad, d), 0, 0);
    CHECK_THROWS_WITH_AS(jholo_residual(fb, bad, d), doctest::Contains("h_3 = h_1 h_2 / 4"), std::invalid_argument);

    const auto d2 = torus_data(2, 8, {1.0, 1.0});
    const auto s2 = TodaState::constant(d2.grid, constant_solution(2, {1.0, 1.0}));
    CHECK_THROWS_AS(jholo_residual(integrate_frame(assemble_omega(s2, d2), 0, 0), s2, d2), std::invalid_argument);
}

#include "todalab/gauss.hpp"

#include "todalab/algebra.hpp"
#include "todalab/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace todalab {

using Mat = Eigen::MatrixXd;

std::vector<int> gauss_lift_order(int n) {
    if (n < 2) throw std::invalid_argument("gauss lift needs n >= 2");
    std::vector<int> order;
    for (int i = 1; i <= n; i += 2) {
        order.push_back(u_index(i));
        order.push_back(v_index(i));
    }
    order.push_back(0);
    for (int i = 2; i <= n; i += 2) {
        order.push_back(u_index(i));
        order.push_back(v_index(i));
    }
    return order;
}

Mat gauss_lift_permutation(int n) {
    const auto order = gauss_lift_order(n);
    const int d = 2 * n + 1;
    Mat perm = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) perm(order[k], k) = 1.0;
    return perm;
}

int lift_spacelike_size(int n) { return 2 * ((n + 1) / 2); }

Mat lift_signature(int n) {
    const int d = 2 * n + 1, p = lift_spacelike_size(n);
    Mat g = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) g(k, k) = k < p ? 1.0 : -1.0;
    return g;
}

GaussLift gauss_lift(const FrameField& frames) {
    GaussLift lift;
    lift.grid = frames.grid;
    lift.d = frames.d;
    lift.n = (frames.d - 1) / 2;
    lift.data.resize(frames.data.size());
    const Mat perm = gauss_lift_permutation(lift.n);
    parallel_for(frames.grid.points(), [&](std::size_t p) { lift.at(p) = Mat(frames.at(p)) * perm; });
    return lift;
}

double lift_gram_defect(const GaussLift& lift) {
    const Mat ambient = signature_matrix(lift.n);
    const Mat g = lift_signature(lift.n);
    double worst = 0.0;
    for (std::size_t p = 0; p < lift.grid.points(); ++p) {
        const Mat m = lift.at(p);
        worst = std::max(worst, (m.transpose() * ambient * m - g).cwiseAbs().maxCoeff());
    }
    return worst;
}

Mat gamma_block(const Mat& omega, int n) {
    const Mat perm = gauss_lift_permutation(n);
    const Mat local = perm.transpose() * omega * perm;
    const int p = lift_spacelike_size(n);
    return local.bottomLeftCorner(2 * n + 1 - p, p);
}

GammaForm gamma_matrix(const TodaState& state, const CyclicData& data, int i, int j) {
    const int n = data.n;
    const std::size_t p = state.grid().index(i, j);
    std::vector<double> w(n), zero(n, 0.0);
    for (int k = 0; k < n; ++k) w[k] = state.w[k].values[p];
    Mat ox, oy;
    // Gamma has no derivative terms; those sit in the diagonal blocks
    connection_at(n, w, zero, zero, alpha_values_at(data, i, j), ox, oy);
    return {gamma_block(ox, n), gamma_block(oy, n)};
}

double norm_sum(const TodaState& state, const CyclicData& data, std::size_t p) {
    const int n = data.n;
    const auto alpha = alpha_values_at(data, static_cast<int>(p % data.grid.N), static_cast<int>(p / data.grid.N));
    const double h1 = state.h(1, p);
    double sum = 0.5;
    for (int j = 2; j <= n - 1; ++j) sum += std::norm(alpha[j - 1]) * state.h(j, p) / (state.h(j - 1, p) * h1);
    const double hn = state.h(n, p), hm = state.h(n - 1, p);
    sum += std::norm(alpha[n - 1]) * hn / (hm * h1);
    sum += std::norm(alpha[n]) / (hm * hn * h1);
    return sum;
}

PullbackMetric pullback_metric(const FrameField& frames, const TodaState& state, const CyclicData& data) {
    const int n = data.n;
    if (frames.d != 2 * n + 1) throw std::invalid_argument("pullback_metric: frame size does not match n");
    const DomainGrid& g = frames.grid;
    const ConnectionForm conn = frame_connection(frames, 4);
    PullbackMetric out;
    out.grid = g;
    out.finite_difference.resize(g.points());
    out.formula.resize(g.points());
    const double killing = killing_scale(n);
    parallel_for(g.points(), [&](std::size_t p) {
        const Mat gx = gamma_block(Mat(conn.x(p)), n);
        const Mat gy = gamma_block(Mat(conn.y(p)), n);
        Eigen::Matrix2d m;
        m(0, 0) = killing * (gx.transpose() * gx).trace();
        m(1, 1) = killing * (gy.transpose() * gy).trace();
        m(0, 1) = m(1, 0) = killing * (gx.transpose() * gy).trace();
        out.finite_difference[p] = m;
        out.formula[p] = 2.0 * killing * norm_sum(state, data, p) * state.h(1, p);
    });
    const bool disk = g.mode == DomainMode::Disk;
    for (int j = 0; j < g.N; ++j)
        for (int i = 0; i < g.N; ++i) {
            if (disk && (i == 0 || j == 0 || i == g.N - 1 || j == g.N - 1)) continue;
            const std::size_t p = g.index(i, j);
            const Eigen::Matrix2d& m = out.finite_difference[p];
            const double f = out.formula[p];
            const double dev = (m - f * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
            out.formula_rel_err = std::max(out.formula_rel_err, dev / f);
            const double trace = m.trace();
            out.conformality =
                std::max(out.conformality, std::max(2.0 * std::abs(m(0, 1)), std::abs(m(0, 0) - m(1, 1))) / trace);
        }
    return out;
}

JHoloReport jholo_residual(const FrameField& frames, const TodaState& state, const CyclicData& data,
                           double constraint_tol, const Mat& reference_frame) {
    if (data.n != 3 || frames.d != 7) throw std::invalid_argument("jholo_residual needs n = 3");
    if (!g2_constraint_holds(state, constraint_tol))
        throw std::invalid_argument("jholo_residual: the constraint h_3 = h_1 h_2 / 4 does not hold");
    const DomainGrid& g = frames.grid;
    const Mat b = g2_frame_matrix();
    const Mat reference =
        reference_frame.size() == 0 ? Mat(frames.at(g.index(frames.base_i, frames.base_j))) : reference_frame;
    if (reference.rows() != 7 || reference.cols() != 7)
        throw std::invalid_argument("jholo_residual: reference frame must be 7x7");
    const Mat base_inv = reference.inverse();
    JHoloReport rep;
    rep.residual = ScalarField(g);
    std::vector<double> anti(g.points()), phi(g.points());
    parallel_for(g.points(), [&](std::size_t p) {
        const Mat rel = base_inv * Mat(frames.at(p));
        const Mat m = b.transpose() * rel * b;  // b is a signed permutation
        auto column = [&](int k) {
            PseudoVector<double> v(7);
            for (int r = 0; r < 7; ++r) v[r] = m(r, k);
            return v;
        };
        const auto fu = cross(column(0), column(3));
        const auto v1 = column(4);
        double plus = 0.0, minus = 0.0;
        for (int r = 0; r < 7; ++r) {
            plus += (fu[r] - v1[r]) * (fu[r] - v1[r]);
            minus += (fu[r] + v1[r]) * (fu[r] + v1[r]);
        }
        rep.residual.values[p] = std::sqrt(plus);
        anti[p] = std::sqrt(minus);
        phi[p] = g2_phi_residual(rel);
    });
    for (std::size_t p = 0; p < g.points(); ++p) {
        rep.max_residual = std::max(rep.max_residual, rep.residual.values[p]);
        rep.max_anti_residual = std::max(rep.max_anti_residual, anti[p]);
        rep.phi_residual_max = std::max(rep.phi_residual_max, phi[p]);
    }
    return rep;
}

}  // namespace todalab

#pragma once

#include "todalab/frame.hpp"

#include <Eigen/Dense>

#include <vector>

namespace todalab {

/// Killing form on p is this multiple of the standard metric of R^{p x (q+1)}.
inline double killing_scale(int n) { return 4.0 * n - 2.0; }

/// Frame indices in lift order (u_1, v_1, u_3, v_3, ..., iota, u_2, v_2, u_4, v_4, ...).
std::vector<int> gauss_lift_order(int n);

/// Permutation matrix: column k is the unit vector of gauss_lift_order(n)[k].
Eigen::MatrixXd gauss_lift_permutation(int n);

/// Spacelike block size p (the odd blocks L_1, L_3, ...).
int lift_spacelike_size(int n);

/// Signature of the permuted frame: +1 on the odd blocks, then -1.
Eigen::MatrixXd lift_signature(int n);

struct GaussLift {
    DomainGrid grid;
    int n = 0;
    int d = 0;
    std::vector<double> data;

    using Map = MatrixForm1::Map;
    using ConstMap = MatrixForm1::ConstMap;
    Map at(std::size_t p) { return Map(data.data() + p * d * d, d, d); }
    ConstMap at(std::size_t p) const { return ConstMap(data.data() + p * d * d, d, d); }
};

/// Column permutation of the frames into the lift of the Gauss map.
GaussLift gauss_lift(const FrameField& frames);

/// Largest |L^T G L - G'| over the lift, G the ambient signature.
double lift_gram_defect(const GaussLift& lift);

struct GammaForm {
    Eigen::MatrixXd x;  // (q+1) x p, rows (iota, L_2, L_4, ...), columns (L_1, L_3, ...)
    Eigen::MatrixXd y;
};

/// The p-part of the lift's Maurer-Cartan form, built from the state at one point.
GammaForm gamma_matrix(const TodaState& state, const CyclicData& data, int i, int j);

/// The same block read off a connection matrix (frame order).
Eigen::MatrixXd gamma_block(const Eigen::MatrixXd& omega, int n);

/// 1/2 + sum of the squared norms of the alpha's at a point.
double norm_sum(const TodaState& state, const CyclicData& data, std::size_t p);

struct PullbackMetric {
    DomainGrid grid;
    std::vector<Eigen::Matrix2d> finite_difference;  // (4n-2) Tr(Gamma_a^T Gamma_b)
    std::vector<double> formula;                      // (8n-4)(1/2 + sum |alpha|^2) h_1
    double formula_rel_err = 0.0;
    double conformality = 0.0;
};

/// Pullback of the symmetric-space metric by the Gauss map, from fourth-order
/// differences of the lift and from the closed formula. Maxima skip the disk
/// boundary.
PullbackMetric pullback_metric(const FrameField& frames, const TodaState& state, const CyclicData& data);

struct JHoloReport {
    ScalarField residual;          // |F x U_1 - V_1|
    double max_residual = 0.0;
    double max_anti_residual = 0.0;  // |F x U_1 + V_1|
    double phi_residual_max = 0.0;
};

/// J-holomorphy for n = 3; requires h_3 = h_1 h_2 / 4 to relative tolerance
/// constraint_tol. J is read in the G2' frame built on reference_frame, by
/// default the frame at the base point.
JHoloReport jholo_residual(const FrameField& frames, const TodaState& state, const CyclicData& data,
                           double constraint_tol = 1e-8, const Eigen::MatrixXd& reference_frame = Eigen::MatrixXd());

}  // namespace todalab

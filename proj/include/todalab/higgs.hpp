#pragma once

#include "todalab/frame.hpp"

#include <Eigen/Dense>

#include <vector>

namespace todalab {

using CMatrix = Eigen::MatrixXcd;

/// Holomorphic frame order of E: (l_n^{-1}, ..., l_1^{-1}, 1, l_1, ..., l_n).
inline int line_index(int n, int i) { return n + i; }
inline int dual_line_index(int n, int i) { return n - i; }

/// dz-coefficient of the Higgs field from values in alpha_values_at order.
CMatrix higgs_field_at(int n, const std::vector<cplx>& alpha);
CMatrix higgs_field(const CyclicData& data, int i, int j);

/// diag(1/h_n, ..., 1/h_1, 1, h_1, ..., h_n) from the logs.
Eigen::VectorXd harmonic_metric_at(const std::vector<double>& w);

/// H^{-1} conj(Phi)^T H, the dzbar-coefficient of Phi*.
CMatrix higgs_adjoint(const CMatrix& phi, const Eigen::VectorXd& metric);

/// Columns (1, u_1, v_1, ..., u_n, v_n) in the holomorphic frame.
CMatrix gauge_matrix_at(const std::vector<double>& w);

struct HiggsMatrices {
    CMatrix phi;
    CMatrix phi_star;
    Eigen::VectorXd metric;
    CMatrix omega_x;  // D^H = d + omega_x dx + omega_y dy
    CMatrix omega_y;
    CMatrix gauge;
};

/// Everything at one grid point; derivatives of w by differences of the given order.
HiggsMatrices higgs_matrices(const TodaState& state, const CyclicData& data, int i, int j, int order = 2);

struct ComplexConnection {
    DomainGrid grid;
    int d = 0;
    std::vector<CMatrix> x;
    std::vector<CMatrix> y;
};

/// H^{-1} dH + Phi + Phi* in the holomorphic frame, with the partials of
/// log h from central differences (one-sided next to the disk boundary).
ComplexConnection hitchin_connection(const TodaState& state, const CyclicData& data, int order = 2);

/// r_k = d^2/dzdzbar log h_k - [Phi, Phi*] at l_k; same layout and sign as
/// toda_residual, zero on the disk boundary.
std::vector<ScalarField> hitchin_residual(const TodaState& state, const CyclicData& data);

struct CommutatorShape {
    double max_off_diagonal = 0.0;
    double max_dual_defect = 0.0;  // |C(l_i^{-1}) + C(l_i)|
    double max_unit_entry = 0.0;   // |C(1)|
};

CommutatorShape commutator_shape(const TodaState& state, const CyclicData& data);

struct GaugeReport {
    ScalarField residual;  // largest entry of R^{-1} Omega' R + R^{-1} dR - Omega per point
    double max_residual = 0.0;
    double max_imaginary = 0.0;  // of R^{-1} Omega' R + R^{-1} dR
};

/// Gauge transform of the Hitchin connection of (state, data) against a
/// frame connection. dR by differences of the given order.
GaugeReport gauge_identity(const TodaState& state, const CyclicData& data, const ConnectionForm& omega,
                           int order = 2);
GaugeReport gauge_identity(const TodaState& state, const CyclicData& data, int order = 2);
double gauge_identity_residual(const TodaState& state, const CyclicData& data);

struct G2HiggsReport {
    double constraint = 0.0;        // max |h_3 - h_1 h_2 / 4|
    double varpi_residual = 0.0;    // over both components of D^H
    double pattern_residual = 0.0;
    double so_q_residual = 0.0;
    bool pattern_holds = false;
};

/// n = 3 only.
G2HiggsReport g2_checks(const TodaState& state, const CyclicData& data, double tol = 1e-10);

}  // namespace todalab

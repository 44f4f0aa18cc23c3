#pragma once

#include "todalab/algebra.hpp"
#include "todalab/toda.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace todalab {

/// Connection matrices Omega_x, Omega_y of dP = P Omega, size 2n+1.
using ConnectionForm = MatrixForm1;

/// diag(ambient_signs) for the frame order (iota, u_1, v_1, ..., u_n, v_n).
Eigen::MatrixXd signature_matrix(int n);

/// Frame index of u_i (v_i is the next one); iota is 0.
inline int u_index(int i) { return 2 * i - 1; }
inline int v_index(int i) { return 2 * i; }

/// Block of a frame index: 0 for iota, i for u_i and v_i.
inline int block_of(int k) { return (k + 1) / 2; }

/// Omega at one point from the logs w_k, their partials, and the values
/// alpha_1, ..., alpha_{n-1}, alpha_n^+, alpha_n^- (alpha_values_at order).
void connection_at(int n, const std::vector<double>& w, const std::vector<double>& dw_dx,
                   const std::vector<double>& dw_dy, const std::vector<cplx>& alpha, Eigen::MatrixXd& ox,
                   Eigen::MatrixXd& oy);

/// Omega from a Toda state; derivatives of w by central differences of the
/// given order. Requires |alpha_1|^2 = 1/2.
ConnectionForm assemble_omega(const TodaState& state, const CyclicData& data, int order = 4);

/// Largest |X^T G + G X| over all matrices of the form.
double so_defect(const ConnectionForm& omega);

struct GaussCodazziReport {
    MatrixForm2 curvature;
    double max_total = 0.0;
    double max_diagonal = 0.0;     // blocks L_i with themselves
    double max_first_off = 0.0;    // neighbouring blocks
    double max_second_off = 0.0;   // blocks two apart
};

/// Plaquette curvature of Omega, split by block distance.
GaussCodazziReport gauss_codazzi_residual(const ConnectionForm& omega);

enum class TreeOrder { XFirst, YFirst };

struct FrameField {
    DomainGrid grid;
    int d = 0;
    int base_i = 0;
    int base_j = 0;
    TreeOrder order = TreeOrder::XFirst;
    std::vector<double> data;
    std::vector<int> path_length;  // number of edges from the base point

    using Map = MatrixForm1::Map;
    using ConstMap = MatrixForm1::ConstMap;
    Map at(std::size_t p) { return Map(data.data() + p * d * d, d, d); }
    ConstMap at(std::size_t p) const { return ConstMap(data.data() + p * d * d, d, d); }
    /// The immersion F = first column.
    Eigen::VectorXd position(std::size_t p) const { return at(p).col(0); }
};

/// frames.bin: one JSON header line {N, d, layout, mode, L, base_i, base_j,
/// order}, then the per-point d x d matrices as raw float64 followed by the
/// path lengths as int32.
void write_frames(const FrameField& frames, const std::string& path);
FrameField read_frames(const std::string& path);

/// RK4 transport of dP = P Omega along a spanning tree of lattice edges: the
/// base row (or column) first, then every column (or row) branch. Omega is
/// linearly interpolated along each edge.
FrameField integrate_frame(const ConnectionForm& omega, int base_i, int base_j,
                           const Eigen::MatrixXd& base_frame = Eigen::MatrixXd(), TreeOrder order = TreeOrder::XFirst);

/// One RK4 step of dP = P Omega(s) over length h, Omega linear from a to b.
Eigen::MatrixXd rk4_step(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double h);

struct FrameDrift {
    double position_norm = 0.0;  // max |<F,F> + 1|
    double gram = 0.0;           // max |P^T G P - G|
};

FrameDrift frame_drift(const FrameField& frames);

/// Largest entry difference between two frame fields on the same grid.
double frame_distance(const FrameField& a, const FrameField& b);

struct MonodromyReport {
    Eigen::MatrixXd mx;
    Eigen::MatrixXd my;
    double commutator = 0.0;
    double metric_x = 0.0;
    double metric_y = 0.0;
    bool has_phi = false;
    double phi_residual = 0.0;
};

/// Holonomies around the two torus period loops starting at grid point (0, 0)
/// with P = identity. For n = 3 with h_3 = h_1 h_2 / 4 (checked on the
/// state when supplied) also the phi-residual in the base G2' frame.
MonodromyReport monodromy(const ConnectionForm& omega, const TodaState* state = nullptr);

/// Frame-to-G2' basis change: column k holds e_{k+1} = (F, U_2, V_2, U_1, V_1, -V_3, U_3)
/// in frame coordinates (n = 3).
Eigen::MatrixXd g2_frame_matrix();

/// Largest change of the phi coefficients under a frame-coordinate matrix m,
/// read in the G2' frame.
double g2_phi_residual(const Eigen::MatrixXd& m);

/// h_3 = h_1 h_2 / 4 at every point, relative to max(1, h_3).
bool g2_constraint_holds(const TodaState& state, double tol = 1e-10);

/// P^{-1} dP by differences of the frames (order 2 or 4).
ConnectionForm frame_connection(const FrameField& frames, int order = 4);

struct StructureReport {
    double position_norm = 0.0;
    double gram = 0.0;
    double tangent_span = 0.0;      // |dF - projection onto span(u_1, v_1)| relative to |dF|
    double first_fundamental = 0.0; // relative error of <dF, dF> against h_1 (dx^2 + dy^2)
    double block_pattern = 0.0;     // largest coupling between blocks two or more apart
    double second_fundamental = 0.0;// largest deviation of the (L_2, L_1) block from alpha_2
    double tol = 1e-6;
    bool passed() const;
};

/// Structure checks of a frame field against the state that produced it;
/// derivatives are fourth-order differences.
StructureReport verify_structure(const FrameField& frames, const TodaState& state, const CyclicData& data,
                                 double tol = 1e-6);

/// Frames of -F: (-iota, -u_1, -v_1, ..., -u_n, v_n), which keeps the ambient
/// orientation of the adapted frame.
FrameField antipodal_frames(const FrameField& frames);

/// Complex coefficients of the rotation part (alpha_n^+ type) and the
/// reflection part (alpha_n^- type) of the dx-component of the (L_n, L_{n-1})
/// block, each still multiplied by its metric factor.
std::pair<cplx, cplx> alpha_n_parts(const Eigen::Ref<const Eigen::MatrixXd>& omega_x, int n);

/// w_i recovered from frames: h_1 from the first fundamental form, then
/// h_j/h_{j-1} from the size of the alpha blocks. NaN where an alpha vanishes.
TodaState reconstruct_logs(const FrameField& frames, const CyclicData& data);

}  // namespace todalab

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "horizonlab/mode_ode.hpp"

namespace hzl {

// Compactly supported smooth bump exp(1 - 1/(1 - s^2)), s = (theta - center)/width,
// times amp * exp(i freq theta).
struct Bump {
    double center, width;
    cplx amp;
    double freq = 0.0;
};

// Smooth source in theta with region support flags: a sum of bumps plus an
// optional general term supported in [custom_lo, custom_hi].
struct SourceFunction {
    std::vector<Bump> bumps;
    std::function<cplx(double)> custom;
    double custom_lo = 0.0, custom_hi = 0.0;
    bool cap_plus = false, belt = false, cap_minus = false;
    cplx operator()(double theta) const;
    double sup_norm() const;
};

enum class RegionMask { All, CapPlus, Belt, CapMinus };

SourceFunction make_source(std::vector<Bump> bumps);
SourceFunction make_source(std::function<cplx(double)> fn, double lo, double hi);
SourceFunction operator+(const SourceFunction& a, const SourceFunction& b);
// Smallest interval containing supp f within [lo, hi]; false if there is none.
bool source_span(const SourceFunction& f, double lo, double hi, double& a, double& b);
// The part of f supported in one region. Throws SourceError if a bump or the
// general term straddles a horizon.
SourceFunction restrict_to(const SourceFunction& f, Region r);
SourceFunction operator*(cplx c, const SourceFunction& a);
// Throws SourceError unless the source vanishes in the pole patches and
// outside its flagged regions.
void validate_source(const SourceFunction& f, const Numerics& num);
// Reproducible family of sources, each a sum of three bumps inside the mask.
std::vector<SourceFunction> random_sources(std::uint64_t seed, int count, RegionMask mask,
                                           const Numerics& num = {});

struct AsymptoticData {
    cplx aplus = 0.0, aminus = 0.0;
};

// Particular solution pieces of P u = f, independent of the label I.
struct ParticularPieces {
    SourceFunction src;
    FrobeniusSolution hp, hm;          // horizon series at S+ and S-
    PanelSolution capP, belt, capM;    // integrated pieces
    cplx ap_plus, bp_plus;             // cap+ pieces minus hp: alpha phi0 + beta psi
    cplx ap_minus, bp_minus;           // same at S-
    cplx a_off, b_off;                 // belt piece at S- minus hm
};
std::shared_ptr<const ParticularPieces> make_particular(const ModeSolver& s, const SourceFunction& f);

// Global mode solution: pw * particular + combination of homogeneous pieces,
// with x = (alpha_c+, beta_c+, alpha_b, beta_b, alpha_c-, beta_c-).
class GlobalSolution {
public:
    std::shared_ptr<const ModeSolver> solver;
    std::shared_ptr<const ParticularPieces> part;
    cplx pw = 0.0;
    Eigen::Matrix<cplx, 6, 1> x = Eigen::Matrix<cplx, 6, 1>::Zero();

    Jet eval(double theta) const;
    HorizonCoefficients coefficients(int which) const;
    AsymptoticData data(int which) const;
    // <g, u> = integral of conj(g) u sin(theta) over [0, pi].
    cplx pair(const SourceFunction& g) const;
    SolutionSample sample(const std::vector<double>& grid) const;
    // Max of |P u - pw f| over off-node points of every panel, the series zones
    // and the pole patches.
    double residual() const;
    // Regular multiples of y_reg in the two caps.
    cplx cap_plus_multiple() const;
    cplx cap_minus_multiple() const;
};

GlobalSolution operator+(const GlobalSolution& a, const GlobalSolution& b);
GlobalSolution operator-(const GlobalSolution& a, const GlobalSolution& b);
GlobalSolution operator*(cplx c, const GlobalSolution& a);

// Two solutions spanning Sol(P) for this mode (belt coefficients (1,0), (0,1) at S+).
std::array<GlobalSolution, 2> homogeneous_basis(const std::shared_ptr<const ModeSolver>& s);

// Default sample grid: uniform in theta, skipping the series zones.
std::vector<double> default_grid(const ModeSolver& s, int n = 400);

class ModeGreens {
public:
    ModeGreens(std::shared_ptr<const ModeSolver> s, BranchLabel I);
    const ModeSolver& solver() const { return *s_; }
    std::shared_ptr<const ModeSolver> solver_ptr() const { return s_; }
    BranchLabel label() const { return I_; }
    const ConnectionMatrix& connection() const { return cm_; }
    GlobalSolution solve(const std::shared_ptr<const ParticularPieces>& p) const;
    GlobalSolution solve(const SourceFunction& f) const;

private:
    std::shared_ptr<const ModeSolver> s_;
    BranchLabel I_;
    ConnectionMatrix cm_;
    Eigen::PartialPivLU<Eigen::Matrix<cplx, 6, 6>> lu_;
};

// Throws PoleDetected when the connection matrix is near singular.
ModeGreens build_inverse(const std::shared_ptr<const ModeSolver>& s, BranchLabel I);
ModeGreens build_inverse(SigmaParam sp, int k, BranchLabel I,
                         const MetricProfile& profile = MetricProfile::exact(), Numerics num = {});

struct InverseResult {
    GlobalSolution solution;
    SolutionSample sample;
    AsymptoticData plus, minus;
    double residual;
};
// Throws ResidualTooLarge if the residual exceeds 1e-6 * |f|.
InverseResult apply_inverse(const ModeGreens& g, const SourceFunction& f);

// f -> G f with G = P_{+}^{-1} - P_{-}^{-1} (advanced minus retarded).
class GDiff {
public:
    explicit GDiff(const std::shared_ptr<const ModeSolver>& s);
    GlobalSolution apply(const SourceFunction& f) const;
    GlobalSolution apply(const std::shared_ptr<const ParticularPieces>& p) const;
    const ModeGreens& plus() const { return plus_; }
    const ModeGreens& minus() const { return minus_; }

private:
    ModeGreens plus_, minus_;
};
GDiff g_diff(const std::shared_ptr<const ModeSolver>& s);

using CMatrix = Eigen::MatrixXcd;

// M_ij = <f_i, op(f_j)> for a linear solution operator.
CMatrix gram(const std::vector<SourceFunction>& sources,
             const std::vector<GlobalSolution>& images);
CMatrix inverse_gram(const ModeGreens& g, const std::vector<SourceFunction>& sources);

struct PositivityReport {
    CMatrix form;                  // i^{-1} <f, (P_F^{-1} - P_aF^{-1}) f>
    Eigen::VectorXd eigenvalues;   // ascending
    double hermiticity;            // |M - M^*| / |M|
};
PositivityReport feynman_positivity(const std::shared_ptr<const ModeSolver>& s,
                                    const std::vector<SourceFunction>& sources);

struct PoleEstimate {
    cplx sigma;
    double det_residual;
    int order;
};
// Zeros of the connection determinant in the rectangle [re0, re1] x [im0, im1].
std::vector<PoleEstimate> pole_scan(int k, BranchLabel I, cplx corner0, cplx corner1, int n_grid,
                                    const MetricProfile& profile = MetricProfile::exact(),
                                    Numerics num = {});
// The same with separate grid sizes along the real and imaginary axes.
std::vector<PoleEstimate> pole_scan(int k, BranchLabel I, cplx corner0, cplx corner1, int n_re, int n_im,
                                    const MetricProfile& profile = MetricProfile::exact(), Numerics num = {});
// Minimum of the normalized determinant on a real sigma grid.
double min_real_det(int k, BranchLabel I, double s0, double s1, int n_grid,
                    const MetricProfile& profile = MetricProfile::exact(), Numerics num = {});

}  // namespace hzl

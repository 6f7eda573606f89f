#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "horizonlab/geometry.hpp"

namespace hzl {

// Branches (v + i0)^{-i sigma} and (v - i0)^{-i sigma} of the singular
// horizon behaviour.
enum class Branch { PlusI0, MinusI0 };
// The branch carrying data at the sinks; Feynman keeps it and kills the other.
inline constexpr Branch SINK_BRANCH = Branch::PlusI0;

// Coefficient of |v|^{-i sigma} on v < 0 when the branch is v^{-i sigma} on v > 0.
cplx transmission_coefficient(Branch b, cplx sigma);

// Propagator label I, a subset of {+, -}.
struct BranchLabel {
    bool plus = false;
    bool minus = false;
    static BranchLabel feynman() { return {false, false}; }
    static BranchLabel anti_feynman() { return {true, true}; }
    static BranchLabel advanced() { return {true, false}; }
    static BranchLabel retarded() { return {false, true}; }
    BranchLabel complement() const { return {!plus, !minus}; }
    std::string name() const;
    bool operator==(const BranchLabel& o) const { return plus == o.plus && minus == o.minus; }
};
const std::vector<BranchLabel>& all_branch_labels();

struct Numerics {
    double standoff = 1e-2;        // half-width in v of the series zone at each horizon
    std::size_t frob_order = 30;   // Frobenius truncation order
    double pole_patch = 0.15;      // theta radius of the series zone at each pole
    int panel_n = 24;              // Chebyshev nodes per panel
    double h_max = 0.05;           // maximal panel width in theta
    double panel_tol = 1e-13;      // relative Chebyshev tail tolerance
    int source_fit = 16;           // Chebyshev points for source Taylor data at a horizon
};

// Frobenius solution at the horizon S+ in the scaled variable t = v/scale.
FrobeniusSolution frobenius_expand(const ModeCoefficients& mc, cplx exponent, std::size_t J,
                                   double scale = 1e-2);

// Values and theta-derivatives up to order two.
struct Jet {
    cplx u = 0.0, du = 0.0, d2u = 0.0;
};
Jet operator+(const Jet& a, const Jet& b);
Jet operator*(cplx c, const Jet& a);

// Local basis {phi0, psi = |v|^{-i sigma} phi1} at one horizon.
class HorizonBasis {
public:
    HorizonBasis(const ModeCoefficients& mc, int which, const Numerics& num);
    int which() const { return which_; }
    double delta() const { return delta_; }
    double theta_horizon() const { return which_ > 0 ? kThetaHorizonPlus : kThetaHorizonMinus; }
    // Theta where v = +delta (cap side) and v = -delta (belt side).
    double theta_cap() const { return theta_cap_; }
    double theta_belt() const { return theta_belt_; }
    double theta_of_v(double v) const;
    Jet phi0(double theta) const { return eval(phi0_, theta); }
    Jet psi(double theta) const { return eval(phi1_, theta); }
    Jet eval(const FrobeniusSolution& s, double theta) const;
    // Particular series for the source f(theta); exponent 0 with u_0 = 0.
    FrobeniusSolution particular(const std::function<cplx(double)>& f) const;
    const FrobeniusSolution& phi0_series() const { return phi0_; }
    const FrobeniusSolution& phi1_series() const { return phi1_; }
    // Solves y = a phi0 + b psi from value and derivative at theta.
    std::pair<cplx, cplx> decompose(double theta, cplx u, cplx du) const;

private:
    int which_;
    double delta_;
    int fit_;
    double theta_cap_, theta_belt_;
    Series A_, B_, C_;
    std::size_t J_;
    FrobeniusSolution phi0_, phi1_;
};

// Regular solution t^{|k|/2}(1 + ...) at a pole, t = 1 - v.
class PoleBasis {
public:
    PoleBasis(const ModeCoefficients& mc, const Numerics& num);
    // which = +1 at theta = 0, -1 at theta = pi.
    Jet eval(int which, double theta) const;
    const FrobeniusSolution& series() const { return reg_; }

private:
    FrobeniusSolution reg_;
};

// Piecewise Chebyshev representation of one or more solutions.
struct Panel {
    double a, b;
    Eigen::MatrixXcd U, Up, Upp;  // n x ncol
};

class PanelSolution {
public:
    std::vector<Panel> panels;  // sorted by a
    int ncol = 0;
    int n = 0;
    double lo() const { return panels.front().a; }
    double hi() const { return panels.back().b; }
    bool contains(double theta) const;
    Jet eval(double theta, int col) const;
};

// Adaptive spectral-integration IVP for a2 u'' + a1 u' + a0 u = f on the
// theta interval from theta0 to theta1 (either direction). `init` is 2 x ncol
// (value, derivative at theta0); sources[c] may be empty for homogeneous columns.
PanelSolution integrate_panels(const ModeCoefficients& mc, double theta0, double theta1,
                               const Eigen::MatrixXcd& init,
                               const std::vector<std::function<cplx(double)>>& sources,
                               const Numerics& num);

struct SolutionSample {
    std::vector<double> grid;
    std::vector<cplx> u, du;
};

// Homogeneous IVP reported on the panel nodes.
SolutionSample integrate_homogeneous(const ModeCoefficients& mc, double theta0, cplx u0, cplx du0,
                                     double theta1, const Numerics& num);

// Breakpoints on [lo, hi] with width <= h_max and geometric grading toward
// the horizons. Throws DomainError if [lo, hi] touches a horizon.
std::vector<double> graded_mesh(double lo, double hi, double h_max);

// Per-(sigma, k) homogeneous data shared by all propagator labels.
class ModeSolver {
public:
    ModeSolver(SigmaParam sp, int k, const MetricProfile& profile, Numerics num = {});

    const ModeCoefficients& mc() const { return mc_; }
    const Numerics& num() const { return num_; }
    const SigmaParam& sp() const { return mc_.sp(); }
    int k() const { return mc_.k(); }
    const HorizonBasis& horizon(int which) const { return which > 0 ? hp_ : hm_; }
    const PoleBasis& pole() const { return pole_; }
    const PanelSolution& cap_plus() const { return capP_; }
    const PanelSolution& cap_minus() const { return capM_; }
    const PanelSolution& belt() const { return belt_; }
    // y_reg = A phi0 + B psi at each horizon (cap side).
    cplx A_plus() const { return Ap_; }
    cplx B_plus() const { return Bp_; }
    cplx A_minus() const { return Am_; }
    cplx B_minus() const { return Bm_; }
    // Belt transfer: coefficients (alpha, beta) at S+ to those at S-.
    const Eigen::Matrix2cd& transfer() const { return T_; }

private:
    ModeCoefficients mc_;
    Numerics num_;
    PoleBasis pole_;
    HorizonBasis hp_, hm_;
    PanelSolution capP_, capM_, belt_;
    cplx Ap_, Bp_, Am_, Bm_;
    Eigen::Matrix2cd T_;
};

// Coefficients of a solution near each horizon: alpha phi0 + beta psi on the
// cap side and on the belt side (beta differs by the branch transmission).
struct HorizonCoefficients {
    cplx alpha_cap, beta_cap, alpha_belt, beta_belt;
};

// Decomposition (a+, a-) of the singular content into (v + i0) and (v - i0) branches.
std::pair<cplx, cplx> branch_split(cplx beta_cap, cplx beta_belt, cplx sigma);

// Unknowns (alpha_c+, beta_c+, alpha_b, beta_b, alpha_c-, beta_c-); alpha_b,
// beta_b refer to the belt near S+.
struct ConnectionMatrix {
    Eigen::Matrix<cplx, 6, 6> M;
    cplx det_analytic;   // det of M, analytic in sigma
    double det_normalized;  // |det| after scaling rows to unit norm
};

// Rows: pole regularity (+, -), smooth matching (S+, S-), two branch rows for I.
// Throws NearSingularConnection when check is set and the normalized det < 1e-10.
ConnectionMatrix connection_matrix(const ModeSolver& s, BranchLabel I, bool check = true);

}  // namespace hzl

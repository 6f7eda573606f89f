#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "horizonlab/caps.hpp"
#include "horizonlab/desitter.hpp"
#include "horizonlab/propagators.hpp"

namespace hzl {

// Reproducible test sources: each is a sum of random bumps in the two caps and the belt.
std::vector<SourceFunction> state_sources(std::uint64_t seed, int count, const Numerics& num = {});
// P phi for the bump phi(theta) = exp(1 - 1/(1 - s^2)), s = (theta - center)/width.
SourceFunction p_exact_source(const ModeCoefficients& mc, double center, double width);

// Smooth cutoff in |v|: 1 for |v| <= 0.12, 0 for |v| >= 0.3.
void horizon_cutoff(double v, double& chi, double& dchi_dv, double& d2chi_dv2);

// Solution of P u = 0 with globe data (a+, a-) at horizon `side`, built as
// chi Psi minus an inverse applied to [P, chi] Psi, where Psi is the local
// solution with that branch content and the inverse is the one without
// singular content at that horizon.
GlobalSolution globe_poisson(const std::shared_ptr<const ModeSolver>& s, const AsymptoticData& a, int side);
// The same solution from the data of the homogeneous basis (2 x 2 solve).
GlobalSolution globe_poisson_direct(const std::shared_ptr<const ModeSolver>& s, const AsymptoticData& a, int side);

// Projection of a homogeneous solution onto homogeneous_basis (its belt
// coefficients at S+).
Eigen::Vector2cd basis_coordinates(const GlobalSolution& u);

// Diagonal of the symplectic form on branch data (a+, a-), up to the real
// factor alpha: (e^{pi sigma}, -e^{-pi sigma}) at S+ and the negative at S-,
// whose orientation is reversed.
Eigen::Vector2d symplectic_weights(cplx sigma, int side);

struct SymplecticNormalization {
    double alpha = 0.0;
    double alpha_imag = 0.0;        // imaginary part of the unconstrained fit
    double residual = 0.0;          // |A - alpha B| / |A|
    double literal_residual = 0.0;  // the same fit with weights (1, -1)
};
// Fits i <f_i, G f_j> = alpha sum_c w_c conj(a^c_i) a^c_j with the data of
// G f at horizon `side` and w = symplectic_weights. Throws FitDivergence
// above 1e-6.
SymplecticNormalization symplectic_alpha(const std::shared_ptr<const ModeSolver>& s,
                                         const std::vector<SourceFunction>& sources, int side);

// Cap constant kappa in i <f, G_cap g> = kappa conj(a+(G_cap f)) a+(G_cap g),
// fitted on the given cap sources; residual returned through `residual`.
double cap_symplectic_constant(SigmaParam sp, int k, const std::vector<SourceFunction>& cap_sources,
                               double* residual = nullptr);

struct TwoPointForm {
    CMatrix lplus, lminus;  // Lambda+ and Lambda- Gram matrices
    CMatrix ig;             // i <f_i, G f_j>
    double alpha = 0.0;
    int side = 1;
    int k = 0;
    cplx sigma = 0.0;
    bool swapped = false;   // Lambda+ carries the a- component (negative weight on a+)
    double ccr_residual() const;
    double hermiticity() const;
    double min_eig_plus() const;
    double min_eig_minus() const;
};

// Lambda+- from the data of G f at horizon `side`: the projectors are the
// positive and minus the negative part of alpha diag(symplectic_weights).
TwoPointForm two_point_build(const std::shared_ptr<const ModeSolver>& s, int side,
                             const std::vector<SourceFunction>& sources, double alpha);
// Two-point forms from already computed G f and data.
TwoPointForm two_point_from_data(const std::vector<SourceFunction>& sources, const std::vector<GlobalSolution>& gf,
                                 const std::vector<AsymptoticData>& data, double alpha, cplx sigma, int side);

// max |Lambda+-(f_i, P phi_j)| / max |Lambda+-| for P-exact sources.
double annihilation_residual(const std::shared_ptr<const ModeSolver>& s, int side, double alpha,
                             const std::vector<SourceFunction>& sources);

// Bosonic versus fermionic bookkeeping: residuals of Lambda+ - Lambda- = iG
// and Lambda+ + Lambda- = iG.
struct StatisticsCheck {
    double bosonic, fermionic;
    bool bosonic_matches;
};
StatisticsCheck signed_sum_check(const TwoPointForm& tp);

// Pointwise kernels of Lambda+- for one mode, K(theta, theta') = a conj(l(theta)) l(theta').
class TwoPointKernel {
public:
    TwoPointKernel(const std::shared_ptr<const ModeSolver>& s, int side, double alpha,
                   const std::vector<SourceFunction>& sources);
    // sign +1 for Lambda+, -1 for Lambda-.
    cplx operator()(int sign, double theta, double thetap) const;
    // Kernel of G: sum_a u_a(theta) conj(h_a(theta')).
    cplx g_kernel(double theta, double thetap) const;
    // Residual of the dual-basis fit from the sources.
    double fit_residual() const { return fit_residual_; }

private:
    std::array<GlobalSolution, 2> basis_;
    Eigen::Matrix2cd Nbar_;
    Eigen::Vector2cd Lp_, Lm_;
    double cp_ = 0.0, cm_ = 0.0;
    double fit_residual_ = 0.0;
    cplx ell(const Eigen::Vector2cd& L, double theta) const;
};

struct HadamardReport {
    std::vector<int> ks;
    std::vector<double> values;  // |K_k| per mode
    std::vector<double> slopes;  // successive d ln|K| / d ln k
    double final_slope = 0.0;
    double floor = 0.0;          // values at or below count as decayed
    bool pass = false;           // final slopes below -6 or under the floor
};
// Decay report from kernel magnitudes at k = 0..k_max.
HadamardReport hadamard_decay(const std::vector<double>& values, double floor = 0.0);

struct HadamardProxyResult {
    HadamardReport cap_plus, cap_minus, difference;
};
// Lambda+- kernels at cap-interior points and the side + minus side -
// difference at interior pairs across k = 0..k_max.
HadamardProxyResult hadamard_proxy(SigmaParam sp, int k_max, double alpha,
                                   const std::vector<std::array<double, 2>>& cap_pairs,
                                   const std::vector<std::array<double, 2>>& interior_pairs);

// Lambda+- on belt sources from belt objects only (belt G, belt data at S+,
// cap scattering matrix), compared with the global construction.
struct DsExplicitResult {
    CMatrix lplus, lminus, ig_belt;
    double agreement;   // vs global two-point forms, relative
    double ccr_residual;
    double min_eig_plus, min_eig_minus, hermiticity;
};
DsExplicitResult ds_two_point_explicit(const std::shared_ptr<const ModeSolver>& s, double alpha,
                                       const std::vector<SourceFunction>& belt_sources);

// Doubled cap: sources (f, 0) and (0, f) on two copies of the cap, mapped to
// global sources [P, Q] U(l1 a+(G_cap f1), l2 a+(G_cap f2)) with the copy-1
// data in the positive component of the symplectic form and |l|^2 |alpha w| = kappa.
struct DoubledCapResult {
    double kappa, kappa_residual;
    CMatrix lplus, lminus, ig_cap;  // ig_cap: i G_cap Gram on one copy
    double off_block;               // max off-block entry / diagonal-block norm
    double plus_block_error;        // Lambda+ copy-1 block vs i G_cap Gram
    double minus_block_error;       // Lambda- copy-2 block vs i G_cap Gram
    double difference_error;        // Lambda+ - Lambda- vs i (G_cap + -G_cap)
};
DoubledCapResult doubled_cap_theory(const std::shared_ptr<const ModeSolver>& s, double alpha,
                                    const std::vector<SourceFunction>& cap_sources);

}  // namespace hzl

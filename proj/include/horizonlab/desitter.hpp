#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "horizonlab/caps.hpp"
#include "horizonlab/propagators.hpp"
#include "horizonlab/quadrature.hpp"

namespace hzl {

// Belt coordinates: v = -1/cosh(2 tau), sinh tau = -cos(theta)/sqrt(|v|), so
// tau runs from -inf at S+ to +inf at S- and d theta/d tau = |v|. With
// u = |v|^{-beta} w the mode equation P u = f on the belt becomes
// (d_tau^2 + tanh tau d_tau + k^2/cosh^2 tau + sigma^2 + 1/4) w = v |v|^beta f.
double belt_tau(double theta);
double belt_x(double theta);
// Theta on the belt at distance x = sqrt(|v|) from horizon `which` (+1 for S+).
double belt_theta(double x, int which);
double belt_tau_of_x(double x, int which);

// Leading data (aplus, aminus) at both horizons.
struct BeltData {
    CapData plus, minus;
};

// Closed-form belt solutions y_mu = (cosh tau)^{-1/2} P^mu_{k-1/2}(tanh tau),
// mu = s i sigma, with s = +1 or -1.
class BeltModel {
public:
    // Throws DegeneracyError at sigma = 0 and GammaPole when a Gamma argument is at a pole.
    BeltModel(SigmaParam sp, int k);
    const SigmaParam& sp() const { return sp_; }
    int k() const { return k_; }
    // Value and tau-derivatives of y_{s i sigma}.
    Jet y(int s, double tau) const;
    // cosh(tau) (y_+ y_-' - y_+' y_-) = -(2i/pi) sinh(pi sigma).
    cplx wronskian() const { return Wc_; }
    // Columns: (aplus, aminus) of y_+ and y_- at horizon `which`.
    const Eigen::Matrix2cd& data_basis(int which) const { return which > 0 ? Dp_ : Dm_; }

private:
    SigmaParam sp_;
    int k_;
    cplx Wc_;
    Eigen::Matrix2cd Dp_, Dm_;
    cplx cA_[2], cB_[2];
    Jet y_forward(cplx mu, double tau) const;
};

// Region function on the belt: Duhamel terms plus c_+ y_+ + c_- y_-.
class BeltField {
public:
    BeltField() = default;
    BeltField(SigmaParam sp, int k);
    explicit BeltField(std::shared_ptr<const BeltModel> model);
    // Adds coef times the Duhamel solution of the belt equation with source
    // v |v|^beta f. Side +1 vanishes toward S+, side -1 toward S-.
    void add_duhamel(cplx coef, int side, const SourceFunction& f);
    void add_homogeneous(cplx c_plus, cplx c_minus);
    const BeltModel& model() const { return *model_; }
    std::shared_ptr<const BeltModel> model_ptr() const { return model_; }
    cplx w(double theta) const;
    cplx u(double theta) const;
    // w as a function of x near horizon `which`.
    std::function<cplx(double)> w_of_x(int which) const;
    // Coefficients of y_+, y_- between horizon `which` and the sources.
    std::pair<cplx, cplx> tail_coefficients(int which) const;
    // Data from the two-window asymptotic fit.
    CapData data(int which) const;
    // Data from the tail coefficients and the closed-form basis data.
    CapData data_exact(int which) const;
    // Global pairing <g, u> over the part of supp g in the belt.
    cplx pair(const SourceFunction& g) const;
    // max |P_belt w - g| / max |w| at the given theta, with analytic
    // tau-derivatives of the Duhamel representation.
    double ode_residual(const std::vector<double>& thetas) const;

private:
    struct Term {
        cplx coef;
        int side;
        SourceFunction f;
        CumulativeIntegral ip, im;  // integrals of y_+ and y_- against the source
    };
    std::shared_ptr<const BeltModel> model_;
    std::vector<Term> terms_;
    cplx cp_ = 0.0, cm_ = 0.0;
    Jet w_tau(double theta, double tau) const;
    cplx source_tau(double theta) const;
};

// Region-frame belt source v |v|^beta f at theta.
cplx belt_source(SigmaParam sp, const SourceFunction& f, double theta);

// Duhamel solve on the belt; side +1 vanishes toward S+, side -1 toward S-.
BeltField belt_propagator(SigmaParam sp, int k, int side, const SourceFunction& f);
// Data of a belt field at one horizon (two-window fit).
CapData belt_data_map(const BeltField& w, int which);
// Homogeneous belt solution with the given data at horizon `which`.
BeltField belt_poisson(SigmaParam sp, int k, const CapData& data, int which);
// Matrix taking data at S- to data at S+ along belt solutions.
Eigen::Matrix2cd ds_scattering(SigmaParam sp, int k);
// Inverse transport built numerically from Poisson solutions at S+ and fits at S-.
Eigen::Matrix2cd ds_scattering_reverse_numeric(SigmaParam sp, int k);

// Globe data (a+, a-) at S+ from belt data at S+, for solutions of the global
// mode equation.
Eigen::Matrix2cd rho_relation_matrix(SigmaParam sp, int k);

struct RhoRelationReport {
    double mismatch;          // max relative error of the relation on Sol(P)
    double literal_mismatch;  // the same with the row order of the original display
};
// Throws DegeneracyError for |sigma| < 1e-3, where the prefactor blows up.
RhoRelationReport rho_relation_check(SigmaParam sp, int k);

// Smooth step Q in theta: 0 on the S+ side of v = -0.4, 1 beyond v = -0.6
// (first half of the belt), with its first two derivatives.
void belt_step(double theta, double& q, double& dq, double& d2q);
// Source [P, Q] u for a global solution u.
SourceFunction commutator_source(const GlobalSolution& u, const ModeCoefficients& mc);
// max over a basis of Sol(P) of |G [P, Q] u - u| / |u| on the sample grid.
double time_slice_check(const std::shared_ptr<const ModeSolver>& s);

struct BeltIsomorphismReport {
    int rank;
    Eigen::VectorXd singular_values;
};
// Globe data at S+ of G f for `count` random belt sources.
BeltIsomorphismReport belt_isomorphism(const std::shared_ptr<const ModeSolver>& s, std::uint64_t seed,
                                       int count = 6);

// Max relative mismatch between the global inverses (advanced, retarded)
// restricted to the belt and the belt propagators, over the given belt sources.
double belt_conjugation_check(const std::shared_ptr<const ModeSolver>& s,
                              const std::vector<SourceFunction>& sources);

}  // namespace hzl

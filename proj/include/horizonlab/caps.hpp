#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "horizonlab/propagators.hpp"
#include "horizonlab/quadrature.hpp"

namespace hzl {

// Exact-model cap coordinates: v = x^2 = 1/cosh(2r), with r the hyperbolic
// distance from the nearer pole. On a cap, u = v^{-beta} w relates the global
// mode function u to the region function w, and P u = f becomes
// (d_r^2 + coth r d_r - k^2/sinh^2 r + sigma^2 + 1/4) w = v^{beta+1} f.
double cap_r(double theta);
double cap_x(double theta);
// Theta on cap `which` (+1 near theta = 0, -1 near theta = pi) for a given x.
double cap_theta(double x, int which);

// Leading asymptotic coefficients w ~ aplus x^{1/2 - i sigma} + aminus x^{1/2 + i sigma}.
struct CapData {
    cplx aplus = 0.0, aminus = 0.0;
};

// Least-squares fit of w(x) on [x0, x1] by x^{1/2 -+ i sigma}(c0 + c1 x^2 + c2 x^4).
CapData asymptotic_fit(const std::function<cplx(double)>& w_of_x, SigmaParam sp, double x0, double x1);
// Fit on x in [1e-3, 1e-2], cross-validated on [5e-4, 5e-3]; throws FitDivergence
// if the windows disagree by more than 1e-5 relative.
CapData cap_data_extract(const std::function<cplx(double)>& w_of_x, SigmaParam sp);

// Green's function of the cap mode operator from the regular Legendre solution
// w_reg = P^{-k}_nu(cosh r) and the outgoing one w_out = Q^k_nu(cosh r),
// nu = -1/2 - i sigma. w_out ~ x^{1/2 - i sigma}, which decays for Im sigma > 0.
class CapResolventMode {
public:
    // Throws GammaPole at the resolvent poles 1/2 + k - i sigma in -N.
    CapResolventMode(SigmaParam sp, int k);
    const SigmaParam& sp() const { return sp_; }
    int k() const { return k_; }
    cplx w_reg(double r) const;
    cplx w_reg_dr(double r) const;
    cplx w_out(double r) const;
    cplx w_out_dr(double r) const;
    // (z^2 - 1) times the z-Wronskian of (w_reg, w_out), a constant.
    cplx normalization() const { return C_; }
    // Kernel with respect to sinh r' dr'.
    cplx kernel(double r, double rp) const;
    // Closed-form leading data of w_reg.
    CapData regular_data() const;

private:
    SigmaParam sp_;
    int k_;
    cplx nu_;
    cplx C_;
};

// Region function on one cap: sum of resolvent applications to global
// sources plus a multiple of w_reg.
class CapField {
public:
    CapField() = default;
    CapField(int which, SigmaParam sp, int k);
    // Adds coef * R g with g = v^{beta+1} f restricted to this cap.
    void add_resolvent(cplx coef, std::shared_ptr<const CapResolventMode> R, const SourceFunction& f);
    void add_regular(cplx coef) { reg_coef_ += coef; }
    int which() const { return which_; }
    cplx w(double theta) const;
    cplx u(double theta) const;
    std::function<cplx(double)> w_of_x() const;
    CapData data() const { return cap_data_extract(w_of_x(), sp_); }
    // Global pairing <g, u> over the part of supp g in this cap.
    cplx pair(const SourceFunction& g) const;
    // max |P_cap w - g| / max |w| from spectral differentiation in r on [r0, r1].
    double ode_residual(double r0, double r1) const;

private:
    struct Term {
        cplx coef;
        std::shared_ptr<const CapResolventMode> R;
        SourceFunction f;
        CumulativeIntegral reg, out;
    };
    int which_ = 1;
    SigmaParam sp_{0.0};
    int k_ = 0;
    std::shared_ptr<const CapResolventMode> base_;
    std::vector<Term> terms_;
    cplx reg_coef_ = 0.0;
};

// Region-frame source g = v^{beta+1} f at theta on a cap.
cplx cap_source(SigmaParam sp, const SourceFunction& f, double theta);

// P_cap^{-1}(sigma) applied to the cap part of f.
CapField cap_resolvent_apply(SigmaParam sp, int k, const SourceFunction& f, int which);
// G_cap = P_cap^{-1}(sigma) - P_cap^{-1}(-sigma) applied to the cap part of f.
CapField cap_g_diff_apply(SigmaParam sp, int k, const SourceFunction& f, int which);
// Hyperbolic pairing of two global sources through G_cap: <f, G_cap g> in
// the global frame.
cplx cap_g_diff_pair(SigmaParam sp, int k, const SourceFunction& f, const SourceFunction& g, int which);

// S_k(sigma) = aminus/aplus of w_reg
//            = 2^{-i sigma} Gamma(-i sigma) Gamma(1/2+k+i sigma) / (Gamma(i sigma) Gamma(1/2+k-i sigma)).
cplx scattering_matrix_cap(SigmaParam sp, int k);

// Poles of the cap resolvents for sigma and -sigma, +-i(k + 1/2 + m), inside
// the rectangle spanned by the two corners.
std::vector<cplx> cap_pole_predictions(int k, cplx corner0, cplx corner1);

}  // namespace hzl

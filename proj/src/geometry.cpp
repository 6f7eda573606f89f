#include "horizonlab/geometry.hpp"

#include <cmath>

#include "horizonlab/errors.hpp"

namespace hzl {

std::string region_name(Region r) {
    switch (r) {
        case Region::CapPlus: return "CapPlus";
        case Region::Belt: return "Belt";
        case Region::CapMinus: return "CapMinus";
        case Region::HorizonPlus: return "HorizonPlus";
        case Region::HorizonMinus: return "HorizonMinus";
    }
    return "?";
}

double v_of_theta(double theta) {
    if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("theta outside [0, pi]");
    return std::cos(2.0 * theta);
}

Region region_of(double v, int hemisphere) {
    if (v < 0) return Region::Belt;
    if (v == 0) return hemisphere > 0 ? Region::HorizonPlus : Region::HorizonMinus;
    return hemisphere > 0 ? Region::CapPlus : Region::CapMinus;
}

Region region_of_theta(double theta) {
    if (theta == kThetaHorizonPlus) return Region::HorizonPlus;
    if (theta == kThetaHorizonMinus) return Region::HorizonMinus;
    if (theta < kThetaHorizonPlus) return Region::CapPlus;
    if (theta > kThetaHorizonMinus) return Region::CapMinus;
    return Region::Belt;
}

MetricProfile MetricProfile::exact() {
    MetricProfile p;
    p.c_ = {0.5, -0.5};
    p.exact_ = true;
    return p;
}

MetricProfile MetricProfile::polynomial(std::vector<double> coeffs) {
    MetricProfile p;
    p.c_ = std::move(coeffs);
    if (p.c_.empty()) throw ProfileError("empty profile polynomial");
    if (std::abs(p.f(1.0)) > 1e-12) throw ProfileError("profile must vanish at the poles, f(1) = 0");
    if (std::abs(p.fp(1.0) + 0.5) > 1e-12)
        throw ProfileError("profile must satisfy f'(1) = -1/2 for regular poles");
    for (int i = 0; i < 400; ++i) {
        double v = -1.0 + 2.0 * i / 400.0;
        if (!(p.f(v) > 0.0)) throw ProfileError("profile must be positive on [-1, 1)");
    }
    p.exact_ = (p.c_.size() == 2 && p.c_[0] == 0.5 && p.c_[1] == -0.5);
    return p;
}

double MetricProfile::f(double v) const {
    double s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * v + *it;
    return s;
}

double MetricProfile::fp(double v) const {
    double s = 0;
    for (std::size_t i = c_.size(); i-- > 1;) s = s * v + double(i) * c_[i];
    return s;
}

ModeCoefficients::ModeCoefficients(SigmaParam sp, int k, MetricProfile profile)
    : sp_(sp), k_(k), prof_(std::move(profile)) {}

cplx ModeCoefficients::c2(double v) const { return 4.0 * v * (1.0 - v * v); }

cplx ModeCoefficients::c1(double v) const {
    cplx p = sp_.p();
    double q = prof_.fp(v) / prof_.f(v);
    return 2.0 * (2.0 * p + 1.0) * (1.0 - v * v) - 4.0 * v * v + 2.0 * v * (1.0 - v * v) * q;
}

cplx ModeCoefficients::c0(double v) const {
    cplx p = sp_.p();
    double f = prof_.f(v), q = prof_.fp(v) / f;
    return -p * (p + 1.0) * v + p * (1.0 - v * v) * q - double(k_ * k_) / f;
}

void ModeCoefficients::theta_coeffs(double theta, double& a2, cplx& a1, cplx& a0) const {
    double v = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
    double f = prof_.f(v), q = prof_.fp(v) / f;
    cplx p = sp_.p();
    a2 = v;
    a1 = -s * ((2.0 * p + 1.0) + v * q);
    a0 = -p * (p + 1.0) * v + p * (1.0 - v * v) * q - double(k_ * k_) / f;
}

void ModeCoefficients::regional(double v, cplx& r2, cplx& r1, cplx& r0) const {
    double f = prof_.f(v), q = prof_.fp(v) / f;
    double A = 4.0 * v * v * (1.0 - v * v);
    double B = -4.0 * v * v * v + 2.0 * v * v * (1.0 - v * v) * q + 2.0 * v * (1.0 - v * v);
    double C = -double(k_ * k_) * v / f;
    cplx b = 0.5 * sp_.p();
    cplx s2 = sp_.sigma * sp_.sigma + 0.25;
    r2 = A / v;
    r1 = (B + 2.0 * A * b / v) / v;
    r0 = (C + B * b / v + A * b * (b - 1.0) / (v * v) + s2) / v;
}

void ModeCoefficients::horizon_series(double scale, std::size_t n, Series& A, Series& B,
                                      Series& C) const {
    cplx p = sp_.p();
    const double d = scale;
    Series F = ps_poly_shift(prof_.coeffs(), 0.0, d, n);
    std::vector<double> dc;
    for (std::size_t i = 1; i < prof_.coeffs().size(); ++i) dc.push_back(double(i) * prof_.coeffs()[i]);
    if (dc.empty()) dc.push_back(0.0);
    Series Fp = ps_poly_shift(dc, 0.0, d, n);
    Series q = ps_div(Fp, F, n), invf = ps_inv(F, n);
    Series V(n, 0.0), omv2(n, 0.0);
    if (n > 1) V[1] = d;
    omv2[0] = 1.0;
    if (n > 2) omv2[2] = -d * d;
    Series v2 = ps_mul(V, V, n);
    A = ps_scale(omv2, 4.0);
    Series t1 = ps_scale(omv2, 2.0 * (2.0 * p + 1.0));
    Series t3 = ps_scale(ps_mul(ps_mul(V, omv2, n), q, n), 2.0);
    B = ps_add(ps_add(t1, ps_scale(v2, -4.0)), t3);
    B.resize(n);
    Series c0 = ps_add(ps_add(ps_scale(V, -p * (p + 1.0)), ps_scale(ps_mul(omv2, q, n), p)),
                       ps_scale(invf, -double(k_ * k_)));
    C = ps_mul(V, c0, n);
}

void ModeCoefficients::pole_series(std::size_t n, Series& A, Series& B, Series& C) const {
    cplx p = sp_.p();
    Series Fs = ps_poly_shift(prof_.coeffs(), 1.0, -1.0, n + 1);
    Series G(n);
    for (std::size_t i = 0; i < n; ++i) G[i] = Fs[i + 1];
    Series Gt = ps_deriv(G);
    Gt.resize(n, 0.0);
    Series R = ps_div(Gt, G, n);
    Series T(n, 0.0);
    if (n > 1) T[1] = 1.0;
    // X = (1 - v^2) f'/f = (2 - t)(-1 - t R)
    Series inner = ps_scale(ps_mul(T, R, n), -1.0);
    inner[0] -= 1.0;
    Series X = ps_mul(Series{2.0, -1.0}, inner, n);
    Series omt{1.0, -1.0};
    Series c1 = ps_add(ps_add(ps_scale(ps_mul(T, Series{2.0, -1.0}, n), 2.0 * (2.0 * p + 1.0)),
                              ps_scale(ps_mul(omt, omt, n), -4.0)),
                       ps_scale(ps_mul(omt, X, n), 2.0));
    c1.resize(n, 0.0);
    A = Series(n, 0.0);
    A[0] = 8.0;
    if (n > 1) A[1] = -12.0;
    if (n > 2) A[2] = 4.0;
    B = ps_scale(c1, -1.0);
    Series Ct = ps_add(ps_add(ps_scale(ps_mul(omt, T, n), -p * (p + 1.0)), ps_scale(ps_mul(T, X, n), p)),
                       ps_scale(ps_inv(G, n), -double(k_ * k_)));
    Ct.resize(n, 0.0);
    C = Ct;
}

ModeCoefficients mode_coefficients(SigmaParam sp, int k, const MetricProfile& profile) {
    ModeCoefficients mc(sp, k, profile);
    for (int side : {1, -1}) {
        for (int i = 0; i < 24; ++i) {
            double v = side * (0.01 + 0.19 * i / 23.0);
            cplx r2, r1, r0;
            mc.regional(v, r2, r1, r0);
            cplx e2 = mc.c2(v), e1 = mc.c1(v), e0 = mc.c0(v);
            double scale = 1.0 + std::abs(e1) + std::abs(e0);
            double dev = std::max({std::abs(r2 - e2), std::abs(r1 - e1), std::abs(r0 - e0)}) / scale;
            if (dev > 1e-10)
                throw SmoothnessMismatch("regional coefficients disagree with the smooth extension at v = " +
                                         std::to_string(v));
        }
    }
    return mc;
}

}  // namespace hzl

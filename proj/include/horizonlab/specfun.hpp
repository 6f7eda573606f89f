#pragma once

#include <complex>

namespace hzl {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Principal branch of log Gamma (cut along the negative real axis).
cplx gamma_ln(cplx z);
cplx gamma_fn(cplx z);
// 1/Gamma, exactly zero at the poles of Gamma.
cplx rgamma(cplx z);

// Gauss hypergeometric function, analytically continued off [1, inf).
cplx hyp2f1(cplx a, cplx b, cplx c, cplx z);
// F(a,b;c;z)/Gamma(c); finite for every c.
cplx hyp2f1_regularized(cplx a, cplx b, cplx c, cplx z);

// Associated Legendre functions of type 3 on (1, inf).
cplx legendre_q(cplx nu, int mu, double x);
cplx legendre_p(cplx nu, int mu, double x);
// x-derivatives from the degree-raising recurrence.
cplx legendre_q_deriv(cplx nu, int mu, double x);
cplx legendre_p_deriv(cplx nu, int mu, double x);

// Ferrers function of the first kind on (-1, 1), complex order.
cplx ferrers_p(cplx nu, cplx mu, double x);

}  // namespace hzl

#pragma once

#include <vector>

#include "horizonlab/specfun.hpp"

namespace hzl {

// Truncated power series: coefficient n multiplies t^n.
using Series = std::vector<cplx>;

Series ps_mul(const Series& a, const Series& b, std::size_t n);
Series ps_inv(const Series& a, std::size_t n);
Series ps_div(const Series& a, const Series& b, std::size_t n);
Series ps_deriv(const Series& a);
Series ps_add(const Series& a, const Series& b);
Series ps_scale(const Series& a, cplx c);
// Coefficients of p(c + s t) for a polynomial p given by monomial coefficients.
Series ps_poly_shift(const std::vector<double>& p, double c, double s, std::size_t n);
cplx ps_eval(const Series& a, cplx t);
cplx ps_eval_deriv(const Series& a, cplx t);

// Solution of t^2 A u'' + t B u' + C u = R as t^s * sum u_n t^n.
struct FrobeniusSolution {
    cplx exponent;
    Series coeffs;  // u_0 .. u_J
    double radius;  // estimated convergence radius in t
};

// Homogeneous solution with u_0 = 1 when R is empty; otherwise the particular
// solution with u_0 = 0 (requires R_0 = 0 and I(s) = 0).
FrobeniusSolution frobenius_solve(const Series& A, const Series& B, const Series& C, cplx s,
                                  std::size_t J, const Series& R = {});

}  // namespace hzl

#include "horizonlab/series.hpp"

#include <cmath>

#include "horizonlab/errors.hpp"

namespace hzl {

namespace {
cplx at(const Series& a, std::size_t i) { return i < a.size() ? a[i] : cplx(0.0); }
}  // namespace

Series ps_mul(const Series& a, const Series& b, std::size_t n) {
    Series c(n, 0.0);
    for (std::size_t i = 0; i < std::min(n, a.size()); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j < n && j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

Series ps_inv(const Series& a, std::size_t n) {
    if (a.empty() || std::abs(a[0]) < 1e-300) throw NumericalError("ps_inv: zero constant term");
    Series b(n, 0.0);
    b[0] = 1.0 / a[0];
    for (std::size_t k = 1; k < n; ++k) {
        cplx s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += at(a, j) * b[k - j];
        b[k] = -s / a[0];
    }
    return b;
}

Series ps_div(const Series& a, const Series& b, std::size_t n) { return ps_mul(a, ps_inv(b, n), n); }

Series ps_deriv(const Series& a) {
    if (a.size() <= 1) return Series(1, 0.0);
    Series d(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = double(i) * a[i];
    return d;
}

Series ps_add(const Series& a, const Series& b) {
    Series c(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = at(a, i) + at(b, i);
    return c;
}

Series ps_scale(const Series& a, cplx c) {
    Series r(a);
    for (auto& x : r) x *= c;
    return r;
}

Series ps_poly_shift(const std::vector<double>& p, double c, double s, std::size_t n) {
    // Horner in series arithmetic: q(t) = (...(p_m (c+st) + p_{m-1})(c+st) + ...).
    Series q(n, 0.0), lin(n, 0.0);
    lin[0] = c;
    if (n > 1) lin[1] = s;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        q = ps_mul(q, lin, n);
        q[0] += *it;
    }
    return q;
}

cplx ps_eval(const Series& a, cplx t) {
    cplx s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * t + *it;
    return s;
}

cplx ps_eval_deriv(const Series& a, cplx t) {
    cplx s = 0.0;
    for (std::size_t i = a.size(); i-- > 1;) s = s * t + double(i) * a[i];
    return s;
}

FrobeniusSolution frobenius_solve(const Series& A, const Series& B, const Series& C, cplx s,
                                  std::size_t J, const Series& R) {
    const bool particular = !R.empty();
    auto indicial = [&](cplx x) { return at(A, 0) * x * (x - 1.0) + at(B, 0) * x + at(C, 0); };
    Series u(J + 1, 0.0);
    if (particular) {
        if (std::abs(at(R, 0)) > 1e-14 * (1.0 + std::abs(at(R, 1))))
            throw RecurrenceBreakdown("particular series needs a vanishing constant forcing term");
        u[0] = 0.0;
    } else {
        u[0] = 1.0;
    }
    for (std::size_t j = 1; j <= J; ++j) {
        cplx rhs = particular ? at(R, j) : cplx(0.0);
        for (std::size_t m = 1; m <= j; ++m) {
            std::size_t n = j - m;
            if (u[n] == 0.0) continue;
            cplx x = double(n) + s;
            rhs -= (at(A, m) * x * (x - 1.0) + at(B, m) * x + at(C, m)) * u[n];
        }
        cplx den = indicial(s + double(j));
        if (std::abs(den) < 1e-12) throw RecurrenceBreakdown("indicial polynomial vanishes in recurrence");
        u[j] = rhs / den;
    }
    // Root test on the upper half of the coefficients.
    double rad = std::numeric_limits<double>::infinity();
    for (std::size_t j = J / 2; j <= J; ++j) {
        if (j == 0 || std::abs(u[j]) == 0.0) continue;
        rad = std::min(rad, std::pow(std::abs(u[j]), -1.0 / double(j)));
    }
    return {s, u, rad};
}

}  // namespace hzl

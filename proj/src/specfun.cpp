#include "horizonlab/specfun.hpp"

#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx checked(cplx z, const char* where) {
    if (!finite(z)) throw NumericalError(std::string(where) + " produced a non-finite value");
    return z;
}

bool near_nonpos_int(cplx z, double tol) {
    if (std::abs(z.imag()) > tol) return false;
    double r = z.real();
    if (r > tol) return false;
    return std::abs(r - std::round(r)) <= tol;
}

bool near_int(cplx z, double tol) {
    return std::abs(z.imag()) <= tol && std::abs(z.real() - std::round(z.real())) <= tol;
}

// Lanczos g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos_ln(cplx z) {
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
    cplx t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Gauss series, only called where it converges quickly or terminates.
cplx series(cplx a, cplx b, cplx c, cplx z) {
    cplx term = 1.0, sum = 1.0;
    int small = 0;
    for (int n = 0; n < 20000; ++n) {
        term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            if (++small >= 2) return sum;
        } else {
            small = 0;
        }
    }
    throw NumericalError("hyp2f1 series did not converge");
}

// Product of Gammas over product of Gammas; `ok` is false when a numerator
// Gamma sits on a pole (the transformation is unusable there).
cplx gratio(std::initializer_list<cplx> num, std::initializer_list<cplx> den, bool& ok) {
    cplx s = 0.0;
    ok = true;
    for (cplx z : num) {
        if (near_nonpos_int(z, 1e-12)) {
            ok = false;
            return 0.0;
        }
        s += gamma_ln(z);
    }
    for (cplx z : den) {
        if (near_nonpos_int(z, 1e-12)) return 0.0;
        s -= gamma_ln(z);
    }
    return std::exp(s);
}

// Taylor continuation of the hypergeometric ODE along the ray from 0.5 z/|z|.
cplx ode_continuation(cplx a, cplx b, cplx c, cplx z) {
    cplx z0 = 0.5 * z / std::abs(z);
    cplx y = series(a, b, c, z0);
    cplx dy = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, z0);
    cplx zeta = z0;
    for (int step = 0; step < 10000; ++step) {
        cplx rem = z - zeta;
        if (std::abs(rem) == 0.0) return y;
        double R = std::min(std::abs(zeta), std::abs(1.0 - zeta));
        cplx h = rem;
        if (std::abs(h) > 0.5 * R) h = rem / std::abs(rem) * (0.5 * R);
        cplx A0 = zeta * (1.0 - zeta), A1 = 1.0 - 2.0 * zeta, A2 = -1.0;
        cplx B0 = c - (a + b + 1.0) * zeta, B1 = -(a + b + 1.0), p0 = -a * b;
        cplx yn = y, yn1 = dy;  // y_0, y_1
        cplx val = yn + yn1 * h, der = yn1;
        cplx hp = h;  // h^{n+1} at the top of the loop
        int small = 0;
        for (int n = 0; n < 400; ++n) {
            double dn = n;
            cplx yn2 = -((A1 * dn * (dn + 1.0) + B0 * (dn + 1.0)) * yn1 +
                         (A2 * dn * (dn - 1.0) + B1 * dn + p0) * yn) /
                       (A0 * (dn + 1.0) * (dn + 2.0));
            cplx dterm = yn2 * (dn + 2.0) * hp;
            hp *= h;
            cplx vterm = yn2 * hp;
            val += vterm;
            der += dterm;
            yn = yn1;
            yn1 = yn2;
            if (std::abs(vterm) <= 1e-18 * std::abs(val) && std::abs(dterm) <= 1e-18 * std::abs(der)) {
                if (++small >= 3) break;
            } else {
                small = 0;
            }
        }
        y = val;
        dy = der;
        zeta += h;
        if (std::abs(z - zeta) <= 1e-15 * std::abs(z)) return y;
    }
    throw NumericalError("hyp2f1 continuation did not reach target");
}

}  // namespace

cplx gamma_ln(cplx z) {
    if (!finite(z)) throw NumericalError("gamma_ln argument not finite");
    if (near_nonpos_int(z, 1e-14)) throw PoleOfGamma("gamma_ln at non-positive integer");
    if (z.real() >= 0.5) return checked(lanczos_ln(z), "gamma_ln");
    // Shift right with principal logs; keeps the cut on the negative axis.
    int n = int(std::ceil(0.5 - z.real()));
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::log(z + double(j));
    return checked(lanczos_ln(z + double(n)) - acc, "gamma_ln");
}

cplx gamma_fn(cplx z) { return std::exp(gamma_ln(z)); }

cplx rgamma(cplx z) {
    if (near_nonpos_int(z, 1e-14)) return 0.0;
    return std::exp(-gamma_ln(z));
}

cplx hyp2f1(cplx a, cplx b, cplx c, cplx z) {
    if (!finite(a) || !finite(b) || !finite(c) || !finite(z))
        throw NumericalError("hyp2f1 argument not finite");
    if (near_nonpos_int(c, 1e-14)) throw ParameterPole("hyp2f1 with c a non-positive integer");
    if (z == 0.0) return 1.0;
    if (z.imag() == 0.0 && z.real() >= 1.0) throw CutEvaluation("hyp2f1 on the cut [1, inf)");
    const double kR = 0.6;
    if (near_nonpos_int(a, 1e-14) || near_nonpos_int(b, 1e-14)) {
        return checked(series(a, b, c, z), "hyp2f1");  // polynomial
    }
    if (std::abs(z) <= kR) return checked(series(a, b, c, z), "hyp2f1");
    cplx w = z / (z - 1.0);
    if (std::abs(w) <= kR)
        return checked(std::pow(1.0 - z, -a) * series(a, c - b, c, w), "hyp2f1");
    const double kDeg = 1e-6;
    bool ok1 = true, ok2 = true;
    if (std::abs(1.0 - z) <= kR && !near_int(c - a - b, kDeg)) {
        cplx g1 = gratio({c, c - a - b}, {c - a, c - b}, ok1);
        cplx g2 = gratio({c, a + b - c}, {a, b}, ok2);
        if (ok1 && ok2) {
            cplx r = g1 * series(a, b, a + b - c + 1.0, 1.0 - z);
            r += std::pow(1.0 - z, c - a - b) * g2 * series(c - a, c - b, c - a - b + 1.0, 1.0 - z);
            return checked(r, "hyp2f1");
        }
    }
    if (!near_int(a - b, kDeg)) {
        if (std::abs(1.0 / z) <= kR) {
            cplx g1 = gratio({c, b - a}, {b, c - a}, ok1);
            cplx g2 = gratio({c, a - b}, {a, c - b}, ok2);
            if (ok1 && ok2) {
                cplx r = g1 * std::pow(-z, -a) * series(a, a - c + 1.0, a - b + 1.0, 1.0 / z);
                r += g2 * std::pow(-z, -b) * series(b, b - c + 1.0, b - a + 1.0, 1.0 / z);
                return checked(r, "hyp2f1");
            }
        }
        if (std::abs(1.0 / (1.0 - z)) <= kR) {
            cplx g1 = gratio({c, b - a}, {b, c - a}, ok1);
            cplx g2 = gratio({c, a - b}, {a, c - b}, ok2);
            if (ok1 && ok2) {
                cplx u = 1.0 / (1.0 - z);
                cplx r = g1 * std::pow(1.0 - z, -a) * series(a, c - b, a - b + 1.0, u);
                r += g2 * std::pow(1.0 - z, -b) * series(b, c - a, b - a + 1.0, u);
                return checked(r, "hyp2f1");
            }
        }
    }
    return checked(ode_continuation(a, b, c, z), "hyp2f1");
}

cplx hyp2f1_regularized(cplx a, cplx b, cplx c, cplx z) {
    if (near_nonpos_int(c, 1e-14)) {
        int n = int(std::lround(-c.real()));
        cplx pa = 1.0, pb = 1.0;
        double fact = 1.0;
        for (int j = 0; j <= n; ++j) {
            pa *= a + double(j);
            pb *= b + double(j);
            fact *= double(j + 1);
        }
        return pa * pb / fact * std::pow(z, n + 1) *
               hyp2f1(a + double(n + 1), b + double(n + 1), double(n + 2), z);
    }
    return hyp2f1(a, b, c, z) * rgamma(c);
}

cplx legendre_q(cplx nu, int mu, double x) {
    if (!(x > 1.0)) throw DomainError("legendre_q requires x > 1");
    cplx s = nu + double(mu) + 1.0;
    if (near_nonpos_int(s, 1e-12)) throw DegeneracyError("legendre_q: Gamma(nu+mu+1) at a pole");
    cplx lpref = gamma_ln(s) - (nu + 1.0) * std::log(2.0) - s * std::log(x) +
                 0.5 * double(mu) * std::log(x * x - 1.0);
    cplx phase = (mu % 2 == 0) ? 1.0 : -1.0;
    cplx F = hyp2f1_regularized(0.5 * (nu + double(mu)) + 1.0, 0.5 * (nu + double(mu) + 1.0),
                                nu + 1.5, 1.0 / (x * x));
    return checked(phase * std::sqrt(kPi) * std::exp(lpref) * F, "legendre_q");
}

cplx legendre_p(cplx nu, int mu, double x) {
    if (!(x > 1.0)) throw DomainError("legendre_p requires x > 1");
    double pref = std::pow((x + 1.0) / (x - 1.0), 0.5 * double(mu));
    cplx F = hyp2f1_regularized(nu + 1.0, -nu, 1.0 - double(mu), 0.5 * (1.0 - x));
    return checked(pref * F, "legendre_p");
}

cplx legendre_q_deriv(cplx nu, int mu, double x) {
    cplx w1 = legendre_q(nu + 1.0, mu, x), w0 = legendre_q(nu, mu, x);
    return ((nu - double(mu) + 1.0) * w1 - (nu + 1.0) * x * w0) / (x * x - 1.0);
}

cplx legendre_p_deriv(cplx nu, int mu, double x) {
    cplx w1 = legendre_p(nu + 1.0, mu, x), w0 = legendre_p(nu, mu, x);
    return ((nu - double(mu) + 1.0) * w1 - (nu + 1.0) * x * w0) / (x * x - 1.0);
}

cplx ferrers_p(cplx nu, cplx mu, double x) {
    if (!(x > -1.0 && x < 1.0)) throw DomainError("ferrers_p requires -1 < x < 1");
    cplx pref = std::exp(0.5 * mu * std::log((1.0 + x) / (1.0 - x)));
    return checked(pref * hyp2f1_regularized(nu + 1.0, -nu, 1.0 - mu, 0.5 * (1.0 - x)), "ferrers_p");
}

}  // namespace hzl

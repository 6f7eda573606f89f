#include "horizonlab/minkowski.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <unsupported/Eigen/FFT>

#include "horizonlab/chebyshev.hpp"
#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

constexpr int kNodes = 20;

// Gauss-Legendre 20 nodes on [-1, 1] with barycentric weights.
struct RefRule {
    double x[kNodes], w[kNodes], bary[kNodes];
    RefRule() {
        const auto& gl = gauss_legendre(kNodes);
        for (int i = 0; i < kNodes; ++i) {
            x[i] = gl[i].first;
            w[i] = gl[i].second;
        }
        for (int i = 0; i < kNodes; ++i) {
            double p = 1.0;
            for (int j = 0; j < kNodes; ++j)
                if (j != i) p *= x[i] - x[j];
            bary[i] = 1.0 / p;
        }
    }
    // Lagrange basis values at u.
    void lagrange(double u, double* l) const {
        double den = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            double d = u - x[i];
            if (d == 0.0) {
                for (int j = 0; j < kNodes; ++j) l[j] = i == j ? 1.0 : 0.0;
                return;
            }
            l[i] = bary[i] / d;
            den += l[i];
        }
        for (int i = 0; i < kNodes; ++i) l[i] /= den;
    }
};

const RefRule& ref_rule() {
    static const RefRule r;
    return r;
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

cplx gaussian_term_value(const GaussianTerm& g, double t, double x) {
    const double dt = t - g.tc, dx = x - g.xc, w2 = g.width * g.width;
    const double e = std::exp(-(dt * dt + dx * dx) / w2);
    double p = 1.0;
    if (g.order == 1) p = -2.0 * dt / w2;
    else if (g.order == 2) p = 4.0 * dt * dt / (w2 * w2) - 2.0 / w2;
    return g.amp * p * e;
}

SpacetimeSource gaussian_source(const std::vector<GaussianTerm>& terms) {
    if (terms.empty()) throw SourceError("gaussian_source: no terms");
    SpacetimeSource s;
    s.t0 = s.x0 = 1e300;
    s.t1 = s.x1 = -1e300;
    for (const GaussianTerm& g : terms) {
        if (g.order < 0 || g.order > 2 || !(g.width > 0.0)) throw SourceError("gaussian_source: bad term");
        const double r = 6.5 * g.width;
        s.t0 = std::min(s.t0, g.tc - r);
        s.t1 = std::max(s.t1, g.tc + r);
        s.x0 = std::min(s.x0, g.xc - r);
        s.x1 = std::max(s.x1, g.xc + r);
    }
    s.f = [terms](double t, double x) {
        cplx v = 0.0;
        for (const GaussianTerm& g : terms) v += gaussian_term_value(g, t, x);
        return v;
    };
    return s;
}

std::vector<SpacetimeSource> random_minkowski_sources(std::uint64_t seed, int count, int min_order) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<SpacetimeSource> out;
    for (int s = 0; s < count; ++s) {
        std::vector<GaussianTerm> terms;
        for (int j = 0; j < 3; ++j) {
            GaussianTerm g;
            g.amp = cplx(2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0);
            g.tc = -2.0 + 4.0 * U(rng);
            g.xc = -2.0 + 4.0 * U(rng);
            g.width = 0.45 + 0.25 * U(rng);
            g.order = std::min(2, min_order + int(U(rng) * (3 - min_order)));
            terms.push_back(g);
        }
        out.push_back(gaussian_source(terms));
    }
    return out;
}

double retarded_kernel(double t, double x) { return t >= std::abs(x) ? 0.5 : 0.0; }
double advanced_kernel(double t, double x) { return -t >= std::abs(x) ? 0.5 : 0.0; }
double commutator_kernel(double t, double x) { return retarded_kernel(t, x) - advanced_kernel(t, x); }

cplx feynman_kernel(double t, double x, double c_F) {
    const double s2 = t * t - x * x;
    // log(-s2 + i0) = log|s2| + i pi for timelike separations.
    const cplx lg = s2 > 0.0 ? cplx(std::log(s2), kPi) : cplx(std::log(-s2), 0.0);
    return kI * (-lg / (4.0 * kPi) + c_F);
}

// ---- NullQuadrature ----

int NullQuadrature::Axis::locate(double s) const {
    int p = int(std::floor((s - a) / h));
    return std::clamp(p, 0, panels - 1);
}

void NullQuadrature::Axis::partial(int p, double s, double* c) const {
    const RefRule& R = ref_rule();
    const double pa = a + p * h;
    const double u = std::clamp(2.0 * (s - pa) / h - 1.0, -1.0, 1.0);
    const double half = 0.5 * (u + 1.0);
    std::fill(c, c + kNodes, 0.0);
    double l[kNodes];
    for (int k = 0; k < kNodes; ++k) {
        const double y = -1.0 + half * (R.x[k] + 1.0);
        R.lagrange(y, l);
        const double wk = R.w[k] * half * 0.5 * h;
        for (int i = 0; i < kNodes; ++i) c[i] += wk * l[i];
    }
}

void NullQuadrature::Axis::lagrange(int p, double s, double* l) const {
    const double pa = a + p * h;
    ref_rule().lagrange(2.0 * (s - pa) / h - 1.0, l);
}

NullQuadrature::NullQuadrature(const SpacetimeSource& f, const MinkowskiNumerics& num) {
    if (!(f.t1 > f.t0) || !(f.x1 > f.x0)) throw SourceError("empty support box");
    const RefRule& R = ref_rule();
    const double lo[2] = {f.t0 - f.x1, f.t0 + f.x0}, hi[2] = {f.t1 - f.x0, f.t1 + f.x1};
    for (int k = 0; k < 2; ++k) {
        Axis& A = ax_[k];
        A.a = lo[k];
        A.b = hi[k];
        A.panels = std::max(1, int(std::ceil((A.b - A.a) / num.panel_width)));
        A.h = (A.b - A.a) / A.panels;
        for (int p = 0; p < A.panels; ++p)
            for (int i = 0; i < kNodes; ++i) {
                A.nodes.push_back(A.a + p * A.h + 0.5 * A.h * (R.x[i] + 1.0));
                A.weights.push_back(0.5 * A.h * R.w[i]);
            }
    }
    // Edge check: the source must be negligible on its box boundary.
    double edge = 0.0, inner = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double a = double(i) / 200.0;
        const double t = f.t0 + a * (f.t1 - f.t0), x = f.x0 + a * (f.x1 - f.x0);
        edge = std::max({edge, std::abs(f(t, f.x0)), std::abs(f(t, f.x1)), std::abs(f(f.t0, x)), std::abs(f(f.t1, x))});
    }
    const int N0 = int(ax_[0].nodes.size()), N1 = int(ax_[1].nodes.size());
    F_.resize(N0, N1);
    for (int i = 0; i < N0; ++i)
        for (int j = 0; j < N1; ++j) {
            const double xi = ax_[0].nodes[i], eta = ax_[1].nodes[j];
            const double t = 0.5 * (xi + eta), x = 0.5 * (eta - xi);
            F_(i, j) = (t < f.t0 || t > f.t1 || x < f.x0 || x > f.x1) ? cplx(0.0) : f(t, x);
            inner = std::max(inner, std::abs(F_(i, j)));
        }
    if (inner == 0.0) throw SourceError("source vanishes on its box");
    if (edge > 1e-12 * inner) throw SourceError("source not supported in the interior of its box");

    const int P = ax_[0].panels, Q = ax_[1].panels;
    row_prefix_ = Eigen::MatrixXcd::Zero(N0, Q + 1);
    col_prefix_ = Eigen::MatrixXcd::Zero(N1, P + 1);
    for (int i = 0; i < N0; ++i)
        for (int q = 0; q < Q; ++q) {
            cplx s = 0.0;
            for (int j = q * kNodes; j < (q + 1) * kNodes; ++j) s += ax_[1].weights[j] * F_(i, j);
            row_prefix_(i, q + 1) = row_prefix_(i, q) + s;
        }
    for (int j = 0; j < N1; ++j)
        for (int p = 0; p < P; ++p) {
            cplx s = 0.0;
            for (int i = p * kNodes; i < (p + 1) * kNodes; ++i) s += ax_[0].weights[i] * F_(i, j);
            col_prefix_(j, p + 1) = col_prefix_(j, p) + s;
        }
    panel_prefix_ = Eigen::MatrixXcd::Zero(P + 1, Q + 1);
    for (int p = 0; p < P; ++p)
        for (int q = 0; q <= Q; ++q) {
            cplx s = 0.0;
            for (int i = p * kNodes; i < (p + 1) * kNodes; ++i) s += ax_[0].weights[i] * row_prefix_(i, q);
            panel_prefix_(p + 1, q) = panel_prefix_(p, q) + s;
        }
    total_ = panel_prefix_(P, Q);
    phi_[0] = row_prefix_.col(Q);
    phi_[1] = col_prefix_.col(P);

    // Resolution estimate from the Legendre tails of the marginals on each panel.
    double tail = 0.0, scale = 0.0;
    for (int k = 0; k < 2; ++k) {
        const Axis& A = ax_[k];
        for (int p = 0; p < A.panels; ++p) {
            double c[kNodes];
            for (int m = 0; m < kNodes; ++m) {
                cplx s = 0.0;
                for (int i = 0; i < kNodes; ++i) s += R.w[i] * std::legendre(m, R.x[i]) * phi_[k][p * kNodes + i];
                c[m] = std::abs(0.5 * (2 * m + 1) * s);
            }
            tail = std::max(tail, c[kNodes - 1] + c[kNodes - 2]);
        }
        for (int i = 0; i < phi_[k].size(); ++i) scale = std::max(scale, std::abs(phi_[k][i]));
    }
    if (tail > num.tolerance * scale)
        throw GridTooCoarse("panel width " + std::to_string(num.panel_width) + " leaves Legendre tail " +
                            std::to_string(tail / scale));

    for (int i = 0; i < N0; ++i)
        for (int j = 0; j < N1; ++j)
            if (std::abs(F_(i, j)) > 1e-16 * inner) {
                const double xi = ax_[0].nodes[i], eta = ax_[1].nodes[j];
                src_nodes_.push_back({0.5 * (xi + eta), 0.5 * (eta - xi)});
                src_weighted_.push_back(0.5 * ax_[0].weights[i] * ax_[1].weights[j] * std::conj(F_(i, j)));
            }
}

NullQuadrature::Functional NullQuadrature::functional(int axis, int mode, double s, bool value) const {
    const Axis& A = ax_[axis];
    Functional fn;
    if (value) {
        if (s < A.a || s > A.b) return fn;
        fn.part = A.locate(s);
        A.lagrange(fn.part, s, fn.c);
        return fn;
    }
    if (mode == 0 || s >= A.b) {
        fn.full = A.panels;
        return fn;
    }
    if (s <= A.a) return fn;
    fn.part = A.locate(s);
    fn.full = fn.part;
    A.partial(fn.part, s, fn.c);
    return fn;
}

cplx NullQuadrature::apply(const Functional& fa, const Functional& fb) const {
    cplx r = panel_prefix_(fa.full, fb.full);
    if (fa.part >= 0) {
        const int i0 = fa.part * kNodes;
        for (int i = 0; i < kNodes; ++i) r += fa.c[i] * row_prefix_(i0 + i, fb.full);
    }
    if (fb.part >= 0) {
        const int j0 = fb.part * kNodes;
        for (int j = 0; j < kNodes; ++j) r += fb.c[j] * col_prefix_(j0 + j, fa.full);
    }
    if (fa.part >= 0 && fb.part >= 0) {
        const int i0 = fa.part * kNodes, j0 = fb.part * kNodes;
        for (int i = 0; i < kNodes; ++i) {
            cplx s = 0.0;
            for (int j = 0; j < kNodes; ++j) s += fb.c[j] * F_(i0 + i, j0 + j);
            r += fa.c[i] * s;
        }
    }
    return r;
}

cplx NullQuadrature::quadrant(int ma, double xi, int mb, double eta) const {
    if (ma < 0) return quadrant(0, xi, mb, eta) - quadrant(1, xi, mb, eta);
    if (mb < 0) return quadrant(ma, xi, 0, eta) - quadrant(ma, xi, 1, eta);
    return apply(functional(0, ma, xi, false), functional(1, mb, eta, false));
}

std::pair<cplx, cplx> NullQuadrature::cones(double xi, double eta) const {
    const Functional a1 = functional(0, 1, xi, false), a0 = functional(0, 0, xi, false);
    const Functional b1 = functional(1, 1, eta, false), b0 = functional(1, 0, eta, false);
    const cplx past = apply(a1, b1);
    return {past, apply(a0, b0) - apply(a0, b1) - apply(a1, b0) + past};
}

cplx NullQuadrature::line_xi(double xi, int mb, double eta) const {
    if (mb < 0) return line_xi(xi, 0, eta) - line_xi(xi, 1, eta);
    return apply(functional(0, 0, xi, true), functional(1, mb, eta, false));
}

cplx NullQuadrature::line_eta(int ma, double xi, double eta) const {
    if (ma < 0) return line_eta(0, xi, eta) - line_eta(1, xi, eta);
    return apply(functional(0, ma, xi, false), functional(1, 0, eta, true));
}

cplx NullQuadrature::log_marginal(int axis, double s) const {
    const Axis& A = ax_[axis];
    const Eigen::VectorXcd& phi = phi_[axis];
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    cplx r = 0.0;
    for (int p = 0; p < A.panels; ++p) {
        const double pa = A.a + p * A.h, pb = pa + A.h;
        const int i0 = p * kNodes;
        if (s < pa - 0.5 * A.h || s > pb + 0.5 * A.h) {
            for (int i = 0; i < kNodes; ++i) r += A.weights[i0 + i] * std::log(std::abs(s - A.nodes[i0 + i])) * phi[i0 + i];
            continue;
        }
        // Near panel: interpolant times log, split at the singularity.
        auto piece = [&](double lo, double hi) -> cplx {
            if (hi - lo <= 0.0) return 0.0;
            double re = 0.0, im = 0.0;
            for (int part = 0; part < 2; ++part) {
                auto g = [&](double y) {
                    double l[kNodes];
                    A.lagrange(p, y, l);
                    cplx v = 0.0;
                    for (int i = 0; i < kNodes; ++i) v += l[i] * phi[i0 + i];
                    const double d = std::abs(s - y);
                    return d > 0.0 ? std::log(d) * (part == 0 ? v.real() : v.imag()) : 0.0;
                };
                (part == 0 ? re : im) = ts.integrate(g, lo, hi);
            }
            return {re, im};
        };
        if (s > pa && s < pb) r += piece(pa, s) + piece(s, pb);
        else r += piece(pa, pb);
    }
    return r;
}

cplx NullQuadrature::pair(const std::function<cplx(double, double)>& u) const {
    cplx r = 0.0;
    for (std::size_t k = 0; k < src_nodes_.size(); ++k) r += src_weighted_[k] * u(src_nodes_[k].first, src_nodes_[k].second);
    return r;
}

// ---- fields ----

cplx MinkowskiField::operator()(double t, double x) const {
    const double xi = t - x, eta = t + x;
    const NullQuadrature& q = *q_;
    if (kind_ == PropagatorKind::Retarded) return 0.25 * q.quadrant(1, xi, 1, eta);
    auto [past, future] = q.cones(xi, eta);
    switch (kind_) {
        case PropagatorKind::Retarded: break;
        case PropagatorKind::Advanced: return 0.25 * future;
        case PropagatorKind::Commutator: return 0.25 * (past - future);
        case PropagatorKind::Feynman:
            // Half-sum of retarded and advanced from the i pi part of the log,
            // the real log part from the marginals, and the constant c_F.
            return 0.125 * (past + future) - kI / (8.0 * kPi) * (q.log_marginal(0, xi) + q.log_marginal(1, eta)) +
                   kI * c_F_ * 0.5 * q.total();
    }
    return 0.0;
}

cplx MinkowskiField::dt(double t, double x) const {
    const double xi = t - x, eta = t + x;
    const NullQuadrature& q = *q_;
    auto ret = [&] { return 0.25 * (q.line_xi(xi, 1, eta) + q.line_eta(1, xi, eta)); };
    auto adv = [&] { return -0.25 * (q.line_xi(xi, -1, eta) + q.line_eta(-1, xi, eta)); };
    switch (kind_) {
        case PropagatorKind::Retarded: return ret();
        case PropagatorKind::Advanced: return adv();
        case PropagatorKind::Commutator: return ret() - adv();
        case PropagatorKind::Feynman: break;
    }
    throw DomainError("time derivative of the Feynman field is not provided");
}

MinkowskiField propagator_apply(PropagatorKind kind, std::shared_ptr<const NullQuadrature> q, double c_F) {
    return MinkowskiField(std::move(q), kind, c_F);
}

MinkowskiField propagator_apply(PropagatorKind kind, const SpacetimeSource& f, double c_F,
                                const MinkowskiNumerics& num) {
    return propagator_apply(kind, std::make_shared<const NullQuadrature>(f, num), c_F);
}

Eigen::MatrixXcd sample_field(const std::function<cplx(double, double)>& u, const std::vector<double>& ts,
                              const std::vector<double>& xs) {
    Eigen::MatrixXcd M(ts.size(), xs.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) M(i, j) = u(ts[i], xs[j]);
    return M;
}

double dalembert_residual(const std::function<cplx(double, double)>& u, const std::function<cplx(double, double)>& g,
                          const std::vector<std::pair<double, double>>& points, double h) {
    // Sixth-order second difference.
    static const double c[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    double res = 0.0, scale = 0.0;
    for (auto [t, x] : points) {
        cplx u0 = u(t, x);
        cplx utt = c[0] * u0, uxx = c[0] * u0;
        for (int k = 1; k <= 3; ++k) {
            utt += c[k] * (u(t + k * h, x) + u(t - k * h, x));
            uxx += c[k] * (u(t, x + k * h) + u(t, x - k * h));
        }
        cplx box = (utt - uxx) / (h * h);
        res = std::max(res, std::abs(box - g(t, x)));
        scale = std::max(scale, std::abs(u0));
    }
    return scale > 0.0 ? res / scale : res;
}

// ---- radiation field ----

std::pair<double, double> null_end_point(NullEnd e, double s, double r) {
    const bool right = e.dir == NullDirection::Right;
    if (e.horizon > 0) return {0.5 * (r + s), right ? 0.5 * (r - s) : 0.5 * (s - r)};
    return {0.5 * (s - r), right ? 0.5 * (s + r) : -0.5 * (s + r)};
}

std::pair<double, double> radiation_window(const NullQuadrature& q, NullEnd e) {
    // s is xi = t - x at future-right and past-left, eta = t + x otherwise.
    const bool xi = (e.horizon > 0) == (e.dir == NullDirection::Right);
    const int axis = xi ? 0 : 1;
    return {q.lo(axis), q.hi(axis)};
}

RadiationData radiation_extract(const std::function<cplx(double, double)>& u, NullEnd end, double s_lo, double s_hi,
                                const RadiationSettings& rs) {
    if (rs.levels < 2) throw ExtrapolationDivergence("need at least two levels");
    const RefRule& R = ref_rule();
    RadiationData d;
    d.end = end;
    const int panels = std::max(1, int(std::ceil((s_hi - s_lo) / rs.s_panel)));
    const double h = (s_hi - s_lo) / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < kNodes; ++i) {
            d.s.push_back(s_lo + p * h + 0.5 * h * (R.x[i] + 1.0));
            d.s_weights.push_back(0.5 * h * R.w[i]);
        }
    // Richardson in 1/r by Neville's scheme.
    std::vector<double> hs(rs.levels);
    for (int j = 0; j < rs.levels; ++j) hs[j] = std::pow(2.0, j) / rs.r_max;
    double first_change = 0.0, second_change = 0.0;
    for (double s : d.s) {
        std::vector<cplx> v(rs.levels);
        for (int j = 0; j < rs.levels; ++j) {
            auto [t, x] = null_end_point(end, s, 1.0 / hs[j]);
            v[j] = u(t, x);
        }
        first_change = std::max(first_change, std::abs(v[0] - v[1]));
        if (rs.levels > 2) second_change = std::max(second_change, std::abs(v[1] - v[2]));
        std::vector<cplx> T = v;
        for (int m = 1; m < rs.levels; ++m)
            for (int j = rs.levels - 1; j >= m; --j)
                T[j] = (hs[j - m] * T[j] - hs[j] * T[j - 1]) / (hs[j - m] - hs[j]);
        // T[levels-1] is the value at h = 0 of the interpolant through all levels.
        d.field.push_back(T[rs.levels - 1]);
    }
    const double scale = std::max(max_abs(d.field), 1e-300);
    d.extrapolation_change = first_change / scale;
    if (rs.levels > 2 && first_change > 1e-10 * scale && first_change > 0.75 * second_change)
        throw ExtrapolationDivergence("null-line limit does not settle: level changes " +
                                      std::to_string(first_change / scale) + ", " +
                                      std::to_string(second_change / scale));

    // Mellin transform on tau = log gamma, trapezoid rule.
    const int M = rs.mellin_points;
    const double dtau = (rs.tau_max - rs.tau_min) / (M - 1);
    std::vector<cplx> gp(M), gm(M);
    for (int k = 0; k < M; ++k) {
        const double tau = rs.tau_min + k * dtau, gamma = std::exp(tau);
        const double wt = (k == 0 || k == M - 1) ? 0.5 * dtau : dtau;
        gp[k] = wt * gamma * radiation_fourier(d, gamma);
        gm[k] = wt * gamma * radiation_fourier(d, -gamma);
    }
    const double ds = 2.0 * rs.sigma_max / (rs.sigma_points - 1);
    for (int j = 0; j < rs.sigma_points; ++j) {
        const double sg = -rs.sigma_max + j * ds;
        cplx ap = 0.0, am = 0.0;
        for (int k = 0; k < M; ++k) {
            const cplx e = std::polar(1.0, -sg * (rs.tau_min + k * dtau));
            ap += e * gp[k];
            am += e * gm[k];
        }
        d.sigma.push_back(sg);
        d.a_plus.push_back(ap);
        d.a_minus.push_back(am);
    }
    return d;
}

cplx radiation_fourier(const RadiationData& d, double gamma) {
    cplx r = 0.0;
    for (std::size_t k = 0; k < d.s.size(); ++k) r += d.s_weights[k] * d.field[k] * std::polar(1.0, -gamma * d.s[k]);
    return r;
}

std::vector<cplx> radiation_reconstruct(const RadiationData& d, const std::vector<double>& s,
                                        const RadiationSettings& rs) {
    const int M = rs.mellin_points;
    const double dtau = (rs.tau_max - rs.tau_min) / (M - 1);
    const double ds = d.dsigma();
    // Inverse Mellin: gamma u^(+-gamma) = (1/2 pi) int gamma^{i sigma} a(sigma) d sigma.
    std::vector<cplx> gp(M), gm(M);
    for (int k = 0; k < M; ++k) {
        const double tau = rs.tau_min + k * dtau;
        for (std::size_t j = 0; j < d.sigma.size(); ++j) {
            const double w = (j == 0 || j + 1 == d.sigma.size()) ? 0.5 * ds : ds;
            const cplx e = std::polar(w, d.sigma[j] * tau);
            gp[k] += e * d.a_plus[j];
            gm[k] += e * d.a_minus[j];
        }
    }
    std::vector<cplx> out;
    for (double sv : s) {
        cplx total = 0.0;
        for (int k = 0; k < M; ++k) {
            const double gamma = std::exp(rs.tau_min + k * dtau);
            const double wt = (k == 0 || k == M - 1) ? 0.5 * dtau : dtau;
            total += wt * (gp[k] * std::polar(1.0, gamma * sv) + gm[k] * std::polar(1.0, -gamma * sv));
        }
        out.push_back(total / (4.0 * kPi * kPi));
    }
    return out;
}

std::pair<int, int> pairing_signs(IndexSet I) { return I == IndexSet::Minus ? std::pair{1, -1} : std::pair{-1, 1}; }

cplx data_pairing(const std::vector<RadiationData>& d1, const std::vector<RadiationData>& d2, IndexSet I) {
    if (d1.size() != d2.size()) throw DomainError("data_pairing: mismatched data sets");
    const auto [sp, sm] = pairing_signs(I);
    cplx r = 0.0;
    for (std::size_t e = 0; e < d1.size(); ++e) {
        const RadiationData &a = d1[e], &b = d2[e];
        const bool fut = a.end.horizon > 0;
        // Half carried by this end: gamma > 0 at S+ for I = {-}, gamma < 0 at S-; swapped for {+}.
        const bool plus_half = (I == IndexSet::Minus) == fut;
        const std::vector<cplx>& x = plus_half ? a.a_plus : a.a_minus;
        const std::vector<cplx>& y = plus_half ? b.a_plus : b.a_minus;
        const double ds = a.dsigma();
        cplx s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double w = (j == 0 || j + 1 == x.size()) ? 0.5 * ds : ds;
            s += w * std::conj(x[j]) * y[j];
        }
        r += double(fut ? sp : sm) * s;
    }
    return r;
}

namespace {
std::vector<RadiationData> radiation_all(const MinkowskiField& G, const RadiationSettings& rs) {
    std::vector<RadiationData> out;
    for (int hz : {+1, -1})
        for (NullDirection dir : {NullDirection::Right, NullDirection::Left}) {
            NullEnd e{dir, hz};
            auto [lo, hi] = radiation_window(G.quadrature(), e);
            out.push_back(radiation_extract(G, e, lo, hi, rs));
        }
    return out;
}
}  // namespace

std::vector<RadiationData> commutator_radiation(const SpacetimeSource& f, const RadiationSettings& rs,
                                                const MinkowskiNumerics& num) {
    return radiation_all(propagator_apply(PropagatorKind::Commutator, f, 0.0, num), rs);
}

std::vector<PairingEstimate> pairing_constant_estimate(
    const std::vector<std::pair<SpacetimeSource, SpacetimeSource>>& pairs, const std::vector<IndexSet>& sets,
    const RadiationSettings& rs, const MinkowskiNumerics& num) {
    if (pairs.empty()) throw DegenerateData("no source pairs");
    std::vector<PairingEstimate> est(sets.size());
    for (std::size_t k = 0; k < sets.size(); ++k) est[k].signs = pairing_signs(sets[k]);
    for (const auto& [f1, f2] : pairs) {
        auto q1 = std::make_shared<const NullQuadrature>(f1, num);
        auto q2 = std::make_shared<const NullQuadrature>(f2, num);
        MinkowskiField G1 = propagator_apply(PropagatorKind::Commutator, q1);
        MinkowskiField G2 = propagator_apply(PropagatorKind::Commutator, q2);
        const cplx lhs = q1->pair(G2);
        const auto d1 = radiation_all(G1, rs), d2 = radiation_all(G2, rs);
        for (std::size_t k = 0; k < sets.size(); ++k) {
            const cplx D = data_pairing(d1, d2, sets[k]);
            if (std::abs(D) < 1e-10) throw DegenerateData("data-side integral " + std::to_string(std::abs(D)));
            est[k].ratios.push_back(lhs / (kI * D));
        }
    }
    for (PairingEstimate& e : est) {
        for (const cplx& r : e.ratios) e.mean += r;
        e.mean /= double(e.ratios.size());
        for (const cplx& r : e.ratios) e.dispersion = std::max(e.dispersion, std::abs(r - e.mean) / std::abs(e.mean));
    }
    return est;
}

double negative_frequency_fraction(const SpacetimeSource& f, double x_probe, double T, int N, double c_F,
                                   const MinkowskiNumerics& num) {
    auto q = std::make_shared<const NullQuadrature>(f, num);
    MinkowskiField uF = propagator_apply(PropagatorKind::Feynman, q, c_F);
    MinkowskiField uR = propagator_apply(PropagatorKind::Retarded, q);
    const double dt = 2.0 * T / N;
    std::vector<cplx> in(N), out;
    for (int k = 0; k < N; ++k) {
        const double t = -T + k * dt;
        // Four-term Blackman-Harris window.
        const double a = 2.0 * kPi * k / N;
        const double w = 0.35875 - 0.48829 * std::cos(a) + 0.14128 * std::cos(2 * a) - 0.01168 * std::cos(3 * a);
        in[k] = w * (uF(t, x_probe) - uR(t, x_probe));
    }
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    double neg = 0.0, tot = 0.0;
    for (int k = 0; k < N; ++k) {
        const double e = std::norm(out[k]);
        tot += e;
        if (k == 0 || k == N / 2) neg += 0.5 * e;
        else if (k > N / 2) neg += e;
    }
    return tot > 0.0 ? neg / tot : 0.0;
}

TimeSliceResult minkowski_time_slice(const SpacetimeSource& f, double t_a, double t_b,
                                     const std::vector<std::pair<double, double>>& points,
                                     const MinkowskiNumerics& num) {
    auto q = std::make_shared<const NullQuadrature>(f, num);
    MinkowskiField G = propagator_apply(PropagatorKind::Commutator, q);
    // Q = (1 + erf((t - tm)/eps))/2 with the transition inside [t_a, t_b] to 1e-16.
    const double tm = 0.5 * (t_a + t_b), eps = (t_b - t_a) / 12.0;
    auto dQ = [tm, eps](double t, double& q1, double& q2) {
        const double z = (t - tm) / eps;
        q1 = std::exp(-z * z) / (eps * std::sqrt(kPi));
        q2 = -2.0 * z / eps * q1;
    };
    auto src = [G, dQ](double t, double x) -> cplx {
        double q1, q2;
        dQ(t, q1, q2);
        if (q1 == 0.0 && q2 == 0.0) return 0.0;
        return q2 * G(t, x) + 2.0 * q1 * G.dt(t, x);
    };
    // Box in x: G f vanishes outside the null strips through the source.
    const double xl = std::min(q->lo(1) - t_b, t_a - q->hi(0)) - 1.0;
    const double xr = std::max(t_b - q->lo(0), q->hi(1) - t_a) + 1.0;
    SpacetimeSource ut{src, t_a, t_b, xl, xr};
    TimeSliceResult r{0.0, 0.0};
    for (double t : {t_a - 0.5, t_b + 0.5})
        for (int k = 0; k <= 40; ++k) r.support_leak = std::max(r.support_leak, std::abs(src(t, xl + (xr - xl) * k / 40.0)));
    MinkowskiField G2 = propagator_apply(PropagatorKind::Commutator, ut, 0.0, num);
    double err = 0.0, scale = 0.0;
    for (auto [t, x] : points) {
        const cplx a = G(t, x);
        err = std::max(err, std::abs(G2(t, x) - a));
        scale = std::max(scale, std::abs(a));
    }
    r.error = err / scale;
    return r;
}

double skew_adjointness(const std::vector<SpacetimeSource>& sources, const MinkowskiNumerics& num) {
    const int m = int(sources.size());
    std::vector<std::shared_ptr<const NullQuadrature>> q;
    for (const auto& f : sources) q.push_back(std::make_shared<const NullQuadrature>(f, num));
    Eigen::MatrixXcd M(m, m);
    for (int j = 0; j < m; ++j) {
        MinkowskiField G = propagator_apply(PropagatorKind::Commutator, q[j]);
        for (int i = 0; i < m; ++i) M(i, j) = q[i]->pair(G);
    }
    return (M + M.adjoint()).cwiseAbs().maxCoeff() / M.cwiseAbs().maxCoeff();
}

}  // namespace hzl

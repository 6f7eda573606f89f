#include "horizonlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/chebyshev.hpp"

namespace hzl {

namespace {

constexpr int kNodes = 20;

// Reference Gauss-Legendre rule on [-1, 1] with barycentric weights.
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

}  // namespace

CumulativeIntegral::CumulativeIntegral(std::function<cplx(double)> h, double a, double b, double h_max)
    : a_(a), b_(std::max(a, b)) {
    const RefRule& R = ref_rule();
    int n = std::max(1, int(std::ceil((b_ - a_) / h_max)));
    for (int i = 0; i <= n; ++i) mesh_.push_back(a_ + (b_ - a_) * i / n);
    values_.resize(std::size_t(n) * kNodes);
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double c = 0.5 * (mesh_[i] + mesh_[i + 1]), hh = 0.5 * (mesh_[i + 1] - mesh_[i]);
        cplx s = 0.0;
        for (int j = 0; j < kNodes; ++j) {
            cplx v = h(c + hh * R.x[j]);
            values_[std::size_t(i) * kNodes + j] = v;
            s += R.w[j] * v;
        }
        acc += hh * s;
        prefix_.push_back(acc);
    }
}

// Integral of the panel interpolant from the panel start to t.
cplx CumulativeIntegral::panel_partial(std::size_t i, double t) const {
    const RefRule& R = ref_rule();
    const double hh = 0.5 * (mesh_[i + 1] - mesh_[i]);
    const double u = std::clamp((t - mesh_[i]) / hh - 1.0, -1.0, 1.0);
    const double half = 0.5 * (u + 1.0);
    if (half <= 0.0) return 0.0;
    double c[kNodes] = {}, l[kNodes];
    for (int k = 0; k < kNodes; ++k) {
        R.lagrange(-1.0 + half * (R.x[k] + 1.0), l);
        const double wk = R.w[k] * half;
        for (int j = 0; j < kNodes; ++j) c[j] += wk * l[j];
    }
    cplx s = 0.0;
    const cplx* v = values_.data() + i * kNodes;
    for (int j = 0; j < kNodes; ++j) s += c[j] * v[j];
    return hh * s;
}

cplx CumulativeIntegral::upto(double t) const {
    if (mesh_.empty() || t <= a_) return 0.0;
    if (t >= b_) return total();
    auto it = std::upper_bound(mesh_.begin(), mesh_.end(), t);
    std::size_t i = std::size_t(it - mesh_.begin()) - 1;  // t in [mesh_i, mesh_{i+1})
    cplx before = i == 0 ? cplx(0.0) : prefix_[i - 1];
    return before + panel_partial(i, t);
}

cplx integrate(const std::function<cplx(double)>& h, double a, double b, double h_max) {
    return CumulativeIntegral(h, a, b, h_max).total();
}

}  // namespace hzl

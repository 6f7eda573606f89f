#include "horizonlab/chebyshev.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace hzl {

namespace {

ChebBasis build(int n) {
    ChebBasis cb;
    cb.n = n;
    const int N = n - 1;
    cb.x.resize(n);
    for (int j = 0; j < n; ++j) cb.x[j] = -std::cos(kPi * j / N);
    cb.bary.resize(n);
    for (int j = 0; j < n; ++j) cb.bary[j] = (j % 2 ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);

    cb.D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            cb.D(i, j) = cb.bary[j] / cb.bary[i] / (cb.x[i] - cb.x[j]);
            diag -= cb.D(i, j);
        }
        cb.D(i, i) = diag;
    }

    // Node j sits at angle (N - j) pi / N.
    cb.coef.resize(n, n);
    for (int m = 0; m < n; ++m) {
        for (int j = 0; j < n; ++j) {
            int k = N - j;
            double w = (k == 0 || k == N) ? 0.5 : 1.0;
            cb.coef(m, j) = 2.0 / N * w * std::cos(kPi * m * k / N);
        }
        if (m == 0 || m == N) cb.coef.row(m) *= 0.5;
    }

    // Integration: coefficients of the antiderivative (degree n), then
    // evaluate at the nodes and subtract the value at -1.
    Eigen::MatrixXd I = Eigen::MatrixXd::Zero(n + 1, n);
    for (int m = 0; m < n; ++m) {
        if (m == 0) {
            I(1, 0) += 1.0;
        } else if (m == 1) {
            I(2, 1) += 0.25;
        } else {
            I(m + 1, m) += 0.5 / (m + 1);
            I(m - 1, m) -= 0.5 / (m - 1);
        }
    }
    Eigen::MatrixXd E(n, n + 1);
    Eigen::RowVectorXd Em1(n + 1);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m <= n; ++m) E(i, m) = std::cos(m * std::acos(std::clamp(cb.x[i], -1.0, 1.0)));
    for (int m = 0; m <= n; ++m) Em1[m] = (m % 2 ? -1.0 : 1.0);
    Eigen::MatrixXd Ic = I * cb.coef;
    cb.B = E * Ic;
    Eigen::RowVectorXd at_m1 = Em1 * Ic;
    for (int i = 0; i < n; ++i) cb.B.row(i) -= at_m1;

    cb.B2 = cb.B * cb.B;
    cb.Br = cb.B;
    for (int i = 0; i < n; ++i) cb.Br.row(i) -= cb.B.row(n - 1);
    cb.B2r = cb.Br * cb.Br;

    Eigen::RowVectorXd tint = Eigen::RowVectorXd::Zero(n);
    for (int m = 0; m < n; m += 2) tint[m] = 2.0 / (1.0 - double(m) * m);
    cb.cc = (tint * cb.coef).transpose();
    return cb;
}

}  // namespace

const ChebBasis& cheb_basis(int n) {
    static std::mutex mu;
    static std::map<int, ChebBasis> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

Eigen::VectorXd cheb_interp_row(const ChebBasis& cb, double xi) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(cb.n);
    double den = 0;
    for (int j = 0; j < cb.n; ++j) {
        double d = xi - cb.x[j];
        if (d == 0.0) {
            r.setZero();
            r[j] = 1.0;
            return r;
        }
        r[j] = cb.bary[j] / d;
        den += r[j];
    }
    return r / den;
}

cplx cheb_interp(const ChebBasis& cb, const Eigen::Ref<const Eigen::VectorXcd>& vals, double xi) {
    cplx num = 0.0;
    double den = 0;
    for (int j = 0; j < cb.n; ++j) {
        double d = xi - cb.x[j];
        if (d == 0.0) return vals[j];
        double w = cb.bary[j] / d;
        num += w * vals[j];
        den += w;
    }
    return num / den;
}

Series cheb_fit_monomial(const std::function<cplx(double)>& g, double c, double r, int m) {
    const ChebBasis& cb = cheb_basis(m);
    Eigen::VectorXcd vals(m);
    for (int j = 0; j < m; ++j) vals[j] = g(c + r * cb.x[j]);
    Eigen::VectorXcd ch = cb.coef.cast<cplx>() * vals;
    // Monomial coefficients of T_k by the three-term recurrence.
    std::vector<std::vector<double>> T(m, std::vector<double>(m, 0.0));
    T[0][0] = 1.0;
    if (m > 1) T[1][1] = 1.0;
    for (int k = 2; k < m; ++k)
        for (int i = 0; i < m; ++i) T[k][i] = (i > 0 ? 2.0 * T[k - 1][i - 1] : 0.0) - T[k - 2][i];
    Series out(m, 0.0);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i <= k; ++i) out[i] += ch[k] * T[k][i];
    return out;
}

namespace {
template <int N>
std::vector<std::pair<double, double>> gl_table() {
    using G = boost::math::quadrature::gauss<double, N>;
    std::vector<std::pair<double, double>> out;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            out.emplace_back(0.0, w[i]);
        } else {
            out.emplace_back(a[i], w[i]);
            out.emplace_back(-a[i], w[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static const auto g20 = gl_table<20>();
    static const auto g40 = gl_table<40>();
    return n <= 20 ? g20 : g40;
}

}  // namespace hzl

#include "horizonlab/caps.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/chebyshev.hpp"
#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

bool near_pole(cplx z, double tol) {
    if (z.real() > 0.5) return false;
    double n = std::round(z.real());
    return n <= 0 && std::abs(z - n) < tol;
}

cplx vpow(double v, cplx e) { return std::exp(e * std::log(v)); }

// sinh r and cosh r from x = sqrt(v), accurate up to the boundary.
void cap_sh_ch(double x, double& sh, double& ch) {
    double x2 = x * x;
    sh = std::sqrt((1.0 - x2) / (2.0 * x2));
    ch = std::sqrt((1.0 + x2) / (2.0 * x2));
}

double cap_interval_lo(int which) { return which > 0 ? 0.0 : kThetaHorizonMinus; }
double cap_interval_hi(int which) { return which > 0 ? kThetaHorizonPlus : kPi; }

}  // namespace

double cap_r(double theta) {
    double v = std::cos(2.0 * theta);
    if (!(v > 0.0)) throw DomainError("cap_r: theta is not in a cap");
    return std::asinh(std::abs(std::sin(theta)) / std::sqrt(v));
}

double cap_x(double theta) {
    double v = std::cos(2.0 * theta);
    if (!(v > 0.0)) throw DomainError("cap_x: theta is not in a cap");
    return std::sqrt(v);
}

double cap_theta(double x, int which) {
    double t = 0.5 * std::acos(x * x);
    return which > 0 ? t : kPi - t;
}

CapData asymptotic_fit(const std::function<cplx(double)>& w_of_x, SigmaParam sp, double x0, double x1) {
    const int m = 24;
    const cplx is = kI * sp.sigma;
    const int nc = 6;
    Eigen::MatrixXcd A(m, nc);
    Eigen::VectorXcd b(m);
    for (int i = 0; i < m; ++i) {
        double x = x0 * std::pow(x1 / x0, double(i) / (m - 1));
        double lx = std::log(x);
        A(i, 0) = std::exp((0.5 - is) * lx);
        A(i, 1) = std::exp((0.5 + is) * lx);
        for (int j = 2; j < nc; ++j) A(i, j) = A(i, j - 2) * x * x;
        b[i] = w_of_x(x);
    }
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (int j = 0; j < nc; ++j) A.col(j) /= scale[j];
    Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
    return {c[0] / scale[0], c[1] / scale[1]};
}

CapData cap_data_extract(const std::function<cplx(double)>& w_of_x, SigmaParam sp) {
    CapData a = asymptotic_fit(w_of_x, sp, 1e-3, 1e-2);
    CapData b = asymptotic_fit(w_of_x, sp, 5e-4, 5e-3);
    double nrm = std::max(std::abs(a.aplus), std::abs(a.aminus));
    double diff = std::max(std::abs(a.aplus - b.aplus), std::abs(a.aminus - b.aminus));
    if (nrm > 0 && diff > 1e-5 * nrm) throw FitDivergence("asymptotic fit windows disagree: " + std::to_string(diff / nrm));
    return a;
}

CapResolventMode::CapResolventMode(SigmaParam sp, int k) : sp_(sp), k_(std::abs(k)) {
    nu_ = -0.5 - kI * sp.sigma;
    if (near_pole(0.5 + double(k_) - kI * sp.sigma, 1e-8))
        throw GammaPole("cap resolvent pole at sigma = " + std::to_string(sp.sigma.real()) + "+" +
                        std::to_string(sp.sigma.imag()) + "i");
    const double z = 2.0;
    cplx P = legendre_p(nu_, -k_, z), Pd = legendre_p_deriv(nu_, -k_, z);
    cplx Q = legendre_q(nu_, k_, z), Qd = legendre_q_deriv(nu_, k_, z);
    C_ = (z * z - 1.0) * (P * Qd - Pd * Q);
    if (std::abs(C_) < 1e-300) throw GammaPole("degenerate cap Wronskian");
}

cplx CapResolventMode::w_reg(double r) const { return legendre_p(nu_, -k_, std::cosh(r)); }
cplx CapResolventMode::w_reg_dr(double r) const { return std::sinh(r) * legendre_p_deriv(nu_, -k_, std::cosh(r)); }
cplx CapResolventMode::w_out(double r) const { return legendre_q(nu_, k_, std::cosh(r)); }
cplx CapResolventMode::w_out_dr(double r) const { return std::sinh(r) * legendre_q_deriv(nu_, k_, std::cosh(r)); }

cplx CapResolventMode::kernel(double r, double rp) const {
    double lo = std::min(r, rp), hi = std::max(r, rp);
    return w_reg(lo) * w_out(hi) / C_;
}

CapData CapResolventMode::regular_data() const {
    const cplx is = kI * sp_.sigma;
    const double k = k_;
    cplx ap = std::exp((-0.25 + 0.5 * is) * std::log(2.0)) * gamma_fn(is) * rgamma(0.5 + k + is) / std::sqrt(kPi);
    cplx am = std::exp((-0.25 - 0.5 * is) * std::log(2.0)) * gamma_fn(-is) * rgamma(0.5 + k - is) / std::sqrt(kPi);
    return {ap, am};
}

cplx cap_source(SigmaParam sp, const SourceFunction& f, double theta) {
    double v = std::cos(2.0 * theta);
    return vpow(v, 0.5 * sp.p() + 1.0) * f(theta);
}

CapField::CapField(int which, SigmaParam sp, int k) : which_(which), sp_(sp), k_(k) {
    base_ = std::make_shared<const CapResolventMode>(sp, k);
}

void CapField::add_resolvent(cplx coef, std::shared_ptr<const CapResolventMode> R, const SourceFunction& f) {
    double a, b;
    if (!source_span(f, cap_interval_lo(which_), cap_interval_hi(which_), a, b)) return;
    const cplx beta = 0.5 * sp_.p();
    auto weight = [beta, f](double th) {
        double v = std::cos(2.0 * th);
        return vpow(v, beta) * f(th) * std::abs(std::sin(th)) / std::sqrt(v);
    };
    auto Rp = R;
    Term t{coef, R, f,
           CumulativeIntegral([Rp, weight](double th) { return Rp->w_reg(cap_r(th)) * weight(th); }, a, b),
           CumulativeIntegral([Rp, weight](double th) { return Rp->w_out(cap_r(th)) * weight(th); }, a, b)};
    terms_.push_back(std::move(t));
}

namespace {
cplx field_value(const std::vector<cplx>& coefs, double r, double theta, int which,
                 const std::vector<const CapResolventMode*>& Rs, const std::vector<const CumulativeIntegral*>& reg,
                 const std::vector<const CumulativeIntegral*>& out) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < coefs.size(); ++i) {
        cplx less, more;
        if (which > 0) {
            less = reg[i]->upto(theta);
            more = out[i]->total() - out[i]->upto(theta);
        } else {
            less = reg[i]->total() - reg[i]->upto(theta);
            more = out[i]->upto(theta);
        }
        cplx acc = 0.0;
        if (less != 0.0) acc += Rs[i]->w_out(r) * less;
        if (more != 0.0) acc += Rs[i]->w_reg(r) * more;
        s += coefs[i] * acc / Rs[i]->normalization();
    }
    return s;
}
}  // namespace

cplx CapField::w(double theta) const {
    double r = cap_r(theta);
    std::vector<cplx> coefs;
    std::vector<const CapResolventMode*> Rs;
    std::vector<const CumulativeIntegral*> reg, out;
    for (const Term& t : terms_) {
        coefs.push_back(t.coef);
        Rs.push_back(t.R.get());
        reg.push_back(&t.reg);
        out.push_back(&t.out);
    }
    cplx s = field_value(coefs, r, theta, which_, Rs, reg, out);
    if (reg_coef_ != 0.0) s += reg_coef_ * base_->w_reg(r);
    return s;
}

cplx CapField::u(double theta) const {
    double v = std::cos(2.0 * theta);
    return vpow(v, -0.5 * sp_.p()) * w(theta);
}

std::function<cplx(double)> CapField::w_of_x() const {
    return [this](double x) {
        double sh, ch;
        cap_sh_ch(x, sh, ch);
        double r = std::asinh(sh);
        double theta = cap_theta(x, which_);
        std::vector<cplx> coefs;
        std::vector<const CapResolventMode*> Rs;
        std::vector<const CumulativeIntegral*> reg, out;
        for (const Term& t : terms_) {
            coefs.push_back(t.coef);
            Rs.push_back(t.R.get());
            reg.push_back(&t.reg);
            out.push_back(&t.out);
        }
        cplx s = field_value(coefs, r, theta, which_, Rs, reg, out);
        if (reg_coef_ != 0.0) s += reg_coef_ * base_->w_reg(r);
        return s;
    };
}

cplx CapField::pair(const SourceFunction& g) const {
    double a, b;
    if (!source_span(g, cap_interval_lo(which_), cap_interval_hi(which_), a, b)) return 0.0;
    return integrate([&](double th) { return std::conj(g(th)) * u(th) * std::sin(th); }, a, b);
}

double CapField::ode_residual(double r0, double r1) const {
    const int n = 24;
    const ChebBasis& cb = cheb_basis(n);
    const double h = 0.5 * (r1 - r0);
    Eigen::VectorXcd w(n), g(n);
    Eigen::VectorXd rs(n);
    for (int j = 0; j < n; ++j) {
        double r = r0 + h * (1.0 + cb.x[j]);
        rs[j] = r;
        double v = 1.0 / std::cosh(2.0 * r);
        double th = 0.5 * std::acos(v);
        if (which_ < 0) th = kPi - th;
        w[j] = this->w(th);
        cplx gs = 0.0;
        for (const Term& t : terms_) gs += t.coef * cap_source(sp_, t.f, th);
        g[j] = gs;
    }
    Eigen::MatrixXcd D = cb.D.cast<cplx>() / h;
    Eigen::VectorXcd w1 = D * w, w2 = D * w1;
    const cplx m2 = sp_.sigma * sp_.sigma + 0.25;
    double worst = 0, scale = w.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) {
        double r = rs[j];
        cplx res = w2[j] + w1[j] / std::tanh(r) - double(k_ * k_) / (std::sinh(r) * std::sinh(r)) * w[j] + m2 * w[j] - g[j];
        worst = std::max(worst, std::abs(res));
    }
    return scale > 0 ? worst / scale : worst;
}

CapField cap_resolvent_apply(SigmaParam sp, int k, const SourceFunction& f, int which) {
    CapField F(which, sp, k);
    F.add_resolvent(1.0, std::make_shared<const CapResolventMode>(sp, k), f);
    return F;
}

CapField cap_g_diff_apply(SigmaParam sp, int k, const SourceFunction& f, int which) {
    CapField F(which, sp, k);
    F.add_resolvent(1.0, std::make_shared<const CapResolventMode>(sp, k), f);
    F.add_resolvent(-1.0, std::make_shared<const CapResolventMode>(SigmaParam{-sp.sigma}, k), f);
    return F;
}

cplx cap_g_diff_pair(SigmaParam sp, int k, const SourceFunction& f, const SourceFunction& g, int which) {
    return cap_g_diff_apply(sp, k, g, which).pair(f);
}

cplx scattering_matrix_cap(SigmaParam sp, int k) {
    const cplx is = kI * sp.sigma;
    const double kk = std::abs(k);
    if (near_pole(-is, 1e-8) || near_pole(0.5 + kk + is, 1e-8))
        throw GammaPole("cap scattering matrix at a Gamma pole");
    return std::exp(-is * std::log(2.0)) * gamma_fn(-is) * gamma_fn(0.5 + kk + is) * rgamma(is) * rgamma(0.5 + kk - is);
}

std::vector<cplx> cap_pole_predictions(int k, cplx corner0, cplx corner1) {
    const double re0 = std::min(corner0.real(), corner1.real()), re1 = std::max(corner0.real(), corner1.real());
    const double im0 = std::min(corner0.imag(), corner1.imag()), im1 = std::max(corner0.imag(), corner1.imag());
    std::vector<cplx> out;
    if (re0 > 0.0 || re1 < 0.0) return out;
    const double base = std::abs(k) + 0.5;
    for (int m = 0; base + m <= std::max(std::abs(im0), std::abs(im1)) + 1; ++m) {
        for (double s : {-1.0, 1.0}) {
            double im = s * (base + m);
            if (im >= im0 && im <= im1) out.push_back(cplx(0.0, im));
        }
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    return out;
}

}  // namespace hzl

#include "horizonlab/desitter.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

cplx vpow(double v, cplx e) { return std::exp(e * std::log(v)); }

constexpr double kBeltLo = kThetaHorizonPlus;
constexpr double kBeltHi = kThetaHorizonMinus;

double cosh_tau(double theta) { return std::sin(theta) / std::sqrt(-std::cos(2.0 * theta)); }

}  // namespace

double belt_tau(double theta) {
    double v = std::cos(2.0 * theta);
    if (!(v < 0.0)) throw DomainError("belt_tau: theta is not in the belt");
    return std::asinh(-std::cos(theta) / std::sqrt(-v));
}

double belt_x(double theta) {
    double v = std::cos(2.0 * theta);
    if (!(v < 0.0)) throw DomainError("belt_x: theta is not in the belt");
    return std::sqrt(-v);
}

double belt_theta(double x, int which) {
    double t = 0.5 * std::acos(-x * x);
    return which > 0 ? t : kPi - t;
}

double belt_tau_of_x(double x, int which) {
    double t = 0.5 * std::acosh(1.0 / (x * x));
    return which > 0 ? -t : t;
}

BeltModel::BeltModel(SigmaParam sp, int k) : sp_(sp), k_(std::abs(k)) {
    if (std::abs(sp.sigma) < 1e-8) throw DegeneracyError("belt basis degenerates at sigma = 0");
    const cplx is = kI * sp.sigma;
    const double nu = k_ - 0.5;
    Wc_ = -2.0 * kI / kPi * std::sinh(kPi * sp.sigma);
    const double r2 = std::sqrt(2.0);
    auto pw2 = [](cplx e) { return std::exp(e * std::log(2.0)); };
    // Coefficients of x^{1/2 - mu} and x^{1/2 + mu} in y_mu at S+.
    auto same = [&](cplx mu) { return r2 * pw2(-0.5 * (0.5 - mu)) * gamma_fn(mu) * rgamma(-nu) * rgamma(1.0 + nu); };
    auto other = [&](cplx mu) {
        return r2 * pw2(-0.5 * (0.5 + mu)) * gamma_fn(-mu) * rgamma(1.0 + nu - mu) * rgamma(-nu - mu);
    };
    Dp_ << same(is), other(-is), other(is), same(-is);
    Dm_ << r2 * pw2(-0.5 * (0.5 - is)) * rgamma(1.0 - is), 0.0, 0.0, r2 * pw2(-0.5 * (0.5 + is)) * rgamma(1.0 + is);
    for (int i = 0; i < 2; ++i) {
        cplx mu = i == 0 ? is : -is;
        cA_[i] = gamma_fn(-mu) * gamma_fn(1.0 + mu) * rgamma(1.0 + nu - mu) * rgamma(-nu - mu);
        cB_[i] = gamma_fn(mu) * gamma_fn(1.0 - mu) * rgamma(-nu) * rgamma(1.0 + nu);
    }
}

// y_mu for tau >= 0 from the hypergeometric series in z = 1/(1 + e^{2 tau}).
Jet BeltModel::y_forward(cplx mu, double tau) const {
    const double k = k_;
    const cplx a = 0.5 - k, b = k + 0.5, c = 1.0 - mu;
    const double e2 = std::exp(-2.0 * tau);
    const double z = e2 / (1.0 + e2);
    const double t = std::tanh(tau);
    cplx A = std::exp(mu * tau) / std::sqrt(std::cosh(tau)) * rgamma(c);
    cplx F0 = hyp2f1(a, b, c, z);
    cplx F1 = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z);
    cplx F2 = a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * hyp2f1(a + 2.0, b + 2.0, c + 2.0, z);
    const double zp = -2.0 * z * (1.0 - z);
    const double zpp = -2.0 * (1.0 - 2.0 * z) * zp;
    cplx g = mu - 0.5 * t;
    cplx Ap = A * g, App = A * (g * g - 0.5 * (1.0 - t * t));
    cplx Ft = F1 * zp, Ftt = F2 * zp * zp + F1 * zpp;
    return {A * F0, Ap * F0 + A * Ft, App * F0 + 2.0 * Ap * Ft + A * Ftt};
}

Jet BeltModel::y(int s, double tau) const {
    const cplx mu = (s > 0 ? 1.0 : -1.0) * kI * sp_.sigma;
    if (tau >= 0.0) return y_forward(mu, tau);
    // Reflection tau -> -tau is a symmetry of the equation; connect through S- data.
    const int i = s > 0 ? 0 : 1;
    Jet j1 = y_forward(-mu, -tau), j2 = y_forward(mu, -tau);
    return {cA_[i] * j1.u + cB_[i] * j2.u, -(cA_[i] * j1.du + cB_[i] * j2.du), cA_[i] * j1.d2u + cB_[i] * j2.d2u};
}

cplx belt_source(SigmaParam sp, const SourceFunction& f, double theta) {
    double av = -std::cos(2.0 * theta);
    return -vpow(av, 0.5 * sp.p() + 1.0) * f(theta);
}

BeltField::BeltField(SigmaParam sp, int k) : model_(std::make_shared<const BeltModel>(sp, k)) {}

BeltField::BeltField(std::shared_ptr<const BeltModel> model) : model_(std::move(model)) {}

void BeltField::add_duhamel(cplx coef, int side, const SourceFunction& f) {
    double a, b;
    if (!source_span(f, kBeltLo, kBeltHi, a, b)) return;
    auto M = model_;
    const cplx beta = 0.5 * M->sp().p();
    const cplx Wc = M->wronskian();
    // g d tau cosh(tau) / Wc in theta: -|v|^beta f sin(theta) / sqrt|v| / Wc.
    auto weight = [beta, Wc, f](double th) {
        double av = -std::cos(2.0 * th);
        return -vpow(av, beta) * f(th) * std::sin(th) / std::sqrt(av) / Wc;
    };
    Term t{coef, side > 0 ? 1 : -1, f,
           CumulativeIntegral([M, weight](double th) { return M->y(+1, belt_tau(th)).u * weight(th); }, a, b),
           CumulativeIntegral([M, weight](double th) { return M->y(-1, belt_tau(th)).u * weight(th); }, a, b)};
    terms_.push_back(std::move(t));
}

void BeltField::add_homogeneous(cplx c_plus, cplx c_minus) {
    cp_ += c_plus;
    cm_ += c_minus;
}

cplx BeltField::source_tau(double theta) const {
    cplx s = 0.0;
    for (const Term& t : terms_) s += t.coef * belt_source(model_->sp(), t.f, theta);
    return s;
}

Jet BeltField::w_tau(double theta, double tau) const {
    Jet yp = model_->y(+1, tau), ym = model_->y(-1, tau);
    Jet w = cp_ * yp + cm_ * ym;
    const double ch = cosh_tau(theta);
    for (const Term& t : terms_) {
        cplx Ip = t.ip.upto(theta), Im = t.im.upto(theta);
        cplx cy_p, cy_m;  // coefficients of y_+ and y_- at this point
        if (t.side > 0) {
            cy_p = -Im;
            cy_m = Ip;
        } else {
            cy_p = t.im.total() - Im;
            cy_m = -(t.ip.total() - Ip);
        }
        Jet add = cy_p * yp + cy_m * ym;
        add.d2u += (ym.du * yp.u - yp.du * ym.u) * belt_source(model_->sp(), t.f, theta) * ch / model_->wronskian();
        w = w + t.coef * add;
    }
    return w;
}

cplx BeltField::w(double theta) const {
    const double tau = belt_tau(theta);
    const cplx yp = model_->y(+1, tau).u, ym = model_->y(-1, tau).u;
    cplx s = cp_ * yp + cm_ * ym;
    for (const Term& t : terms_) {
        cplx Ip = t.ip.upto(theta), Im = t.im.upto(theta);
        if (t.side > 0)
            s += t.coef * (ym * Ip - yp * Im);
        else
            s += t.coef * (-ym * (t.ip.total() - Ip) + yp * (t.im.total() - Im));
    }
    return s;
}

cplx BeltField::u(double theta) const {
    double av = -std::cos(2.0 * theta);
    return vpow(av, -0.5 * model_->sp().p()) * w(theta);
}

std::function<cplx(double)> BeltField::w_of_x(int which) const {
    return [this, which](double x) {
        const double th = belt_theta(x, which);
        const double tau = belt_tau_of_x(x, which);
        auto [cp, cm] = tail_coefficients(which);
        // Sources vanish near the horizons, so the tail form is exact there;
        // fall back to the full representation inside the support.
        for (const Term& t : terms_)
            if (th > t.ip.lo() && th < t.ip.hi()) return w(th);
        return cp * model_->y(+1, tau).u + cm * model_->y(-1, tau).u;
    };
}

std::pair<cplx, cplx> BeltField::tail_coefficients(int which) const {
    cplx cp = cp_, cm = cm_;
    for (const Term& t : terms_) {
        if (t.side > 0 && which < 0) {
            cp += -t.coef * t.im.total();
            cm += t.coef * t.ip.total();
        } else if (t.side < 0 && which > 0) {
            cp += t.coef * t.im.total();
            cm += -t.coef * t.ip.total();
        }
    }
    return {cp, cm};
}

CapData BeltField::data(int which) const { return cap_data_extract(w_of_x(which), model_->sp()); }

CapData BeltField::data_exact(int which) const {
    auto [cp, cm] = tail_coefficients(which);
    Eigen::Vector2cd d = model_->data_basis(which) * Eigen::Vector2cd(cp, cm);
    return {d[0], d[1]};
}

cplx BeltField::pair(const SourceFunction& g) const {
    double a, b;
    if (!source_span(g, kBeltLo, kBeltHi, a, b)) return 0.0;
    return integrate([&](double th) { return std::conj(g(th)) * u(th) * std::sin(th); }, a, b);
}

double BeltField::ode_residual(const std::vector<double>& thetas) const {
    const cplx m2 = model_->sp().sigma * model_->sp().sigma + 0.25;
    const double kk = double(model_->k()) * model_->k();
    double worst = 0.0, scale = 0.0;
    for (double th : thetas) {
        const double tau = belt_tau(th);
        Jet w = w_tau(th, tau);
        const double t = std::tanh(tau), ch = std::cosh(tau);
        cplx res = w.d2u + t * w.du + kk / (ch * ch) * w.u + m2 * w.u - source_tau(th);
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(w.u));
    }
    return scale > 0 ? worst / scale : worst;
}

BeltField belt_propagator(SigmaParam sp, int k, int side, const SourceFunction& f) {
    BeltField F(sp, k);
    F.add_duhamel(1.0, side, f);
    return F;
}

CapData belt_data_map(const BeltField& w, int which) { return w.data(which); }

BeltField belt_poisson(SigmaParam sp, int k, const CapData& data, int which) {
    BeltField F(sp, k);
    Eigen::Vector2cd c = F.model().data_basis(which).fullPivLu().solve(Eigen::Vector2cd(data.aplus, data.aminus));
    F.add_homogeneous(c[0], c[1]);
    return F;
}

Eigen::Matrix2cd ds_scattering(SigmaParam sp, int k) {
    BeltModel m(sp, k);
    return m.data_basis(+1) * m.data_basis(-1).inverse();
}

Eigen::Matrix2cd ds_scattering_reverse_numeric(SigmaParam sp, int k) {
    Eigen::Matrix2cd R;
    for (int j = 0; j < 2; ++j) {
        CapData e{j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0};
        CapData d = belt_data_map(belt_poisson(sp, k, e, +1), -1);
        R(0, j) = d.aplus;
        R(1, j) = d.aminus;
    }
    return R;
}

Eigen::Matrix2cd rho_relation_matrix(SigmaParam sp, int k) {
    const cplx e = std::exp(kPi * sp.sigma);
    const cplx Si = 1.0 / scattering_matrix_cap(sp, k);
    Eigen::Matrix2cd M;
    M << 1.0, -Si / e, -1.0, e * Si;
    return M / (e - 1.0 / e);
}

RhoRelationReport rho_relation_check(SigmaParam sp, int k) {
    if (std::abs(sp.sigma) < 1e-3) throw DegeneracyError("rho relation is singular near sigma = 0");
    auto s = std::make_shared<const ModeSolver>(sp, k, MetricProfile::exact());
    const Eigen::Matrix2cd M = rho_relation_matrix(sp, k);
    const cplx e = std::exp(kPi * sp.sigma);
    const cplx Si = 1.0 / scattering_matrix_cap(sp, k);
    Eigen::Matrix2cd L;
    L << 1.0, -e * Si, -1.0, Si / e;
    L /= (1.0 / e - e);
    RhoRelationReport rep{0.0, 0.0};
    for (const GlobalSolution& u : homogeneous_basis(s)) {
        AsymptoticData g = u.data(+1);
        Eigen::Vector2cd lhs(g.aplus, g.aminus);
        const cplx p = sp.p();
        auto wx = [&u, p](double x) { return std::exp(p * std::log(x)) * u.eval(belt_theta(x, +1)).u; };
        CapData b = cap_data_extract(wx, sp);
        Eigen::Vector2cd bd(b.aplus, b.aminus);
        double nrm = lhs.cwiseAbs().maxCoeff();
        rep.mismatch = std::max(rep.mismatch, (M * bd - lhs).cwiseAbs().maxCoeff() / nrm);
        rep.literal_mismatch = std::max(rep.literal_mismatch, (L * bd - lhs).cwiseAbs().maxCoeff() / nrm);
    }
    return rep;
}

void belt_step(double theta, double& q, double& dq, double& d2q) {
    dq = d2q = 0.0;
    if (theta >= 0.5 * kPi) {
        q = 1.0;
        return;
    }
    const double v = std::cos(2.0 * theta);
    const double s = -10.0 * (v + 0.5);
    if (s <= -1.0) {
        q = 0.0;
        return;
    }
    if (s >= 1.0) {
        q = 1.0;
        return;
    }
    const double d = 1.0 - s * s;
    const double E = s / d, Ep = (1.0 + s * s) / (d * d), Epp = (6.0 * s + 2.0 * s * s * s) / (d * d * d);
    q = 1.0 / (1.0 + std::exp(-2.0 * E));
    if (std::abs(E) > 300.0) return;
    const double th = std::tanh(E), ce = std::cosh(E), sech2 = 1.0 / (ce * ce);
    const double qs = 0.5 * sech2 * Ep;
    const double qss = 0.5 * sech2 * (Epp - 2.0 * th * Ep * Ep);
    const double sp = 20.0 * std::sin(2.0 * theta), spp = 40.0 * std::cos(2.0 * theta);
    dq = qs * sp;
    d2q = qss * sp * sp + qs * spp;
}

SourceFunction commutator_source(const GlobalSolution& u, const ModeCoefficients& mc) {
    const double lo = 0.5 * std::acos(-0.4), hi = 0.5 * std::acos(-0.6);
    auto fn = [u, mc](double th) -> cplx {
        double q, dq, d2q;
        belt_step(th, q, dq, d2q);
        if (dq == 0.0 && d2q == 0.0) return 0.0;
        double a2;
        cplx a1, a0;
        mc.theta_coeffs(th, a2, a1, a0);
        Jet j = u.eval(th);
        return a2 * (d2q * j.u + 2.0 * dq * j.du) + a1 * dq * j.u;
    };
    SourceFunction f = make_source(fn, lo, hi);
    return f;
}

double time_slice_check(const std::shared_ptr<const ModeSolver>& s) {
    GDiff G = g_diff(s);
    const std::vector<double> grid = default_grid(*s);
    double worst = 0.0;
    for (const GlobalSolution& u : homogeneous_basis(s)) {
        GlobalSolution Gu = G.apply(commutator_source(u, s->mc()));
        double err = 0.0, nrm = 0.0;
        for (double th : grid) {
            cplx a = u.eval(th).u;
            err = std::max(err, std::abs(Gu.eval(th).u - a));
            nrm = std::max(nrm, std::abs(a));
        }
        worst = std::max(worst, err / nrm);
    }
    return worst;
}

BeltIsomorphismReport belt_isomorphism(const std::shared_ptr<const ModeSolver>& s, std::uint64_t seed, int count) {
    GDiff G = g_diff(s);
    auto sources = random_sources(seed, count, RegionMask::Belt, s->num());
    Eigen::MatrixXcd M(2, count);
    for (int j = 0; j < count; ++j) {
        AsymptoticData d = G.apply(sources[j]).data(+1);
        M(0, j) = d.aplus;
        M(1, j) = d.aminus;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    BeltIsomorphismReport rep{0, svd.singularValues()};
    const double top = rep.singular_values.size() ? rep.singular_values[0] : 0.0;
    for (int i = 0; i < rep.singular_values.size(); ++i)
        if (rep.singular_values[i] > 1e-8 * top) ++rep.rank;
    return rep;
}

double belt_conjugation_check(const std::shared_ptr<const ModeSolver>& s, const std::vector<SourceFunction>& sources) {
    ModeGreens adv = build_inverse(s, BranchLabel::advanced());
    ModeGreens ret = build_inverse(s, BranchLabel::retarded());
    std::vector<double> grid;
    const int n = 200;
    for (int i = 0; i < n; ++i) grid.push_back(kBeltLo + 0.05 + (kBeltHi - kBeltLo - 0.1) * i / (n - 1));
    double worst = 0.0;
    for (const SourceFunction& f0 : sources) {
        SourceFunction f = restrict_to(f0, Region::Belt);
        for (int side : {+1, -1}) {
            GlobalSolution g = (side > 0 ? adv : ret).solve(f);
            BeltField b = belt_propagator(s->sp(), s->k(), side, f);
            double err = 0.0, nrm = 0.0;
            for (double th : grid) {
                cplx a = g.eval(th).u;
                err = std::max(err, std::abs(b.u(th) - a));
                nrm = std::max(nrm, std::abs(a));
            }
            worst = std::max(worst, nrm > 0 ? err / nrm : err);
        }
    }
    return worst;
}

}  // namespace hzl

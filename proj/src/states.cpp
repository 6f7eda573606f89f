#include "horizonlab/states.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

double min_eig(const CMatrix& M) {
    CMatrix H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    return es.eigenvalues().minCoeff();
}

double max_abs(const CMatrix& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// Smooth step from 0 at s = -1 to 1 at s = 1, with derivatives in s.
void smooth_step(double s, double& q, double& dq, double& d2q) {
    dq = d2q = 0.0;
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
    dq = 0.5 * sech2 * Ep;
    d2q = 0.5 * sech2 * (Epp - 2.0 * th * Ep * Ep);
}

std::vector<GlobalSolution> apply_all(const GDiff& G, const std::vector<SourceFunction>& sources) {
    std::vector<GlobalSolution> out;
    out.reserve(sources.size());
    for (const SourceFunction& f : sources) out.push_back(G.apply(f));
    return out;
}

}  // namespace

std::vector<SourceFunction> state_sources(std::uint64_t seed, int count, const Numerics& num) {
    auto a = random_sources(seed, count, RegionMask::CapPlus, num);
    auto b = random_sources(seed + 1, count, RegionMask::Belt, num);
    auto c = random_sources(seed + 2, count, RegionMask::CapMinus, num);
    std::vector<SourceFunction> out;
    for (int i = 0; i < count; ++i) out.push_back(a[i] + b[i] + c[i]);
    return out;
}

SourceFunction p_exact_source(const ModeCoefficients& mc, double center, double width) {
    auto fn = [mc, center, width](double th) -> cplx {
        const double s = (th - center) / width;
        if (std::abs(s) >= 1.0) return 0.0;
        const double d = 1.0 - s * s;
        const double phi = std::exp(1.0 - 1.0 / d);
        const double g1 = -2.0 * s / (d * d), g2 = -2.0 / (d * d) - 8.0 * s * s / (d * d * d);
        const double p1 = phi * g1 / width, p2 = phi * (g2 + g1 * g1) / (width * width);
        double a2;
        cplx a1, a0;
        mc.theta_coeffs(th, a2, a1, a0);
        return a2 * p2 + a1 * p1 + a0 * phi;
    };
    return make_source(fn, center - width, center + width);
}

void horizon_cutoff(double v, double& chi, double& dchi, double& d2chi) {
    // chi = 1 - step(s), s running from -1 at |v| = 0.12 to 1 at |v| = 0.3.
    const double lo = 0.12, hi = 0.3;
    const double av = std::abs(v), sg = v >= 0 ? 1.0 : -1.0;
    const double s = (2.0 * av - lo - hi) / (hi - lo);
    double q, dq, d2q;
    smooth_step(s, q, dq, d2q);
    const double ds = 2.0 / (hi - lo) * sg;
    chi = 1.0 - q;
    dchi = -dq * ds;
    d2chi = -d2q * ds * ds;
}

Eigen::Vector2cd basis_coordinates(const GlobalSolution& u) {
    HorizonCoefficients c = u.coefficients(+1);
    return {c.alpha_belt, c.beta_belt};
}

GlobalSolution globe_poisson(const std::shared_ptr<const ModeSolver>& s, const AsymptoticData& a, int side) {
    const int which = side > 0 ? 1 : -1;
    const HorizonBasis& hb = s->horizon(which);
    const cplx sigma = s->sp().sigma;
    const cplx tp = transmission_coefficient(Branch::PlusI0, sigma);
    const cplx tm = transmission_coefficient(Branch::MinusI0, sigma);
    const cplx beta_cap = a.aplus + a.aminus;
    const cplx beta_belt = tp * a.aplus + tm * a.aminus;

    // Continuation of psi into the cap, far enough to cover the cutoff transition.
    const double v_far = 0.35;
    const double th_cap_far = which > 0 ? 0.5 * std::acos(v_far) : kPi - 0.5 * std::acos(v_far);
    Jet pc = hb.psi(hb.theta_cap());
    Eigen::MatrixXcd init(2, 1);
    init << pc.u, pc.du;
    auto cap_psi = std::make_shared<PanelSolution>(
        integrate_panels(s->mc(), hb.theta_cap(), th_cap_far, init, {std::function<cplx(double)>()}, s->num()));
    // psi of this horizon continued across the belt, in the belt panel columns.
    Eigen::Vector2cd d(0.0, 1.0);
    if (which < 0) d = s->transfer().inverse() * Eigen::Vector2cd(0.0, 1.0);

    auto psi_local = [s, which, cap_psi, d, beta_cap, beta_belt](double th) -> Jet {
        const HorizonBasis& hb = s->horizon(which);
        const double v = std::cos(2.0 * th);
        if (v > 0.0) {
            bool zone = which > 0 ? th >= hb.theta_cap() : th <= hb.theta_cap();
            return beta_cap * (zone ? hb.psi(th) : cap_psi->eval(th, 0));
        }
        bool zone = which > 0 ? th <= hb.theta_belt() : th >= hb.theta_belt();
        if (zone) return beta_belt * hb.psi(th);
        return beta_belt * (d[0] * s->belt().eval(th, 0) + d[1] * s->belt().eval(th, 1));
    };
    const ModeCoefficients mc = s->mc();
    auto h = [psi_local, mc](double th) -> cplx {
        const double v = std::cos(2.0 * th);
        double chi, dchi, d2chi;
        horizon_cutoff(v, chi, dchi, d2chi);
        if (dchi == 0.0 && d2chi == 0.0) return 0.0;
        // Chain rule to theta: dv/dtheta = -2 sin 2 theta, d2v/dtheta2 = -4 cos 2 theta.
        const double vp = -2.0 * std::sin(2.0 * th), vpp = -4.0 * v;
        const double c1 = dchi * vp, c2 = d2chi * vp * vp + dchi * vpp;
        double a2;
        cplx a1, a0;
        mc.theta_coeffs(th, a2, a1, a0);
        Jet j = psi_local(th);
        return a2 * (c2 * j.u + 2.0 * c1 * j.du) + a1 * c1 * j.u;
    };
    const double th_in = 0.5 * std::acos(0.3), th_out = 0.5 * std::acos(-0.3);
    const double lo = which > 0 ? th_in : kPi - th_out, hi = which > 0 ? th_out : kPi - th_in;
    SourceFunction src = make_source(h, lo, hi);

    ModeGreens G = build_inverse(s, which > 0 ? BranchLabel::advanced() : BranchLabel::retarded());
    GlobalSolution w = G.solve(src);
    HorizonCoefficients wc = w.coefficients(which);
    // Near the horizon U = Psi - w, whose belt coefficients there fix U in Sol(P).
    Eigen::Vector2cd at(-wc.alpha_belt, beta_belt - wc.beta_belt);
    Eigen::Vector2cd c = which > 0 ? at : Eigen::Vector2cd(s->transfer().inverse() * at);
    auto B = homogeneous_basis(s);
    return c[0] * B[0] + c[1] * B[1];
}

GlobalSolution globe_poisson_direct(const std::shared_ptr<const ModeSolver>& s, const AsymptoticData& a, int side) {
    auto B = homogeneous_basis(s);
    Eigen::Matrix2cd M;
    for (int j = 0; j < 2; ++j) {
        AsymptoticData d = B[j].data(side);
        M(0, j) = d.aplus;
        M(1, j) = d.aminus;
    }
    Eigen::Vector2cd c = M.fullPivLu().solve(Eigen::Vector2cd(a.aplus, a.aminus));
    return c[0] * B[0] + c[1] * B[1];
}

Eigen::Vector2d symplectic_weights(cplx sigma, int side) {
    const double e = std::exp(kPi * sigma.real());
    Eigen::Vector2d w(e, -1.0 / e);
    return side > 0 ? w : Eigen::Vector2d(-w);
}

namespace {
// Least-squares real alpha in A = alpha B and the relative residual.
std::pair<cplx, double> fit_alpha(const CMatrix& A, const CMatrix& B) {
    cplx num = 0.0;
    double den = 0.0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            num += std::conj(B(i, j)) * A(i, j);
            den += std::norm(B(i, j));
        }
    if (den == 0.0) throw FitDivergence("symplectic fit: data vanish on all sources");
    cplx a = num / den;
    return {a, (A - a.real() * B).norm() / A.norm()};
}

CMatrix data_form(const std::vector<AsymptoticData>& d, double wp, double wm) {
    const int m = int(d.size());
    CMatrix B(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            B(i, j) = wp * std::conj(d[i].aplus) * d[j].aplus + wm * std::conj(d[i].aminus) * d[j].aminus;
    return B;
}
}  // namespace

SymplecticNormalization symplectic_alpha(const std::shared_ptr<const ModeSolver>& s,
                                         const std::vector<SourceFunction>& sources, int side) {
    GDiff G = g_diff(s);
    auto gf = apply_all(G, sources);
    CMatrix A = kI * gram(sources, gf);
    std::vector<AsymptoticData> d;
    for (const GlobalSolution& u : gf) d.push_back(u.data(side));
    const Eigen::Vector2d w = symplectic_weights(s->sp().sigma, side);
    auto [alpha, res] = fit_alpha(A, data_form(d, w[0], w[1]));
    SymplecticNormalization r;
    r.alpha = alpha.real();
    r.alpha_imag = alpha.imag();
    r.residual = res;
    r.literal_residual = fit_alpha(A, data_form(d, 1.0, -1.0)).second;
    if (!(r.residual <= 1e-6)) throw FitDivergence("symplectic fit residual " + std::to_string(r.residual));
    return r;
}

double cap_symplectic_constant(SigmaParam sp, int k, const std::vector<SourceFunction>& cap_sources, double* residual) {
    const int m = int(cap_sources.size());
    std::vector<CapField> g;
    std::vector<SourceFunction> src;
    std::vector<AsymptoticData> d;
    for (const SourceFunction& f : cap_sources) {
        src.push_back(restrict_to(f, Region::CapPlus));
        g.push_back(cap_g_diff_apply(sp, k, src.back(), +1));
        d.push_back({g.back().data().aplus, 0.0});
    }
    CMatrix A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = kI * g[j].pair(src[i]);
    auto [kappa, res] = fit_alpha(A, data_form(d, 1.0, 0.0));
    if (residual) *residual = res;
    return kappa.real();
}

double TwoPointForm::ccr_residual() const { return max_abs(lplus - lminus - ig) / max_abs(ig); }

double TwoPointForm::hermiticity() const {
    double s = std::max(max_abs(lplus), max_abs(lminus));
    return std::max(max_abs(lplus - lplus.adjoint()), max_abs(lminus - lminus.adjoint())) / s;
}

double TwoPointForm::min_eig_plus() const { return min_eig(lplus) / std::max(1e-300, max_abs(ig)); }
double TwoPointForm::min_eig_minus() const { return min_eig(lminus) / std::max(1e-300, max_abs(ig)); }

TwoPointForm two_point_from_data(const std::vector<SourceFunction>& sources, const std::vector<GlobalSolution>& gf,
                                 const std::vector<AsymptoticData>& data, double alpha, cplx sigma, int side) {
    const int m = int(sources.size());
    const Eigen::Vector2d w = alpha * symplectic_weights(sigma, side);
    TwoPointForm tp;
    tp.alpha = alpha;
    tp.side = side;
    tp.sigma = sigma;
    tp.swapped = w[0] < 0.0;
    tp.ig = kI * gram(sources, gf);
    tp.lplus = CMatrix::Zero(m, m);
    tp.lminus = CMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            cplx pp = std::conj(data[i].aplus) * data[j].aplus;
            cplx mm = std::conj(data[i].aminus) * data[j].aminus;
            (w[0] > 0 ? tp.lplus : tp.lminus)(i, j) += std::abs(w[0]) * pp;
            (w[1] > 0 ? tp.lplus : tp.lminus)(i, j) += std::abs(w[1]) * mm;
        }
    return tp;
}

TwoPointForm two_point_build(const std::shared_ptr<const ModeSolver>& s, int side,
                             const std::vector<SourceFunction>& sources, double alpha) {
    GDiff G = g_diff(s);
    auto gf = apply_all(G, sources);
    std::vector<AsymptoticData> d;
    for (const GlobalSolution& u : gf) d.push_back(u.data(side));
    TwoPointForm tp = two_point_from_data(sources, gf, d, alpha, s->sp().sigma, side);
    tp.k = s->k();
    return tp;
}

double annihilation_residual(const std::shared_ptr<const ModeSolver>& s, int side, double alpha,
                             const std::vector<SourceFunction>& sources) {
    std::vector<SourceFunction> all = sources;
    const std::size_t m = sources.size();
    for (auto [c, w] : std::vector<std::pair<double, double>>{{0.45, 0.2}, {1.3, 0.3}, {2.2, 0.25}, {2.75, 0.15}})
        all.push_back(p_exact_source(s->mc(), c, w));
    TwoPointForm tp = two_point_build(s, side, all, alpha);
    double scale = std::max(max_abs(tp.lplus), max_abs(tp.lminus)), worst = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = m; j < all.size(); ++j)
            worst = std::max({worst, std::abs(tp.lplus(i, j)), std::abs(tp.lminus(i, j))});
    return worst / scale;
}

StatisticsCheck signed_sum_check(const TwoPointForm& tp) {
    const double n = max_abs(tp.ig);
    StatisticsCheck c;
    c.bosonic = max_abs(tp.lplus - tp.lminus - tp.ig) / n;
    c.fermionic = max_abs(tp.lplus + tp.lminus - tp.ig) / n;
    c.bosonic_matches = c.bosonic < c.fermionic;
    return c;
}

TwoPointKernel::TwoPointKernel(const std::shared_ptr<const ModeSolver>& s, int side, double alpha,
                               const std::vector<SourceFunction>& sources)
    : basis_(homogeneous_basis(s)) {
    GDiff G = g_diff(s);
    const int m = int(sources.size());
    if (m < 2) throw DegenerateData("kernel fit needs at least two sources");
    Eigen::MatrixXcd C(2, m), F(m, 2);
    for (int j = 0; j < m; ++j) {
        C.col(j) = basis_coordinates(G.apply(sources[j]));
        for (int a = 0; a < 2; ++a) F(j, a) = basis_[a].pair(sources[j]);
    }
    // G f_j = sum_a c_a(f_j) u_a with c_a(f) = <h_a, f>, h_a = sum_b N_ab u_b.
    Eigen::MatrixXcd FH = F.adjoint();
    Nbar_ = FH.transpose().colPivHouseholderQr().solve(C.transpose()).transpose();
    fit_residual_ = (C - Nbar_ * FH).norm() / C.norm();
    Eigen::Vector2cd ap, am;
    for (int a = 0; a < 2; ++a) {
        AsymptoticData d = basis_[a].data(side);
        ap[a] = d.aplus;
        am[a] = d.aminus;
    }
    // l(theta') = sum_b (sum_a rho(u_a) Nbar_ab) conj(u_b(theta')).
    Lp_ = Nbar_.transpose() * ap;
    Lm_ = Nbar_.transpose() * am;
    const Eigen::Vector2d w = alpha * symplectic_weights(s->sp().sigma, side);
    cp_ = std::abs(w[0]);
    cm_ = std::abs(w[1]);
    if (w[0] < 0.0) {
        std::swap(Lp_, Lm_);
        std::swap(cp_, cm_);
    }
}

cplx TwoPointKernel::ell(const Eigen::Vector2cd& L, double theta) const {
    return L[0] * std::conj(basis_[0].eval(theta).u) + L[1] * std::conj(basis_[1].eval(theta).u);
}

cplx TwoPointKernel::operator()(int sign, double theta, double thetap) const {
    const Eigen::Vector2cd& L = sign > 0 ? Lp_ : Lm_;
    const double c = sign > 0 ? cp_ : cm_;
    return c * std::conj(ell(L, theta)) * ell(L, thetap);
}

cplx TwoPointKernel::g_kernel(double theta, double thetap) const {
    cplx s = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            s += basis_[a].eval(theta).u * Nbar_(a, b) * std::conj(basis_[b].eval(thetap).u);
    return s;
}

HadamardReport hadamard_decay(const std::vector<double>& values, double floor) {
    HadamardReport r;
    r.floor = floor;
    for (std::size_t k = 0; k < values.size(); ++k) {
        r.ks.push_back(int(k));
        r.values.push_back(values[k]);
    }
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        double a = values[k], b = values[k + 1];
        double sl = (a > 0 && b > 0) ? (std::log(b) - std::log(a)) / (std::log(double(k + 1)) - std::log(double(k)))
                                     : -std::numeric_limits<double>::infinity();
        r.slopes.push_back(sl);
    }
    if (r.slopes.empty()) return r;
    r.final_slope = r.slopes.back();
    // Superpolynomial: the last few successive slopes are all below -6, or the
    // values involved are already under the roundoff floor.
    const std::size_t n = r.slopes.size();
    const std::size_t tail = std::min<std::size_t>(3, n);
    r.pass = true;
    for (std::size_t i = n - tail; i < n; ++i) {
        bool tiny = values[i + 1] <= floor && values[i + 2] <= floor;
        r.pass = r.pass && (r.slopes[i] < -6.0 || tiny);
    }
    return r;
}

HadamardProxyResult hadamard_proxy(SigmaParam sp, int k_max, double alpha,
                                   const std::vector<std::array<double, 2>>& cap_pairs,
                                   const std::vector<std::array<double, 2>>& interior_pairs) {
    std::vector<double> vp, vm, vd;
    for (int k = 0; k <= k_max; ++k) {
        auto s = std::make_shared<const ModeSolver>(sp, k, MetricProfile::exact());
        auto src = state_sources(2024, 4, s->num());
        TwoPointKernel Kp(s, +1, alpha, src), Km(s, -1, alpha, src);
        double mp = 0.0, mm = 0.0, md = 0.0;
        for (auto [a, b] : cap_pairs) {
            mp = std::max(mp, std::abs(Kp(+1, a, b)));
            mm = std::max(mm, std::abs(Kp(-1, a, b)));
        }
        for (auto [a, b] : interior_pairs)
            for (int sg : {+1, -1}) md = std::max(md, std::abs(Kp(sg, a, b) - Km(sg, a, b)));
        vp.push_back(mp);
        vm.push_back(mm);
        vd.push_back(md);
    }
    // Roundoff floor relative to the largest kernel value seen.
    double scale = 0.0;
    for (double x : vp) scale = std::max(scale, x);
    for (double x : vm) scale = std::max(scale, x);
    const double floor = 1e-12 * scale;
    return {hadamard_decay(vp, floor), hadamard_decay(vm, floor), hadamard_decay(vd, floor)};
}

DsExplicitResult ds_two_point_explicit(const std::shared_ptr<const ModeSolver>& s, double alpha,
                                       const std::vector<SourceFunction>& belt_sources) {
    const SigmaParam sp = s->sp();
    const int k = s->k();
    const int m = int(belt_sources.size());
    std::vector<SourceFunction> src;
    for (const SourceFunction& f : belt_sources) src.push_back(restrict_to(f, Region::Belt));
    // Belt side: G_X0 f = (side + minus side -) Duhamel solves, data at S+.
    auto model = std::make_shared<const BeltModel>(sp, k);
    std::vector<BeltField> gb;
    std::vector<CapData> bd;
    for (const SourceFunction& f : src) {
        BeltField F(model);
        F.add_duhamel(1.0, +1, f);
        F.add_duhamel(-1.0, -1, f);
        bd.push_back(F.data(+1));
        gb.push_back(std::move(F));
    }
    const cplx e = std::exp(kPi * sp.sigma);
    const cplx S = scattering_matrix_cap(sp, k);
    const cplx pre = alpha / ((e - 1.0 / e) * (e - 1.0 / e));
    auto form = [&](cplx t) {
        Eigen::Matrix2cd M;
        M << 1.0, -t / S, -t * S, t * t;
        return M;
    };
    // Weights e^{+-pi sigma} of the two branch components at S+.
    const Eigen::Matrix2cd Mp = pre * e * form(1.0 / e), Mm = pre / e * form(e);
    DsExplicitResult r;
    r.lplus.resize(m, m);
    r.lminus.resize(m, m);
    r.ig_belt.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Eigen::Vector2cd ai(bd[i].aplus, bd[i].aminus), aj(bd[j].aplus, bd[j].aminus);
            r.lplus(i, j) = ai.adjoint() * Mp * aj;
            r.lminus(i, j) = ai.adjoint() * Mm * aj;
            r.ig_belt(i, j) = kI * gb[j].pair(src[i]);
        }
    if (alpha < 0.0) {
        CMatrix t = r.lplus;
        r.lplus = -r.lminus;
        r.lminus = -t;
    }
    TwoPointForm g = two_point_build(s, +1, src, alpha);
    double n = std::max(max_abs(g.lplus), max_abs(g.lminus));
    r.agreement = std::max(max_abs(r.lplus - g.lplus), max_abs(r.lminus - g.lminus)) / n;
    r.ccr_residual = max_abs(r.lplus - r.lminus - r.ig_belt) / max_abs(r.ig_belt);
    r.min_eig_plus = min_eig(r.lplus) / max_abs(r.ig_belt);
    r.min_eig_minus = min_eig(r.lminus) / max_abs(r.ig_belt);
    r.hermiticity = std::max(max_abs(r.lplus - r.lplus.adjoint()), max_abs(r.lminus - r.lminus.adjoint())) / n;
    return r;
}

DoubledCapResult doubled_cap_theory(const std::shared_ptr<const ModeSolver>& s, double alpha,
                                    const std::vector<SourceFunction>& cap_sources) {
    const SigmaParam sp = s->sp();
    const int k = s->k();
    const int m = int(cap_sources.size());
    std::vector<SourceFunction> src;
    for (const SourceFunction& f : cap_sources) src.push_back(restrict_to(f, Region::CapPlus));
    // Cap side: G_cap f and its a+ data at the boundary.
    std::vector<CapField> gc;
    std::vector<cplx> ap;
    for (const SourceFunction& f : src) {
        gc.push_back(cap_g_diff_apply(sp, k, f, +1));
        ap.push_back(gc.back().data().aplus);
    }
    DoubledCapResult r;
    r.kappa = cap_symplectic_constant(sp, k, src, &r.kappa_residual);
    r.ig_cap.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r.ig_cap(i, j) = kI * gc[j].pair(src[i]);
    // Doubled-cap sources: (f_i, 0) then (0, f_i). Copy 1 goes to the branch
    // with positive symplectic weight, copy 2 to the other one; [P, Q] U then
    // gives a global source whose G-image is that solution.
    const Eigen::Vector2d w = alpha * symplectic_weights(sp.sigma, +1);
    const int pos = w[0] > 0 ? 0 : 1;
    const double lpos = std::sqrt(std::abs(r.kappa / w[pos])), lneg = std::sqrt(std::abs(r.kappa / w[1 - pos]));
    std::vector<SourceFunction> glob;
    for (int copy = 0; copy < 2; ++copy)
        for (int i = 0; i < m; ++i) {
            cplx comp[2] = {0.0, 0.0};
            if (copy == 0) comp[pos] = lpos * ap[i];
            else comp[1 - pos] = lneg * ap[i];
            glob.push_back(commutator_source(globe_poisson(s, {comp[0], comp[1]}, +1), s->mc()));
        }
    TwoPointForm tp = two_point_build(s, +1, glob, alpha);
    r.lplus = tp.lplus;
    r.lminus = tp.lminus;
    double diag = std::max(max_abs(tp.lplus), max_abs(tp.lminus)), off = 0.0;
    for (int i = 0; i < 2 * m; ++i)
        for (int j = 0; j < 2 * m; ++j) {
            bool same_copy = (i < m) == (j < m);
            if (!same_copy) off = std::max({off, std::abs(tp.lplus(i, j)), std::abs(tp.lminus(i, j))});
            // Lambda+ lives on copy 1 and Lambda- on copy 2 only.
            if (same_copy && i >= m) off = std::max(off, std::abs(tp.lplus(i, j)));
            if (same_copy && i < m) off = std::max(off, std::abs(tp.lminus(i, j)));
        }
    r.off_block = off / diag;
    const double n = max_abs(r.ig_cap);
    r.plus_block_error = max_abs(tp.lplus.topLeftCorner(m, m) - r.ig_cap) / n;
    r.minus_block_error = max_abs(tp.lminus.bottomRightCorner(m, m) - r.ig_cap) / n;
    CMatrix target = CMatrix::Zero(2 * m, 2 * m);
    target.topLeftCorner(m, m) = r.ig_cap;
    target.bottomRightCorner(m, m) = -r.ig_cap;
    r.difference_error = max_abs(tp.lplus - tp.lminus - target) / n;
    return r;
}

}  // namespace hzl

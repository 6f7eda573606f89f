#include "horizonlab/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "horizonlab/chebyshev.hpp"
#include "horizonlab/errors.hpp"

namespace hzl {

cplx SourceFunction::operator()(double theta) const {
    cplx s = 0.0;
    for (const Bump& b : bumps) {
        double x = (theta - b.center) / b.width;
        if (std::abs(x) >= 1.0) continue;
        s += b.amp * std::exp(1.0 - 1.0 / (1.0 - x * x)) * std::exp(kI * (b.freq * theta));
    }
    if (custom && theta > custom_lo && theta < custom_hi) s += custom(theta);
    return s;
}

double SourceFunction::sup_norm() const {
    double m = 0;
    for (int i = 0; i <= 4000; ++i) m = std::max(m, std::abs((*this)(kPi * i / 4000.0)));
    return m;
}

namespace {
void flag_interval(SourceFunction& f, double lo, double hi) {
    if (lo < kThetaHorizonPlus) f.cap_plus = true;
    if (hi > kThetaHorizonPlus && lo < kThetaHorizonMinus) f.belt = true;
    if (hi > kThetaHorizonMinus) f.cap_minus = true;
}
}  // namespace

SourceFunction make_source(std::vector<Bump> bumps) {
    SourceFunction f;
    for (const Bump& b : bumps) flag_interval(f, b.center - b.width, b.center + b.width);
    f.bumps = std::move(bumps);
    return f;
}

SourceFunction make_source(std::function<cplx(double)> fn, double lo, double hi) {
    SourceFunction f;
    f.custom = std::move(fn);
    f.custom_lo = lo;
    f.custom_hi = hi;
    flag_interval(f, lo, hi);
    return f;
}

SourceFunction operator+(const SourceFunction& a, const SourceFunction& b) {
    SourceFunction r;
    r.bumps = a.bumps;
    r.bumps.insert(r.bumps.end(), b.bumps.begin(), b.bumps.end());
    if (a.custom && b.custom) {
        auto fa = a, fb = b;
        fa.bumps.clear();
        fb.bumps.clear();
        r.custom = [fa, fb](double th) { return fa(th) + fb(th); };
        r.custom_lo = std::min(a.custom_lo, b.custom_lo);
        r.custom_hi = std::max(a.custom_hi, b.custom_hi);
    } else if (a.custom || b.custom) {
        const SourceFunction& c = a.custom ? a : b;
        r.custom = c.custom;
        r.custom_lo = c.custom_lo;
        r.custom_hi = c.custom_hi;
    }
    r.cap_plus = a.cap_plus || b.cap_plus;
    r.belt = a.belt || b.belt;
    r.cap_minus = a.cap_minus || b.cap_minus;
    return r;
}

bool source_span(const SourceFunction& f, double lo, double hi, double& a, double& b) {
    a = hi;
    b = lo;
    auto add = [&](double l, double h) {
        l = std::max(l, lo);
        h = std::min(h, hi);
        if (h <= l) return;
        a = std::min(a, l);
        b = std::max(b, h);
    };
    for (const Bump& bp : f.bumps) add(bp.center - bp.width, bp.center + bp.width);
    if (f.custom) add(f.custom_lo, f.custom_hi);
    return b > a;
}

SourceFunction restrict_to(const SourceFunction& f, Region r) {
    double lo = 0, hi = kPi;
    if (r == Region::CapPlus) hi = kThetaHorizonPlus;
    else if (r == Region::Belt) lo = kThetaHorizonPlus, hi = kThetaHorizonMinus;
    else if (r == Region::CapMinus) lo = kThetaHorizonMinus;
    else throw DomainError("restrict_to needs an open region");
    auto classify = [&](double l, double h) {
        if (h <= lo || l >= hi) return false;
        if (l < lo || h > hi) throw SourceError("source term straddles a horizon");
        return true;
    };
    std::vector<Bump> keep;
    for (const Bump& b : f.bumps)
        if (classify(b.center - b.width, b.center + b.width)) keep.push_back(b);
    SourceFunction out = make_source(std::move(keep));
    if (f.custom && classify(f.custom_lo, f.custom_hi)) out = out + make_source(f.custom, f.custom_lo, f.custom_hi);
    return out;
}

SourceFunction operator*(cplx c, const SourceFunction& a) {
    SourceFunction r = a;
    for (Bump& b : r.bumps) b.amp *= c;
    if (a.custom) {
        auto fn = a.custom;
        r.custom = [fn, c](double th) { return c * fn(th); };
    }
    return r;
}

void validate_source(const SourceFunction& f, const Numerics& num) {
    for (const Bump& b : f.bumps) {
        if (b.width <= 0) throw SourceError("bump width must be positive");
        if (b.center - b.width < num.pole_patch - 1e-14 || b.center + b.width > kPi - num.pole_patch + 1e-14)
            throw SourceError("source must vanish in the pole patches");
    }
    if (f.custom && (f.custom_lo < num.pole_patch - 1e-14 || f.custom_hi > kPi - num.pole_patch + 1e-14))
        throw SourceError("source must vanish in the pole patches");
    for (int i = 0; i <= 4000; ++i) {
        double th = kPi * i / 4000.0;
        Region r = region_of_theta(th);
        bool allowed = (r == Region::CapPlus && f.cap_plus) || (r == Region::Belt && f.belt) ||
                       (r == Region::CapMinus && f.cap_minus) || r == Region::HorizonPlus ||
                       r == Region::HorizonMinus;
        if (!allowed && std::abs(f(th)) > 1e-14) throw SourceError("source support inconsistent with flags");
    }
}

std::vector<SourceFunction> random_sources(std::uint64_t seed, int count, RegionMask mask, const Numerics& num) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    double lo = num.pole_patch, hi = kPi - num.pole_patch, wmin = 0.12, wmax = 0.3;
    const double margin = 0.02;
    switch (mask) {
        case RegionMask::All: break;
        case RegionMask::CapPlus: hi = kThetaHorizonPlus - margin; wmin = 0.08; wmax = 0.2; break;
        case RegionMask::Belt: lo = kThetaHorizonPlus + margin; hi = kThetaHorizonMinus - margin; break;
        case RegionMask::CapMinus: lo = kThetaHorizonMinus + margin; wmin = 0.08; wmax = 0.2; break;
    }
    std::vector<SourceFunction> out;
    for (int s = 0; s < count; ++s) {
        std::vector<Bump> bumps;
        for (int j = 0; j < 3; ++j) {
            double w = wmin + (wmax - wmin) * U(rng);
            double c = lo + w + (hi - lo - 2 * w) * U(rng);
            cplx amp(N(rng), N(rng));
            double fr = -3.0 + 6.0 * U(rng);
            bumps.push_back({c, w, amp, fr});
        }
        out.push_back(make_source(std::move(bumps)));
    }
    return out;
}

std::shared_ptr<const ParticularPieces> make_particular(const ModeSolver& s, const SourceFunction& f) {
    validate_source(f, s.num());
    auto p = std::make_shared<ParticularPieces>();
    p->src = f;
    const HorizonBasis& hp = s.horizon(+1);
    const HorizonBasis& hm = s.horizon(-1);
    std::function<cplx(double)> fn = [&f](double th) { return f(th); };
    p->hp = hp.particular(fn);
    p->hm = hm.particular(fn);
    const double tp = s.num().pole_patch;
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 1);

    p->capP = integrate_panels(s.mc(), tp, hp.theta_cap(), zero, {fn}, s.num());
    Jet y = p->capP.eval(hp.theta_cap(), 0), h = hp.eval(p->hp, hp.theta_cap());
    std::tie(p->ap_plus, p->bp_plus) = hp.decompose(hp.theta_cap(), y.u - h.u, y.du - h.du);

    Eigen::MatrixXcd init(2, 1);
    h = hp.eval(p->hp, hp.theta_belt());
    init << h.u, h.du;
    p->belt = integrate_panels(s.mc(), hp.theta_belt(), hm.theta_belt(), init, {fn}, s.num());
    y = p->belt.eval(hm.theta_belt(), 0);
    h = hm.eval(p->hm, hm.theta_belt());
    std::tie(p->a_off, p->b_off) = hm.decompose(hm.theta_belt(), y.u - h.u, y.du - h.du);

    p->capM = integrate_panels(s.mc(), kPi - tp, hm.theta_cap(), zero, {fn}, s.num());
    y = p->capM.eval(hm.theta_cap(), 0);
    h = hm.eval(p->hm, hm.theta_cap());
    std::tie(p->ap_minus, p->bp_minus) = hm.decompose(hm.theta_cap(), y.u - h.u, y.du - h.du);
    return p;
}

cplx GlobalSolution::cap_plus_multiple() const {
    const ModeSolver& S = *solver;
    cplx ap = part ? pw * part->ap_plus : cplx(0.0), bp = part ? pw * part->bp_plus : cplx(0.0);
    if (std::abs(S.A_plus()) >= std::abs(S.B_plus())) return (x[0] - ap) / S.A_plus();
    return (x[1] - bp) / S.B_plus();
}

cplx GlobalSolution::cap_minus_multiple() const {
    const ModeSolver& S = *solver;
    cplx ap = part ? pw * part->ap_minus : cplx(0.0), bp = part ? pw * part->bp_minus : cplx(0.0);
    if (std::abs(S.A_minus()) >= std::abs(S.B_minus())) return (x[4] - ap) / S.A_minus();
    return (x[5] - bp) / S.B_minus();
}

HorizonCoefficients GlobalSolution::coefficients(int which) const {
    if (which > 0) return {x[0], x[1], x[2], x[3]};
    const Eigen::Matrix2cd& T = solver->transfer();
    cplx ao = part ? pw * part->a_off : cplx(0.0), bo = part ? pw * part->b_off : cplx(0.0);
    cplx al = T(0, 0) * x[2] + T(0, 1) * x[3] + ao;
    cplx be = T(1, 0) * x[2] + T(1, 1) * x[3] + bo;
    return {x[4], x[5], al, be};
}

AsymptoticData GlobalSolution::data(int which) const {
    HorizonCoefficients c = coefficients(which);
    auto [ap, am] = branch_split(c.beta_cap, c.beta_belt, solver->sp().sigma);
    return {ap, am};
}

Jet GlobalSolution::eval(double theta) const {
    const ModeSolver& S = *solver;
    const HorizonBasis& hp = S.horizon(+1);
    const HorizonBasis& hm = S.horizon(-1);
    const double tp = S.num().pole_patch;
    const bool hasp = part && pw != 0.0;
    if (theta < tp) return cap_plus_multiple() * S.pole().eval(+1, theta);
    if (theta <= hp.theta_cap()) {
        Jet j = cap_plus_multiple() * S.cap_plus().eval(theta, 0);
        return hasp ? j + pw * part->capP.eval(theta, 0) : j;
    }
    if (theta == kThetaHorizonPlus || theta == kThetaHorizonMinus)
        throw DomainError("solution evaluated on a horizon");
    if (theta < hp.theta_belt()) {
        bool cap = theta < kThetaHorizonPlus;
        Jet j = (cap ? x[0] : x[2]) * hp.phi0(theta) + (cap ? x[1] : x[3]) * hp.psi(theta);
        return hasp ? j + pw * hp.eval(part->hp, theta) : j;
    }
    if (theta <= hm.theta_belt()) {
        Jet j = x[2] * S.belt().eval(theta, 0) + x[3] * S.belt().eval(theta, 1);
        return hasp ? j + pw * part->belt.eval(theta, 0) : j;
    }
    if (theta < hm.theta_cap()) {
        HorizonCoefficients c = coefficients(-1);
        bool cap = theta > kThetaHorizonMinus;
        Jet j = (cap ? c.alpha_cap : c.alpha_belt) * hm.phi0(theta) + (cap ? c.beta_cap : c.beta_belt) * hm.psi(theta);
        return hasp ? j + pw * hm.eval(part->hm, theta) : j;
    }
    if (theta <= kPi - tp) {
        Jet j = cap_minus_multiple() * S.cap_minus().eval(theta, 0);
        return hasp ? j + pw * part->capM.eval(theta, 0) : j;
    }
    return cap_minus_multiple() * S.pole().eval(-1, theta);
}

cplx GlobalSolution::pair(const SourceFunction& g) const {
    const ModeSolver& S = *solver;
    const double tp = S.num().pole_patch;
    const auto& gl = gauss_legendre(20);
    const bool hasp = part && pw != 0.0;
    auto integrate_theta = [&](double a, double b) {
        cplx acc = 0.0;
        std::vector<double> mesh = graded_mesh(a, b, 0.05);
        for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
            double c = 0.5 * (mesh[i] + mesh[i + 1]), h = 0.5 * (mesh[i + 1] - mesh[i]);
            for (auto [xq, wq] : gl) {
                double th = c + h * xq;
                cplx gv = g(th);
                if (gv == 0.0) continue;
                acc += wq * h * std::conj(gv) * eval(th).u * std::sin(th);
            }
        }
        return acc;
    };
    cplx total = 0.0;
    // Sources vanish in the pole patches; the integrals there are skipped only
    // when that is verified.
    for (auto [a, b] : {std::pair{0.0, tp}, std::pair{kPi - tp, kPi}}) {
        bool zero = true;
        for (int i = 0; i <= 64 && zero; ++i) zero = g(a + (b - a) * i / 64.0) == 0.0;
        if (!zero) total += integrate_theta(a, b);
    }
    const HorizonBasis& hp = S.horizon(+1);
    const HorizonBasis& hm = S.horizon(-1);
    total += integrate_theta(tp, hp.theta_cap());
    total += integrate_theta(hp.theta_belt(), hm.theta_belt());
    total += integrate_theta(hm.theta_cap(), kPi - tp);

    const cplx sigma = S.sp().sigma;
    for (int which : {+1, -1}) {
        const HorizonBasis& hb = S.horizon(which);
        const double d = hb.delta();
        HorizonCoefficients c = coefficients(which);
        auto jac = [&](double v) {
            double th = hb.theta_of_v(v);
            return std::sin(th) / (2.0 * std::abs(std::sin(2.0 * th)));
        };
        // Smooth parts on both sides by Gauss-Legendre in v.
        for (int side : {+1, -1}) {
            cplx alpha = side > 0 ? c.alpha_cap : c.alpha_belt;
            double c0 = 0.5 * side * d, h = 0.5 * d;
            for (auto [xq, wq] : gl) {
                double v = c0 + h * xq;
                double th = hb.theta_of_v(v);
                cplx gv = g(th);
                if (gv == 0.0) continue;
                cplx u = alpha * hb.phi0(th).u;
                if (hasp) u += pw * hb.eval(which > 0 ? part->hp : part->hm, th).u;
                total += wq * h * std::conj(gv) * u * jac(v);
            }
        }
        // Singular part: |v|^{-i sigma} times an analytic function integrated
        // term by term.
        const Series& phi1 = hb.phi1_series().coeffs;
        Series H = cheb_fit_monomial(
            [&](double v) {
                double th = hb.theta_of_v(v);
                return ps_eval(phi1, v / d) * std::conj(g(th)) * jac(v);
            },
            0.0, d, 24);
        cplx dpow = std::exp((1.0 - kI * sigma) * std::log(d));
        cplx icap = 0.0, ibelt = 0.0;
        for (std::size_t j = 0; j < H.size(); ++j) {
            cplx term = H[j] * dpow / (double(j) + 1.0 - kI * sigma);
            icap += term;
            ibelt += (j % 2 ? -1.0 : 1.0) * term;
        }
        total += c.beta_cap * icap + c.beta_belt * ibelt;
    }
    return total;
}

SolutionSample GlobalSolution::sample(const std::vector<double>& grid) const {
    SolutionSample s;
    s.grid = grid;
    for (double th : grid) {
        Jet j = eval(th);
        s.u.push_back(j.u);
        s.du.push_back(j.du);
    }
    return s;
}

double GlobalSolution::residual() const {
    const ModeSolver& S = *solver;
    std::vector<double> pts;
    auto add_panels = [&](const PanelSolution& ps) {
        for (const Panel& p : ps.panels) {
            double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
            for (int j = 0; j < ps.n; ++j) pts.push_back(c + h * std::cos(kPi * (2 * j + 1) / (2.0 * ps.n)));
        }
    };
    add_panels(S.cap_plus());
    add_panels(S.belt());
    add_panels(S.cap_minus());
    if (part && pw != 0.0) {
        add_panels(part->capP);
        add_panels(part->belt);
        add_panels(part->capM);
    }
    for (int which : {+1, -1}) {
        const HorizonBasis& hb = S.horizon(which);
        for (double f : {0.1, 0.3, 0.6, 0.9})
            for (int side : {+1, -1}) pts.push_back(hb.theta_of_v(side * f * hb.delta()));
    }
    for (double t : {0.03, 0.08, 0.12}) {
        pts.push_back(t);
        pts.push_back(kPi - t);
    }
    double worst = 0;
    for (double th : pts) {
        Jet j = eval(th);
        double a2;
        cplx a1, a0;
        S.mc().theta_coeffs(th, a2, a1, a0);
        cplx r = a2 * j.d2u + a1 * j.du + a0 * j.u;
        if (part && pw != 0.0) r -= pw * part->src(th);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

namespace {
GlobalSolution combine(cplx ca, const GlobalSolution& a, cplx cb, const GlobalSolution& b) {
    if (a.solver != b.solver) throw NumericalError("cannot combine solutions of different modes");
    if (a.part && b.part && a.part != b.part && a.pw != 0.0 && b.pw != 0.0)
        throw NumericalError("cannot combine solutions with different particular pieces");
    GlobalSolution r;
    r.solver = a.solver;
    r.part = (a.part && a.pw != 0.0) ? a.part : b.part;
    r.pw = ca * a.pw + cb * b.pw;
    r.x = ca * a.x + cb * b.x;
    return r;
}
}  // namespace

GlobalSolution operator+(const GlobalSolution& a, const GlobalSolution& b) { return combine(1.0, a, 1.0, b); }
GlobalSolution operator-(const GlobalSolution& a, const GlobalSolution& b) { return combine(1.0, a, -1.0, b); }
GlobalSolution operator*(cplx c, const GlobalSolution& a) {
    GlobalSolution r = a;
    r.pw *= c;
    r.x *= c;
    return r;
}

std::array<GlobalSolution, 2> homogeneous_basis(const std::shared_ptr<const ModeSolver>& s) {
    std::array<GlobalSolution, 2> out;
    const Eigen::Matrix2cd& T = s->transfer();
    for (int c = 0; c < 2; ++c) {
        GlobalSolution g;
        g.solver = s;
        cplx ab = c == 0 ? 1.0 : 0.0, bb = c == 0 ? 0.0 : 1.0;
        g.x[0] = ab;
        g.x[1] = s->B_plus() * ab / s->A_plus();
        g.x[2] = ab;
        g.x[3] = bb;
        g.x[4] = T(0, 0) * ab + T(0, 1) * bb;
        g.x[5] = s->B_minus() * g.x[4] / s->A_minus();
        out[c] = g;
    }
    return out;
}

std::vector<double> default_grid(const ModeSolver& s, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        double th = kPi * (i + 0.5) / n;
        if (std::abs(std::cos(2.0 * th)) < s.num().standoff) continue;
        g.push_back(th);
    }
    return g;
}

ModeGreens::ModeGreens(std::shared_ptr<const ModeSolver> s, BranchLabel I)
    : s_(std::move(s)), I_(I), cm_(connection_matrix(*s_, I, false)) {
    if (cm_.det_normalized < 1e-10) throw PoleDetected("sigma is at or near a pole for label " + I.name());
    lu_.compute(cm_.M);
}

GlobalSolution ModeGreens::solve(const std::shared_ptr<const ParticularPieces>& p) const {
    const ModeSolver& S = *s_;
    Eigen::Matrix<cplx, 6, 1> rhs;
    rhs << S.B_plus() * p->ap_plus - S.A_plus() * p->bp_plus, S.B_minus() * p->ap_minus - S.A_minus() * p->bp_minus,
        0.0, p->a_off, 0.0, (I_ == BranchLabel::advanced()) ? cplx(0.0) : -p->b_off;
    GlobalSolution g;
    g.solver = s_;
    g.part = p;
    g.pw = 1.0;
    g.x = lu_.solve(rhs);
    return g;
}

GlobalSolution ModeGreens::solve(const SourceFunction& f) const { return solve(make_particular(*s_, f)); }

ModeGreens build_inverse(const std::shared_ptr<const ModeSolver>& s, BranchLabel I) { return ModeGreens(s, I); }

ModeGreens build_inverse(SigmaParam sp, int k, BranchLabel I, const MetricProfile& profile, Numerics num) {
    return ModeGreens(std::make_shared<const ModeSolver>(sp, k, profile, num), I);
}

InverseResult apply_inverse(const ModeGreens& g, const SourceFunction& f) {
    InverseResult r;
    r.solution = g.solve(f);
    r.residual = r.solution.residual();
    double fn = f.sup_norm();
    if (r.residual > 1e-6 * std::max(fn, 1e-300) && fn > 0)
        throw ResidualTooLarge("operator residual " + std::to_string(r.residual));
    r.sample = r.solution.sample(default_grid(g.solver()));
    r.plus = r.solution.data(+1);
    r.minus = r.solution.data(-1);
    return r;
}

GDiff::GDiff(const std::shared_ptr<const ModeSolver>& s)
    : plus_(s, BranchLabel::advanced()), minus_(s, BranchLabel::retarded()) {}

GlobalSolution GDiff::apply(const std::shared_ptr<const ParticularPieces>& p) const {
    return plus_.solve(p) - minus_.solve(p);
}

GlobalSolution GDiff::apply(const SourceFunction& f) const {
    return apply(make_particular(plus_.solver(), f));
}

GDiff g_diff(const std::shared_ptr<const ModeSolver>& s) { return GDiff(s); }

CMatrix gram(const std::vector<SourceFunction>& sources, const std::vector<GlobalSolution>& images) {
    CMatrix M(sources.size(), images.size());
    for (std::size_t j = 0; j < images.size(); ++j)
        for (std::size_t i = 0; i < sources.size(); ++i) M(i, j) = images[j].pair(sources[i]);
    return M;
}

CMatrix inverse_gram(const ModeGreens& g, const std::vector<SourceFunction>& sources) {
    std::vector<GlobalSolution> im;
    for (const auto& f : sources) im.push_back(g.solve(f));
    return gram(sources, im);
}

PositivityReport feynman_positivity(const std::shared_ptr<const ModeSolver>& s,
                                    const std::vector<SourceFunction>& sources) {
    ModeGreens F(s, BranchLabel::feynman()), AF(s, BranchLabel::anti_feynman());
    std::vector<GlobalSolution> im;
    for (const auto& f : sources) {
        auto p = make_particular(*s, f);
        im.push_back(F.solve(p) - AF.solve(p));
    }
    PositivityReport r;
    r.form = -kI * gram(sources, im);
    double nrm = r.form.norm();
    r.hermiticity = nrm > 0 ? (r.form - r.form.adjoint()).norm() / nrm : 0.0;
    CMatrix H = 0.5 * (r.form + r.form.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    r.eigenvalues = es.eigenvalues();
    return r;
}

namespace {

struct DetEval {
    cplx analytic = 0.0;
    double normalized = std::numeric_limits<double>::quiet_NaN();
};

DetEval det_at(cplx sigma, int k, BranchLabel I, const MetricProfile& profile, const Numerics& num) {
    DetEval d;
    try {
        ModeSolver s({sigma}, k, profile, num);
        ConnectionMatrix cm = connection_matrix(s, I, false);
        d.analytic = cm.det_analytic;
        d.normalized = cm.det_normalized;
    } catch (const Error&) {
    }
    return d;
}

// Muller iteration on the analytic determinant.
bool muller(cplx x0, double h, int k, BranchLabel I, const MetricProfile& profile, const Numerics& num,
            cplx& root) {
    cplx x[3] = {x0 - h, x0 + h, x0 + kI * h};
    cplx f[3];
    for (int i = 0; i < 3; ++i) f[i] = det_at(x[i], k, I, profile, num).analytic;
    for (int it = 0; it < 60; ++it) {
        cplx h1 = x[1] - x[0], h2 = x[2] - x[1];
        cplx d1 = (f[1] - f[0]) / h1, d2 = (f[2] - f[1]) / h2;
        cplx a = (d2 - d1) / (h2 + h1);
        cplx b = a * h2 + d2;
        cplx disc = std::sqrt(b * b - 4.0 * f[2] * a);
        cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
        if (den == 0.0) return false;
        cplx dx = -2.0 * f[2] / den;
        cplx xn = x[2] + dx;
        x[0] = x[1];
        f[0] = f[1];
        x[1] = x[2];
        f[1] = f[2];
        x[2] = xn;
        f[2] = det_at(xn, k, I, profile, num).analytic;
        if (std::abs(dx) < 1e-12 * std::max(1.0, std::abs(xn))) {
            root = xn;
            return true;
        }
        if (!std::isfinite(std::abs(xn))) return false;
    }
    return false;
}

}  // namespace

std::vector<PoleEstimate> pole_scan(int k, BranchLabel I, cplx corner0, cplx corner1, int n_grid,
                                    const MetricProfile& profile, Numerics num) {
    return pole_scan(k, I, corner0, corner1, n_grid, n_grid, profile, num);
}

std::vector<PoleEstimate> pole_scan(int k, BranchLabel I, cplx corner0, cplx corner1, int n_re, int n_im,
                                    const MetricProfile& profile, Numerics num) {
    const double re0 = std::min(corner0.real(), corner1.real()), re1 = std::max(corner0.real(), corner1.real());
    const double im0 = std::min(corner0.imag(), corner1.imag()), im1 = std::max(corner0.imag(), corner1.imag());
    const bool line = im1 - im0 < 1e-14;
    const int nr = std::max(1, n_re), ni = line ? 1 : std::max(1, n_im);
    auto node = [&](int a, int b) {
        double re = nr > 1 ? re0 + (re1 - re0) * a / (nr - 1) : re0;
        double im = ni > 1 ? im0 + (im1 - im0) * b / (ni - 1) : im0;
        return cplx(re, im);
    };
    std::vector<double> D(nr * ni);
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < ni; ++b) D[a * ni + b] = det_at(node(a, b), k, I, profile, num).normalized;
    const double h = std::max((re1 - re0) / std::max(nr - 1, 1), line ? 0.0 : (im1 - im0) / std::max(ni - 1, 1));
    std::vector<PoleEstimate> poles;
    for (int a = 0; a < nr; ++a) {
        for (int b = 0; b < ni; ++b) {
            double d = D[a * ni + b];
            if (!std::isfinite(d)) continue;
            bool minimum = true;
            for (int da = -1; da <= 1 && minimum; ++da)
                for (int db = -1; db <= 1; ++db) {
                    if (!da && !db) continue;
                    int aa = a + da, bb = b + db;
                    if (aa < 0 || aa >= nr || bb < 0 || bb >= ni) continue;
                    double e = D[aa * ni + bb];
                    if (std::isfinite(e) && e < d) {
                        minimum = false;
                        break;
                    }
                }
            if (!minimum) continue;
            if (line && d > 1e-4) continue;
            cplx root;
            if (!muller(node(a, b), 0.25 * h, k, I, profile, num, root)) continue;
            const double tol = 1e-6;
            if (root.real() < re0 - tol || root.real() > re1 + tol || root.imag() < im0 - tol ||
                root.imag() > im1 + tol)
                continue;
            DetEval at = det_at(root, k, I, profile, num);
            if (!(at.normalized < 1e-8)) continue;
            bool dup = false;
            for (const auto& p : poles) dup = dup || std::abs(p.sigma - root) < 1e-6;
            if (dup) continue;
            // Order from the decay of |det| toward the root.
            double e1 = std::abs(det_at(root + 1e-3, k, I, profile, num).analytic);
            double e2 = std::abs(det_at(root + 1e-4, k, I, profile, num).analytic);
            int order = int(std::lround(std::log10(e1 / e2)));
            poles.push_back({root, at.normalized, order});
        }
    }
    std::sort(poles.begin(), poles.end(), [](const PoleEstimate& p, const PoleEstimate& q) {
        return p.sigma.imag() != q.sigma.imag() ? p.sigma.imag() < q.sigma.imag() : p.sigma.real() < q.sigma.real();
    });
    return poles;
}

double min_real_det(int k, BranchLabel I, double s0, double s1, int n_grid, const MetricProfile& profile,
                    Numerics num) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_grid; ++i) {
        double s = n_grid > 1 ? s0 + (s1 - s0) * i / (n_grid - 1) : s0;
        m = std::min(m, det_at(s, k, I, profile, num).normalized);
    }
    return m;
}

}  // namespace hzl

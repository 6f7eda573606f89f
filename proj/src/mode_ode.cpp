#include "horizonlab/mode_ode.hpp"

#include <algorithm>
#include <cmath>

#include "horizonlab/chebyshev.hpp"
#include "horizonlab/errors.hpp"

namespace hzl {

cplx transmission_coefficient(Branch b, cplx sigma) {
    return b == Branch::PlusI0 ? std::exp(kPi * sigma) : std::exp(-kPi * sigma);
}

std::string BranchLabel::name() const {
    if (!plus && !minus) return "feynman";
    if (plus && minus) return "anti_feynman";
    return plus ? "advanced" : "retarded";
}

const std::vector<BranchLabel>& all_branch_labels() {
    static const std::vector<BranchLabel> all = {BranchLabel::feynman(), BranchLabel::anti_feynman(),
                                                 BranchLabel::advanced(), BranchLabel::retarded()};
    return all;
}

Jet operator+(const Jet& a, const Jet& b) { return {a.u + b.u, a.du + b.du, a.d2u + b.d2u}; }
Jet operator*(cplx c, const Jet& a) { return {c * a.u, c * a.du, c * a.d2u}; }

namespace {

void check_indicial(cplx sigma) {
    cplx is = kI * sigma;
    double dist = std::abs(is - std::round(is.real()));
    if (dist < 1e-8) throw IndicialResonance("i sigma is (near) an integer");
}

// Series value and first two derivatives.
void series_jet(const Series& a, double t, cplx& s0, cplx& s1, cplx& s2) {
    s0 = s1 = s2 = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) {
        s2 = s2 * t + 2.0 * s1;
        s1 = s1 * t + s0;
        s0 = s0 * t + a[i];
    }
}

}  // namespace

FrobeniusSolution frobenius_expand(const ModeCoefficients& mc, cplx exponent, std::size_t J, double scale) {
    check_indicial(mc.sp().sigma);
    if (J < 8) throw RecurrenceBreakdown("Frobenius order must be at least 8");
    Series A, B, C;
    mc.horizon_series(scale, J + 1, A, B, C);
    return frobenius_solve(A, B, C, exponent, J);
}

HorizonBasis::HorizonBasis(const ModeCoefficients& mc, int which, const Numerics& num)
    : which_(which), delta_(num.standoff), fit_(num.source_fit), J_(num.frob_order) {
    check_indicial(mc.sp().sigma);
    mc.horizon_series(delta_, J_ + 1, A_, B_, C_);
    phi0_ = frobenius_solve(A_, B_, C_, 0.0, J_);
    phi1_ = frobenius_solve(A_, B_, C_, -kI * mc.sp().sigma, J_);
    theta_cap_ = theta_of_v(delta_);
    theta_belt_ = theta_of_v(-delta_);
}

double HorizonBasis::theta_of_v(double v) const {
    double t = 0.5 * std::acos(v);
    return which_ > 0 ? t : kPi - t;
}

Jet HorizonBasis::eval(const FrobeniusSolution& s, double theta) const {
    double v = std::cos(2.0 * theta);
    cplx S, S1, S2;
    series_jet(s.coeffs, v / delta_, S, S1, S2);
    S1 /= delta_;
    S2 /= delta_ * delta_;
    cplx u, uv, uvv;
    if (s.exponent == 0.0) {
        u = S;
        uv = S1;
        uvv = S2;
    } else {
        cplx e = s.exponent;
        cplx E = std::exp(e * std::log(std::abs(v)));
        u = E * S;
        uv = E * (e / v * S + S1);
        uvv = E * (e * (e - 1.0) / (v * v) * S + 2.0 * e / v * S1 + S2);
    }
    double g1 = -2.0 * std::sin(2.0 * theta), g2 = -4.0 * v;
    return {u, uv * g1, uvv * g1 * g1 + uv * g2};
}

FrobeniusSolution HorizonBasis::particular(const std::function<cplx(double)>& f) const {
    Series F = cheb_fit_monomial([&](double v) { return f(theta_of_v(v)); }, 0.0, delta_, fit_);
    Series R(F.size() + 1, 0.0);
    for (std::size_t i = 0; i < F.size(); ++i) R[i + 1] = delta_ * F[i];
    return frobenius_solve(A_, B_, C_, 0.0, J_, R);
}

std::pair<cplx, cplx> HorizonBasis::decompose(double theta, cplx u, cplx du) const {
    Jet p = phi0(theta), q = psi(theta);
    cplx det = p.u * q.du - q.u * p.du;
    if (std::abs(det) == 0.0) throw NumericalError("degenerate horizon basis");
    return {(u * q.du - q.u * du) / det, (p.u * du - u * p.du) / det};
}

PoleBasis::PoleBasis(const ModeCoefficients& mc, const Numerics& num) {
    Series A, B, C;
    mc.pole_series(num.frob_order + 1, A, B, C);
    reg_ = frobenius_solve(A, B, C, 0.5 * std::abs(mc.k()), num.frob_order);
}

Jet PoleBasis::eval(int /*which*/, double theta) const {
    double s = std::sin(theta);
    double t = 2.0 * s * s;
    cplx S, S1, S2;
    series_jet(reg_.coeffs, t, S, S1, S2);
    cplx u, ut, utt;
    double e = reg_.exponent.real();
    if (e == 0.0) {
        u = S;
        ut = S1;
        utt = S2;
    } else {
        double E = std::pow(t, e);
        u = E * S;
        ut = E * (e / t * S + S1);
        utt = E * (e * (e - 1.0) / (t * t) * S + 2.0 * e / t * S1 + S2);
    }
    double g1 = 2.0 * std::sin(2.0 * theta), g2 = 4.0 * std::cos(2.0 * theta);
    return {u, ut * g1, utt * g1 * g1 + ut * g2};
}

bool PanelSolution::contains(double theta) const {
    return !panels.empty() && theta >= lo() && theta <= hi();
}

Jet PanelSolution::eval(double theta, int col) const {
    if (!contains(theta)) throw DomainError("panel solution evaluated outside its interval");
    auto it = std::upper_bound(panels.begin(), panels.end(), theta,
                               [](double t, const Panel& p) { return t < p.a; });
    const Panel& p = (it == panels.begin()) ? *it : *std::prev(it);
    const ChebBasis& cb = cheb_basis(n);
    double xi = std::clamp((2.0 * theta - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    Eigen::VectorXd w = cheb_interp_row(cb, xi);
    return {w.dot(p.U.col(col)), w.dot(p.Up.col(col)), w.dot(p.Upp.col(col))};
}

std::vector<double> graded_mesh(double lo, double hi, double h_max) {
    auto dist = [](double a, double b) {
        double d = 1e300;
        for (double h : {kThetaHorizonPlus, kThetaHorizonMinus}) {
            if (h >= a && h <= b) return 0.0;
            d = std::min({d, std::abs(a - h), std::abs(b - h)});
        }
        return d;
    };
    if (!(lo < hi) || dist(lo, hi) == 0.0) throw DomainError("graded mesh interval must lie inside one region");
    std::vector<double> pts{lo};
    std::vector<std::pair<double, double>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        double w = b - a;
        if (w <= h_max && w <= dist(a, b)) {
            pts.push_back(b);
            continue;
        }
        double m = 0.5 * (a + b);
        stack.push_back({m, b});
        stack.push_back({a, m});
    }
    return pts;
}

PanelSolution integrate_panels(const ModeCoefficients& mc, double theta0, double theta1,
                               const Eigen::MatrixXcd& init,
                               const std::vector<std::function<cplx(double)>>& sources,
                               const Numerics& num) {
    const int n = num.panel_n;
    const ChebBasis& cb = cheb_basis(n);
    const int ncol = int(init.cols());
    const bool forward = theta1 > theta0;
    PanelSolution out;
    out.n = n;
    out.ncol = ncol;
    if (theta0 == theta1) return out;
    std::vector<double> mesh = graded_mesh(std::min(theta0, theta1), std::max(theta0, theta1), num.h_max);
    // Work list in traversal order (back of the vector is next).
    std::vector<std::pair<double, double>> todo;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) todo.push_back({mesh[i], mesh[i + 1]});
    if (forward) std::reverse(todo.begin(), todo.end());

    Eigen::VectorXcd u0 = init.row(0).transpose(), du0 = init.row(1).transpose();
    const Eigen::MatrixXd& I1 = forward ? cb.B : cb.Br;
    const Eigen::MatrixXd& I2 = forward ? cb.B2 : cb.B2r;

    // Absolute floor for the tail test: the source size and the largest
    // solution scale met so far. Without it, panels where the solution is
    // still tiny (a bump edge entering from zero data) bisect forever.
    std::vector<double> floor_scale(ncol, 0.0);
    for (int c = 0; c < ncol; ++c) {
        if (sources.size() <= std::size_t(c) || !sources[c]) continue;
        for (int i = 0; i <= 400; ++i)
            floor_scale[c] = std::max(floor_scale[c], std::abs(sources[c](theta0 + (theta1 - theta0) * i / 400.0)));
    }
    std::vector<double> a2(n);
    std::vector<cplx> a1(n), a0(n);
    Eigen::VectorXd th(n);
    while (!todo.empty()) {
        auto [a, b] = todo.back();
        todo.pop_back();
        if (b - a < 1e-13) throw StepFailure("panel width underflow near theta = " + std::to_string(a));
        double h = 0.5 * (b - a);
        double anchor = forward ? a : b;
        for (int j = 0; j < n; ++j) {
            th[j] = a + h * (1.0 + cb.x[j]);
            mc.theta_coeffs(th[j], a2[j], a1[j], a0[j]);
        }
        Eigen::MatrixXcd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                M(i, j) = a1[i] * h * I1(i, j) + a0[i] * h * h * I2(i, j) + (i == j ? cplx(a2[i]) : cplx(0.0));
        Eigen::MatrixXcd rhs(n, ncol);
        for (int c = 0; c < ncol; ++c) {
            for (int i = 0; i < n; ++i) {
                cplx f = sources.size() > std::size_t(c) && sources[c] ? sources[c](th[i]) : cplx(0.0);
                rhs(i, c) = f - a1[i] * du0[c] - a0[i] * (u0[c] + du0[c] * (th[i] - anchor));
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
        Eigen::MatrixXcd W = lu.solve(rhs);
        Eigen::MatrixXcd Up = h * (I1.cast<cplx>() * W);
        Eigen::MatrixXcd U = h * h * (I2.cast<cplx>() * W);
        for (int c = 0; c < ncol; ++c) {
            for (int i = 0; i < n; ++i) {
                Up(i, c) += du0[c];
                U(i, c) += u0[c] + du0[c] * (th[i] - anchor);
            }
        }
        // Resolution test on the Chebyshev tail of u''.
        Eigen::MatrixXcd coef = cb.coef.cast<cplx>() * W;
        bool ok = true;
        for (int c = 0; c < ncol && ok; ++c) {
            double head = coef.col(c).cwiseAbs().maxCoeff();
            double tail = 0;
            for (int m = n - 3; m < n; ++m) tail = std::max(tail, std::abs(coef(m, c)));
            double uscale = (U.col(c).cwiseAbs().maxCoeff() + h * Up.col(c).cwiseAbs().maxCoeff()) / (h * h);
            double scale = std::max(uscale, floor_scale[c]);
            if (tail > num.panel_tol * head && tail > 1e-15 * scale) ok = false;
        }
        if (!ok) {
            double m = 0.5 * (a + b);
            if (forward) {
                todo.push_back({m, b});
                todo.push_back({a, m});
            } else {
                todo.push_back({a, m});
                todo.push_back({m, b});
            }
            continue;
        }
        for (int c = 0; c < ncol; ++c)
            floor_scale[c] = std::max(floor_scale[c], W.col(c).cwiseAbs().maxCoeff());
        int end = forward ? n - 1 : 0;
        u0 = U.row(end).transpose();
        du0 = Up.row(end).transpose();
        out.panels.push_back({a, b, U, Up, W});
    }
    std::sort(out.panels.begin(), out.panels.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
    return out;
}

SolutionSample integrate_homogeneous(const ModeCoefficients& mc, double theta0, cplx u0, cplx du0,
                                     double theta1, const Numerics& num) {
    Eigen::MatrixXcd init(2, 1);
    init << u0, du0;
    PanelSolution ps = integrate_panels(mc, theta0, theta1, init, {}, num);
    SolutionSample s;
    const ChebBasis& cb = cheb_basis(ps.n);
    for (const Panel& p : ps.panels) {
        for (int j = 0; j < ps.n; ++j) {
            if (j == 0 && !s.grid.empty()) continue;  // shared endpoint
            s.grid.push_back(p.a + 0.5 * (p.b - p.a) * (1.0 + cb.x[j]));
            s.u.push_back(p.U(j, 0));
            s.du.push_back(p.Up(j, 0));
        }
    }
    return s;
}

ModeSolver::ModeSolver(SigmaParam sp, int k, const MetricProfile& profile, Numerics num)
    : mc_(mode_coefficients(sp, k, profile)),
      num_(num),
      pole_(mc_, num_),
      hp_(mc_, +1, num_),
      hm_(mc_, -1, num_) {
    const double tp = num_.pole_patch;
    Eigen::MatrixXcd init(2, 1);
    Jet y = pole_.eval(+1, tp);
    init << y.u, y.du;
    capP_ = integrate_panels(mc_, tp, hp_.theta_cap(), init, {}, num_);
    Jet e = capP_.eval(hp_.theta_cap(), 0);
    std::tie(Ap_, Bp_) = hp_.decompose(hp_.theta_cap(), e.u, e.du);

    y = pole_.eval(-1, kPi - tp);
    init << y.u, y.du;
    capM_ = integrate_panels(mc_, kPi - tp, hm_.theta_cap(), init, {}, num_);
    e = capM_.eval(hm_.theta_cap(), 0);
    std::tie(Am_, Bm_) = hm_.decompose(hm_.theta_cap(), e.u, e.du);

    Eigen::MatrixXcd binit(2, 2);
    Jet p0 = hp_.phi0(hp_.theta_belt()), q0 = hp_.psi(hp_.theta_belt());
    binit << p0.u, q0.u, p0.du, q0.du;
    belt_ = integrate_panels(mc_, hp_.theta_belt(), hm_.theta_belt(), binit, {}, num_);
    for (int c = 0; c < 2; ++c) {
        Jet j = belt_.eval(hm_.theta_belt(), c);
        auto [al, be] = hm_.decompose(hm_.theta_belt(), j.u, j.du);
        T_(0, c) = al;
        T_(1, c) = be;
    }
}

std::pair<cplx, cplx> branch_split(cplx beta_cap, cplx beta_belt, cplx sigma) {
    cplx tp = transmission_coefficient(Branch::PlusI0, sigma);
    cplx tm = transmission_coefficient(Branch::MinusI0, sigma);
    cplx den = tp - tm;
    return {(beta_belt - tm * beta_cap) / den, (tp * beta_cap - beta_belt) / den};
}

ConnectionMatrix connection_matrix(const ModeSolver& s, BranchLabel I, bool check) {
    using Row = Eigen::Matrix<cplx, 1, 6>;
    ConnectionMatrix cm;
    cm.M.setZero();
    const Eigen::Matrix2cd& T = s.transfer();
    cm.M.row(0) << s.B_plus(), -s.A_plus(), 0, 0, 0, 0;
    cm.M.row(1) << 0, 0, 0, 0, s.B_minus(), -s.A_minus();
    cm.M.row(2) << 1, 0, -1, 0, 0, 0;
    cm.M.row(3) << 0, 0, -T(0, 0), -T(0, 1), 1, 0;
    const cplx sigma = s.sp().sigma;
    // Killing branch X keeps the other one: beta_belt = t(other) beta_cap.
    auto kill_row_plus = [&](Branch x) {
        Branch keep = x == Branch::PlusI0 ? Branch::MinusI0 : Branch::PlusI0;
        Row r;
        r << 0, -transmission_coefficient(keep, sigma), 0, 1, 0, 0;
        return r;
    };
    auto kill_row_minus = [&](Branch x) {
        Branch keep = x == Branch::PlusI0 ? Branch::MinusI0 : Branch::PlusI0;
        Row r;
        r << 0, 0, T(1, 0), T(1, 1), 0, -transmission_coefficient(keep, sigma);
        return r;
    };
    const Branch nonsink = SINK_BRANCH == Branch::PlusI0 ? Branch::MinusI0 : Branch::PlusI0;
    if (!I.plus && !I.minus) {
        cm.M.row(4) = kill_row_plus(nonsink);
        cm.M.row(5) = kill_row_minus(nonsink);
    } else if (I.plus && I.minus) {
        cm.M.row(4) = kill_row_plus(SINK_BRANCH);
        cm.M.row(5) = kill_row_minus(SINK_BRANCH);
    } else if (I.plus) {
        cm.M.row(4) << 0, 1, 0, 0, 0, 0;
        cm.M.row(5) << 0, 0, 0, 1, 0, 0;
    } else {
        cm.M.row(4) << 0, 0, 0, 0, 0, 1;
        cm.M.row(5) << 0, 0, T(1, 0), T(1, 1), 0, 0;
    }
    cm.det_analytic = cm.M.determinant();
    Eigen::Matrix<cplx, 6, 6> N = cm.M;
    for (int i = 0; i < 6; ++i) N.row(i) /= N.row(i).norm();
    cm.det_normalized = std::abs(N.determinant());
    if (check && cm.det_normalized < 1e-10) throw NearSingularConnection("connection matrix near singular");
    return cm;
}

}  // namespace hzl

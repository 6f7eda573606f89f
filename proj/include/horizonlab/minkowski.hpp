#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "horizonlab/specfun.hpp"

namespace hzl {

// Exact 1+1 Minkowski space, box = d_t^2 - d_x^2, null coordinates
// xi = t - x, eta = t + x (dt dx = d xi d eta / 2).

// Source with a support box outside which it vanishes to 1e-14.
struct SpacetimeSource {
    std::function<cplx(double, double)> f;  // f(t, x)
    double t0 = 0, t1 = 0, x0 = 0, x1 = 0;
    cplx operator()(double t, double x) const { return f(t, x); }
};

// amp * d_t^order exp(-((t - tc)^2 + (x - xc)^2) / width^2), order 0..2.
struct GaussianTerm {
    cplx amp;
    double tc, xc, width;
    int order = 0;
};
cplx gaussian_term_value(const GaussianTerm& g, double t, double x);
SpacetimeSource gaussian_source(const std::vector<GaussianTerm>& terms);
// Reproducible sources: sums of three time-derivative Gaussian terms in
// [-2, 2]^2 with widths in [0.45, 0.7]. min_order >= 1 gives zero total integral.
std::vector<SpacetimeSource> random_minkowski_sources(std::uint64_t seed, int count, int min_order = 1);

// Closed-form kernels, t and x relative to the source point.
double retarded_kernel(double t, double x);
double advanced_kernel(double t, double x);
double commutator_kernel(double t, double x);
// i (-(1/4 pi) log(-(t^2 - x^2) + i0) + c_F), off the light cone.
cplx feynman_kernel(double t, double x, double c_F = 0.0);

enum class PropagatorKind { Retarded, Advanced, Feynman, Commutator };

struct MinkowskiNumerics {
    double panel_width = 0.5;   // in null coordinates
    double tolerance = 1e-7;    // quadrature error budget
};

// Tensor Gauss-Legendre data of one source in null coordinates, with panel
// prefix sums so that integrals over quadrants are cheap.
class NullQuadrature;

class MinkowskiField {
public:
    MinkowskiField() = default;
    MinkowskiField(std::shared_ptr<const NullQuadrature> q, PropagatorKind kind, double c_F)
        : q_(std::move(q)), kind_(kind), c_F_(c_F) {}
    cplx operator()(double t, double x) const;
    // d/dt; not available for the Feynman kind.
    cplx dt(double t, double x) const;
    PropagatorKind kind() const { return kind_; }
    const NullQuadrature& quadrature() const { return *q_; }
    std::shared_ptr<const NullQuadrature> quadrature_ptr() const { return q_; }

private:
    std::shared_ptr<const NullQuadrature> q_;
    PropagatorKind kind_ = PropagatorKind::Retarded;
    double c_F_ = 0.0;
};

class NullQuadrature {
public:
    // Throws GridTooCoarse when panel refinement moves the total integral
    // by more than num.tolerance, SourceError if f is not small on the box edge.
    explicit NullQuadrature(const SpacetimeSource& f, const MinkowskiNumerics& num = {});
    // Integral of F over the quadrant {xi' < xi (mode_a = +1) or > xi (-1) or
    // all (0)} x {same for eta}, with F = f in null coordinates.
    cplx quadrant(int mode_a, double xi, int mode_b, double eta) const;
    // Past quadrant {xi' < xi, eta' < eta} and future quadrant {xi' > xi, eta' > eta} together.
    std::pair<cplx, cplx> cones(double xi, double eta) const;
    // The same with the xi integral replaced by evaluation at xi.
    cplx line_xi(double xi, int mode_b, double eta) const;
    cplx line_eta(int mode_a, double xi, double eta) const;
    // int log|xi - xi'| Phi(xi') d xi' with Phi(xi') = int F(xi', eta') d eta' (axis 0), or the eta analogue.
    cplx log_marginal(int axis, double s) const;
    cplx total() const { return total_; }
    double lo(int axis) const { return ax_[axis].a; }
    double hi(int axis) const { return ax_[axis].b; }
    // <g, u> = int conj(g) u dt dx with g this source.
    cplx pair(const std::function<cplx(double, double)>& u) const;

private:
    struct Axis {
        double a, b, h;
        int panels;
        std::vector<double> nodes, weights;  // panel-major
        int locate(double s) const;
        // Coefficients on the nodes of panel p for the integral from the panel start to s.
        void partial(int p, double s, double* c) const;
        void lagrange(int p, double s, double* l) const;
    };
    struct Functional {
        int full = 0;          // number of complete panels from the start
        int part = -1;         // panel with partial coefficients, or -1
        double c[20] = {};
    };
    Functional functional(int axis, int mode, double s, bool value) const;
    cplx apply(const Functional& fa, const Functional& fb) const;
    Axis ax_[2];
    Eigen::MatrixXcd F_;                  // F at (xi_i, eta_j)
    Eigen::MatrixXcd panel_prefix_;       // (P+1) x (Q+1)
    Eigen::MatrixXcd row_prefix_;         // N_xi x (Q+1)
    Eigen::MatrixXcd col_prefix_;         // N_eta x (P+1)
    Eigen::VectorXcd phi_[2];             // marginals at the nodes
    cplx total_ = 0.0;
    std::vector<std::pair<double, double>> src_nodes_;  // (t, x) samples for pairings
    std::vector<cplx> src_weighted_;                    // conj(f) dt dx weights
};

// Field of the chosen propagator applied to f.
MinkowskiField propagator_apply(PropagatorKind kind, const SpacetimeSource& f, double c_F = 0.0,
                                const MinkowskiNumerics& num = {});
MinkowskiField propagator_apply(PropagatorKind kind, std::shared_ptr<const NullQuadrature> q, double c_F = 0.0);

// Samples on a tensor grid (rows t, columns x).
Eigen::MatrixXcd sample_field(const std::function<cplx(double, double)>& u, const std::vector<double>& ts,
                              const std::vector<double>& xs);

// max |box u - g| / max |u| at the points, sixth-order central differences of step h.
double dalembert_residual(const std::function<cplx(double, double)>& u,
                          const std::function<cplx(double, double)>& g,
                          const std::vector<std::pair<double, double>>& points, double h = 0.02);

enum class NullDirection { Right, Left };
// horizon +1: future null infinity, -1: past.
struct NullEnd {
    NullDirection dir;
    int horizon;
};
// Point at distance parameter r along the null line with coordinate s.
std::pair<double, double> null_end_point(NullEnd e, double s, double r);

struct RadiationSettings {
    double r_max = 800.0;     // Richardson levels at r_max, r_max/2, ...
    int levels = 3;
    double s_panel = 0.5;     // Gauss-Legendre panels in s
    double tau_min = -40.0;   // Mellin variable tau = log gamma
    double tau_max = 3.5;
    int mellin_points = 2048;
    double sigma_max = 30.0;  // sigma grid on the l = 0 line
    int sigma_points = 601;
};

struct RadiationData {
    NullEnd end;
    std::vector<double> s, s_weights;
    std::vector<cplx> field;           // limit of u along the null line
    double extrapolation_change = 0.0; // |first - second level| / max |field|
    std::vector<double> sigma;
    std::vector<cplx> a_plus, a_minus; // Mellin data of the gamma > 0 and gamma < 0 halves
    double dsigma() const { return sigma.size() > 1 ? sigma[1] - sigma[0] : 0.0; }
};

// Restriction to the front face by Richardson extrapolation in 1/r over s in
// [s_lo, s_hi], then Fourier in s, restriction to the half-lines with the
// |gamma| weight and Mellin transform in |gamma| on the real sigma line.
// Throws ExtrapolationDivergence if the levels do not converge.
RadiationData radiation_extract(const std::function<cplx(double, double)>& u, NullEnd end, double s_lo, double s_hi,
                                const RadiationSettings& rs = {});
// s range carrying the radiation field of a field from this source at `end`.
std::pair<double, double> radiation_window(const NullQuadrature& q, NullEnd end);
// Fourier transform of the extracted front-face function at gamma.
cplx radiation_fourier(const RadiationData& d, double gamma);
// Forward map: front-face function at the points s rebuilt from a+- through
// the double integral of e^{i nu s} |nu|^{i sigma - 1} a(sigma) (1/(2 pi)^2).
std::vector<cplx> radiation_reconstruct(const RadiationData& d, const std::vector<double>& s,
                                        const RadiationSettings& rs = {});

// Index set I: {-} pairs the gamma > 0 half at S+ with the gamma < 0 half at S-,
// {+} the opposite halves. Signs (-1)^{I(+-)} = (sign at S+, sign at S-).
enum class IndexSet { Minus, Plus };
std::pair<int, int> pairing_signs(IndexSet I);
// sum over ends in I and both directions of sign * int conj(a1) a2 d sigma.
cplx data_pairing(const std::vector<RadiationData>& d1, const std::vector<RadiationData>& d2, IndexSet I);
// Radiation data of G f at the four null ends.
std::vector<RadiationData> commutator_radiation(const SpacetimeSource& f, const RadiationSettings& rs = {},
                                                const MinkowskiNumerics& num = {});

struct PairingEstimate {
    std::vector<cplx> ratios;  // <f1, G f2> / (i D_I)
    cplx mean = 0.0;
    double dispersion = 0.0;   // max |ratio - mean| / |mean|
    std::pair<int, int> signs;
};
// One estimate per index set, sharing the fields and data of each pair.
// Throws DegenerateData when a data-side integral is below 1e-10 in modulus.
std::vector<PairingEstimate> pairing_constant_estimate(
    const std::vector<std::pair<SpacetimeSource, SpacetimeSource>>& pairs, const std::vector<IndexSet>& sets,
    const RadiationSettings& rs = {}, const MinkowskiNumerics& num = {});

// Fraction of spectral energy at negative time frequency (u^(w) = int u e^{-i w t} dt)
// of Feynman minus retarded field at x = x_probe, over t in [-T, T] with a
// Blackman-Harris window and N samples.
double negative_frequency_fraction(const SpacetimeSource& f, double x_probe, double T = 60.0, int N = 1024,
                                   double c_F = 0.0, const MinkowskiNumerics& num = {});

// Time slice: Q(t) smooth step from 0 (t < t_a) to 1 (t > t_b). The source
// [box, Q] G f is built and G of it compared with G f on the sample points.
struct TimeSliceResult {
    double error;          // max |G [box, Q] G f - G f| / max |G f|
    double support_leak;   // max |[box, Q] G f| outside the slab
};
TimeSliceResult minkowski_time_slice(const SpacetimeSource& f, double t_a, double t_b,
                                     const std::vector<std::pair<double, double>>& points,
                                     const MinkowskiNumerics& num = {});

// max |<f_i, G f_j> + conj(<f_j, G f_i>)| / max |<f_i, G f_j>|.
double skew_adjointness(const std::vector<SpacetimeSource>& sources, const MinkowskiNumerics& num = {});

}  // namespace hzl

#include <cmath>

#include "doctest.h"
#include "horizonlab/errors.hpp"
#include "horizonlab/minkowski.hpp"
#include "horizonlab/states.hpp"

using namespace hzl;

namespace {

std::shared_ptr<const ModeSolver> solver(double sigma, int k) {
    return std::make_shared<const ModeSolver>(SigmaParam{sigma}, k, MetricProfile::exact());
}

// Commutator field of an order-0 Gaussian from the erf primitives in null coordinates.
cplx gaussian_commutator(const GaussianTerm& g, double t, double x) {
    const double w = g.width, xi0 = g.tc - g.xc, eta0 = g.tc + g.xc;
    const double c = w * std::sqrt(kPi / 2.0), r = std::sqrt(2.0) * w;
    auto below = [&](double s, double s0) { return c * (1.0 + std::erf((s - s0) / r)); };
    auto above = [&](double s, double s0) { return c * std::erfc((s - s0) / r); };
    return 0.25 * g.amp * (below(t - x, xi0) * below(t + x, eta0) - above(t - x, xi0) * above(t + x, eta0));
}

}  // namespace

TEST_CASE("symplectic weights") {
    auto w = symplectic_weights(0.7, 1);
    CHECK(w(0) == doctest::Approx(std::exp(kPi * 0.7)));
    CHECK(w(1) == doctest::Approx(-std::exp(-kPi * 0.7)));
    auto v = symplectic_weights(0.7, -1);
    CHECK(v(0) == doctest::Approx(-w(0)));
    CHECK(v(1) == doctest::Approx(-w(1)));
}

TEST_CASE("symplectic normalization matches the closed form and is mode independent") {
    const double sigma = 1.3;
    const double closed = 2.0 * std::sqrt(2.0) * sigma * std::sinh(kPi * sigma);
    auto src = state_sources(17, 6);
    for (int k : {0, 3}) {
        auto s = solver(sigma, k);
        for (int side : {1, -1}) {
            auto n = symplectic_alpha(s, src, side);
            CHECK(std::abs(n.alpha - closed) < 1e-6 * closed);
            CHECK(n.residual < 1e-6);
            CHECK(std::abs(n.alpha_imag) < 1e-6 * closed);
        }
    }
}

TEST_CASE("two-point forms: commutator, hermiticity, positivity, annihilation") {
    const double sigma = 0.7;
    auto s = solver(sigma, 1);
    auto src = state_sources(23, 6);
    double alpha = symplectic_alpha(s, src, 1).alpha;
    for (int side : {1, -1}) {
        TwoPointForm tp = two_point_build(s, side, src, alpha);
        CHECK(tp.ccr_residual() < 1e-7);
        CHECK(tp.hermiticity() < 1e-9);
        double scale = tp.lplus.norm() + tp.lminus.norm();
        CHECK(tp.min_eig_plus() > -1e-8 * scale);
        CHECK(tp.min_eig_minus() > -1e-8 * scale);
        auto st = signed_sum_check(tp);
        CHECK(st.bosonic_matches);
        CHECK(st.bosonic < st.fermionic);
        CHECK(annihilation_residual(s, side, alpha, state_sources(29, 3)) < 1e-8);
    }
}

TEST_CASE("globe Poisson solutions reproduce their data") {
    auto s = solver(2.1, 0);
    AsymptoticData a{cplx(1.0, 0.5), cplx(-0.3, 0.2)};
    GlobalSolution u = globe_poisson(s, a, 1), v = globe_poisson_direct(s, a, 1);
    AsymptoticData d = u.data(1);
    CHECK(std::abs(d.aplus - a.aplus) < 1e-7);
    CHECK(std::abs(d.aminus - a.aminus) < 1e-7);
    CHECK((basis_coordinates(u) - basis_coordinates(v)).norm() < 1e-7 * basis_coordinates(v).norm());
}

TEST_CASE("Hadamard decay classification") {
    std::vector<double> fast, slow;
    for (int k = 0; k <= 16; ++k) {
        fast.push_back(std::pow(k + 1.0, -10.0));
        slow.push_back(std::pow(k + 1.0, -2.0));
    }
    CHECK(hadamard_decay(fast).pass);
    CHECK_FALSE(hadamard_decay(slow).pass);
    CHECK(hadamard_decay(slow).final_slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("Minkowski kernels") {
    CHECK(retarded_kernel(2.0, 1.0) == doctest::Approx(0.5));
    CHECK(retarded_kernel(-2.0, 1.0) == 0.0);
    CHECK(retarded_kernel(1.0, 2.0) == 0.0);
    CHECK(advanced_kernel(-2.0, 1.0) == doctest::Approx(0.5));
    for (auto [t, x] : {std::pair{2.0, 1.0}, {-2.0, 0.5}, {0.3, 1.0}})
        CHECK(commutator_kernel(t, x) == doctest::Approx(retarded_kernel(t, x) - advanced_kernel(t, x)));
    // Spacelike: real logarithm; timelike: the +i0 prescription adds i pi.
    cplx a = feynman_kernel(0.5, 2.0, 0.1);
    CHECK(std::abs(a - cplx(0, 1) * (-std::log(3.75) / (4 * kPi) + 0.1)) < 1e-14);
    cplx b = feynman_kernel(2.0, 0.5);
    CHECK(std::abs(b - cplx(0, 1) * (-(std::log(3.75) + cplx(0, kPi)) / (4 * kPi))) < 1e-14);
}

TEST_CASE("Minkowski commutator field against the closed form") {
    GaussianTerm g{cplx(0.8, -0.3), 0.4, -0.6, 0.55, 0};
    auto G = propagator_apply(PropagatorKind::Commutator, gaussian_source({g}));
    double err = 0, scale = 0;
    for (double t = -6; t <= 6; t += 0.7)
        for (double x = -6; x <= 6; x += 0.9) {
            cplx ref = gaussian_commutator(g, t, x);
            err = std::max(err, std::abs(G(t, x) - ref));
            scale = std::max(scale, std::abs(ref));
        }
    CHECK(err < 1e-10 * scale);
}

TEST_CASE("Minkowski propagators solve the wave equation") {
    auto f = random_minkowski_sources(5, 1, 1)[0];
    std::vector<std::pair<double, double>> pts{{0.3, 0.2}, {3.0, -0.5}, {-1.0, 4.0}, {5.0, 2.0}};
    for (auto kind : {PropagatorKind::Retarded, PropagatorKind::Advanced}) {
        auto u = propagator_apply(kind, f);
        CHECK(dalembert_residual(u, f.f, pts) < 1e-6);
    }
    auto r = propagator_apply(PropagatorKind::Retarded, f);
    CHECK(std::abs(r(-9.0, 0.0)) < 1e-12);
    CHECK(skew_adjointness(random_minkowski_sources(6, 3, 1)) < 1e-8);
}

TEST_CASE("Minkowski positive frequency and pairing constant") {
    CHECK(negative_frequency_fraction(random_minkowski_sources(8, 1, 2)[0], 0.5) < 1e-3);
    auto src = random_minkowski_sources(12, 4, 1);
    auto est = pairing_constant_estimate({{src[0], src[1]}, {src[2], src[3]}}, {IndexSet::Minus});
    REQUIRE(est.size() == 1);
    const double C = -1.0 / (2.0 * kPi * kPi);
    CHECK(std::abs(est[0].mean - C) < 1e-3 * std::abs(C));
    CHECK(pairing_signs(IndexSet::Minus) == std::pair<int, int>{1, -1});
    CHECK(pairing_signs(IndexSet::Plus) == std::pair<int, int>{-1, 1});
}

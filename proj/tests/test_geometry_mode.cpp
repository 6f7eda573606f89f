#include <cmath>
#include <complex>

#include "doctest.h"
#include "horizonlab/errors.hpp"
#include "horizonlab/geometry.hpp"
#include "horizonlab/mode_ode.hpp"
#include "horizonlab/propagators.hpp"

using namespace hzl;

TEST_CASE("exponents of the spectral parameter") {
    SigmaParam sp{cplx(0.7, 0.2)};
    CHECK(std::abs(sp.p() - (cplx(0, 1) * sp.sigma + 0.5)) < 1e-15);
    CHECK(std::abs(sp.tilde() - cplx(-0.7, 0.3)) < 1e-15);
}

TEST_CASE("regions and horizons of the exact model") {
    CHECK(v_of_theta(0.0) == doctest::Approx(1.0));
    CHECK(std::abs(v_of_theta(kThetaHorizonPlus)) < 1e-15);
    CHECK(std::abs(v_of_theta(kThetaHorizonMinus)) < 1e-15);
    CHECK(v_of_theta(kPi / 2) == doctest::Approx(-1.0));
    CHECK(region_of_theta(0.3) == Region::CapPlus);
    CHECK(region_of_theta(1.2) == Region::Belt);
    CHECK(region_of_theta(2.9) == Region::CapMinus);
    CHECK(region_of(0.0, 1) == Region::HorizonPlus);
    CHECK(region_of(0.0, -1) == Region::HorizonMinus);
    CHECK_THROWS_AS(v_of_theta(-0.1), DomainError);
}

TEST_CASE("metric profiles") {
    MetricProfile e = MetricProfile::exact();
    MetricProfile p = MetricProfile::polynomial({0.5, -0.5});
    for (double v : {-1.0, -0.3, 0.0, 0.4, 1.0}) {
        CHECK(e.f(v) == doctest::Approx(p.f(v)));
        CHECK(e.f(v) == doctest::Approx((1.0 - v) / 2));
        CHECK(e.fp(v) == doctest::Approx(-0.5));
    }
    // A quadratic deformation that keeps the pole conditions.
    MetricProfile q = MetricProfile::polynomial({0.4, -0.3, -0.1});
    CHECK(std::abs(q.f(1.0)) < 1e-15);
    CHECK(q.fp(1.0) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(MetricProfile::polynomial({}), ProfileError);
    CHECK_THROWS_AS(MetricProfile::polynomial({1.0, -0.5}), ProfileError);
    CHECK_THROWS_AS(MetricProfile::polynomial({0.25, -0.25}), ProfileError);
}

TEST_CASE("branch transmission factors against the principal power") {
    for (cplx s : {cplx(0.7), cplx(2.1), cplx(0.4, 0.3), cplx(1.1, -0.2)}) {
        cplx mi = cplx(0, -1) * s;
        // (v + i0)^{-i sigma} and (v - i0)^{-i sigma} at v = -1 over |v|^{-i sigma} = 1.
        cplx up = std::pow(cplx(-1.0, 0.0), mi);
        cplx dn = std::pow(cplx(-1.0, -0.0), mi);
        CHECK(std::abs(transmission_coefficient(Branch::PlusI0, s) - up) < 1e-12 * std::abs(up));
        CHECK(std::abs(transmission_coefficient(Branch::MinusI0, s) - dn) < 1e-12 * std::abs(dn));
        CHECK(std::abs(transmission_coefficient(Branch::PlusI0, s) * transmission_coefficient(Branch::MinusI0, s) -
                       1.0) < 1e-13);
    }
}

TEST_CASE("propagator labels") {
    CHECK(all_branch_labels().size() == 4);
    CHECK(BranchLabel::feynman().complement() == BranchLabel::anti_feynman());
    CHECK(BranchLabel::advanced().complement() == BranchLabel::retarded());
    CHECK(BranchLabel::retarded().name() == "retarded");
    CHECK(BranchLabel::anti_feynman().name() == "anti_feynman");
}

TEST_CASE("graded mesh covers the interval with bounded panels") {
    CHECK_THROWS_AS(graded_mesh(0.2, 1.4, 0.05), DomainError);
    auto m = graded_mesh(0.2, kThetaHorizonPlus - 0.01, 0.05);
    REQUIRE(m.size() >= 2);
    CHECK(m.front() == doctest::Approx(0.2));
    CHECK(m.back() == doctest::Approx(kThetaHorizonPlus - 0.01));
    for (std::size_t i = 1; i < m.size(); ++i) {
        CHECK(m[i] > m[i - 1]);
        CHECK(m[i] - m[i - 1] <= 0.05 + 1e-12);
    }
    // Panels shrink toward the horizon.
    CHECK(m[m.size() - 1] - m[m.size() - 2] < 0.02);
}

TEST_CASE("regular pole solution and homogeneous IVP agree") {
    // Integrating the pole solution outward from the patch edge reproduces the series further in.
    ModeCoefficients mc = mode_coefficients(SigmaParam{1.3}, 2, MetricProfile::exact());
    Numerics num;
    PoleBasis pb(mc, num);
    double t0 = 0.14, t1 = 0.05;
    Jet a = pb.eval(1, t0), b = pb.eval(1, t1);
    SolutionSample s = integrate_homogeneous(mc, t0, a.u, a.du, t1, num);
    REQUIRE(!s.grid.empty());
    std::size_t last = std::abs(s.grid.front() - t1) < std::abs(s.grid.back() - t1) ? 0 : s.grid.size() - 1;
    CHECK(s.grid[last] == doctest::Approx(t1));
    CHECK(std::abs(s.u[last] - b.u) < 1e-9 * std::abs(b.u));
}

TEST_CASE("connection matrix is regular on the real axis") {
    auto s = std::make_shared<const ModeSolver>(SigmaParam{0.7}, 0, MetricProfile::exact());
    for (BranchLabel I : all_branch_labels()) {
        ConnectionMatrix cm = connection_matrix(*s, I);
        CHECK(cm.det_normalized > 1e-4);
        CHECK(std::isfinite(std::abs(cm.det_analytic)));
    }
}

#include <cmath>

#include "doctest.h"
#include "horizonlab/caps.hpp"
#include "horizonlab/desitter.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/specfun.hpp"

using namespace hzl;

TEST_CASE("cap coordinates") {
    for (double th : {0.1, 0.4, 0.7}) {
        CHECK(std::cosh(2 * cap_r(th)) * std::cos(2 * th) == doctest::Approx(1.0));
        CHECK(cap_x(th) * cap_x(th) == doctest::Approx(std::cos(2 * th)));
        CHECK(cap_theta(cap_x(th), 1) == doctest::Approx(th));
        CHECK(cap_theta(cap_x(th), -1) == doctest::Approx(kPi - th));
    }
}

TEST_CASE("cap scattering matrix: unitarity and regular data") {
    for (double s : {0.3, 1.3, 2.7})
        for (int k : {0, 1, 4}) {
            SigmaParam sp{s};
            cplx S = scattering_matrix_cap(sp, k);
            CHECK(std::abs(std::abs(S) - 1.0) < 1e-12);
            CapData d = CapResolventMode(sp, k).regular_data();
            CHECK(std::abs(d.aminus / d.aplus - S) < 1e-10);
        }
}

TEST_CASE("cap resolvent Wronskian is constant") {
    CapResolventMode R(SigmaParam{0.9}, 2);
    for (double r : {0.3, 1.0, 2.5}) {
        cplx w = std::sinh(r) * (R.w_reg(r) * R.w_out_dr(r) - R.w_reg_dr(r) * R.w_out(r));
        CHECK(std::abs(w - R.normalization()) < 1e-9 * std::abs(R.normalization()));
    }
}

TEST_CASE("cap resolvent gamma poles") {
    CHECK_THROWS_AS(CapResolventMode(SigmaParam{cplx(0.0, -2.5)}, 1), GammaPole);
    auto pred = cap_pole_predictions(0, cplx(-0.5, -2.0), cplx(0.5, 2.0));
    CHECK(pred.size() == 4);  // +-0.5i, +-1.5i
}

TEST_CASE("cap resolvent solves the cap equation and its data fit is stable") {
    SigmaParam sp{1.3};
    auto f = make_source({Bump{0.45, 0.15, cplx(1.0, 0.5)}});
    CapField w = cap_resolvent_apply(sp, 1, f, 1);
    // Spectral check on single intervals inside and outside the source support (r in [0.31, 0.84]).
    CHECK(w.ode_residual(0.45, 0.55) < 1e-8);
    CHECK(w.ode_residual(1.0, 3.0) < 1e-8);
    CapData d = w.data();
    CHECK(std::isfinite(std::abs(d.aplus)));
}

TEST_CASE("belt coordinates") {
    for (double th : {0.9, 1.3, 2.0}) {
        CHECK(std::cosh(2 * belt_tau(th)) * std::cos(2 * th) == doctest::Approx(-1.0));
        CHECK(belt_theta(belt_x(th), th < kPi / 2 ? 1 : -1) == doctest::Approx(th));
    }
    CHECK(belt_tau(1.0) < 0.0);
    CHECK(belt_tau(2.0) > 0.0);
}

TEST_CASE("belt model solutions and Wronskian") {
    SigmaParam sp{0.7};
    const int k = 2;
    BeltModel m(sp, k);
    cplx expected = cplx(0, -2.0 / kPi) * std::sinh(kPi * 0.7);
    CHECK(std::abs(m.wronskian() - expected) < 1e-10 * std::abs(expected));
    for (double tau : {-2.0, -0.3, 0.8, 2.5}) {
        Jet p = m.y(1, tau), q = m.y(-1, tau);
        cplx w = std::cosh(tau) * (p.u * q.du - p.du * q.u);
        CHECK(std::abs(w - expected) < 1e-9 * std::abs(expected));
        double c = std::cosh(tau);
        cplx lam = 0.49 + 0.25;
        cplx res = p.d2u + std::tanh(tau) * p.du + (k * k / (c * c) + lam) * p.u;
        CHECK(std::abs(res) < 1e-9 * (std::abs(p.u) + std::abs(p.d2u)));
    }
    CHECK_THROWS_AS(BeltModel(SigmaParam{0.0}, 1), DegeneracyError);
}

TEST_CASE("belt transport and its numerical inverse") {
    SigmaParam sp{1.3};
    Eigen::Matrix2cd T = ds_scattering(sp, 1);
    Eigen::Matrix2cd R = ds_scattering_reverse_numeric(sp, 1);
    CHECK(((T * R) - Eigen::Matrix2cd::Identity()).norm() < 1e-6);
}

TEST_CASE("belt propagator solves the belt equation") {
    SigmaParam sp{2.1};
    auto f = make_source({Bump{1.3, 0.2, 1.0}});
    for (int side : {1, -1}) {
        BeltField w = belt_propagator(sp, 1, side, f);
        CHECK(w.ode_residual({1.0, 1.2, 1.4, 1.7, 2.0}) < 1e-8);
        // Vanishes near the horizon on its quiet side.
        double th = side > 0 ? belt_theta(1e-2, 1) : belt_theta(1e-2, -1);
        CHECK(std::abs(w.w(th)) < 1e-12);
    }
}

TEST_CASE("globe and belt data relation") {
    for (int k : {0, 2}) CHECK(rho_relation_check(SigmaParam{1.3}, k).mismatch < 1e-6);
    CHECK_THROWS_AS(rho_relation_check(SigmaParam{1e-4}, 0), DegeneracyError);
}

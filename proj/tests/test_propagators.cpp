#include <cmath>

#include "doctest.h"
#include "horizonlab/block.hpp"
#include "horizonlab/caps.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/propagators.hpp"

using namespace hzl;

namespace {

std::shared_ptr<const ModeSolver> solver(double sigma, int k) {
    return std::make_shared<const ModeSolver>(SigmaParam{sigma}, k, MetricProfile::exact());
}

double rel_norm(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_CASE("sources: support checks") {
    Numerics num;
    CHECK_NOTHROW(validate_source(make_source({Bump{0.5, 0.1, 1.0}}), num));
    // Inside the pole patch.
    CHECK_THROWS_AS(validate_source(make_source({Bump{0.05, 0.04, 1.0}}), num), SourceError);
    // Straddles the horizon S+.
    CHECK_THROWS_AS(restrict_to(make_source({Bump{kThetaHorizonPlus, 0.1, 1.0}}), Region::Belt), SourceError);
    auto f = make_source({Bump{0.5, 0.1, 1.0}, Bump{1.5, 0.1, 2.0}});
    auto belt = restrict_to(f, Region::Belt);
    CHECK(std::abs(belt(0.5)) == 0.0);
    CHECK(std::abs(belt(1.5) - f(1.5)) < 1e-15);
    double a = 0, b = 0;
    REQUIRE(source_span(f, 0.0, kPi, a, b));
    CHECK(a == doctest::Approx(0.4));
    CHECK(b == doctest::Approx(1.6));
    auto r1 = random_sources(7, 3, RegionMask::CapMinus), r2 = random_sources(7, 3, RegionMask::CapMinus);
    for (int i = 0; i < 3; ++i) {
        CHECK(r1[i](2.6) == r2[i](2.6));
        CHECK(std::abs(r1[i](1.0)) == 0.0);
    }
}

TEST_CASE("inverses solve the mode equation for every label") {
    for (int k : {0, 3}) {
        auto s = solver(1.3, k);
        auto src = random_sources(11 + k, 2, RegionMask::All);
        for (BranchLabel I : all_branch_labels()) {
            ModeGreens g(s, I);
            for (const auto& f : src) {
                InverseResult r = apply_inverse(g, f);
                CHECK(r.residual <= 1e-8 * f.sup_norm());
            }
        }
    }
}

TEST_CASE("inverse is linear") {
    auto s = solver(0.7, 1);
    ModeGreens g(s, BranchLabel::feynman());
    auto src = random_sources(3, 2, RegionMask::All);
    const cplx c(0.5, -1.0);
    GlobalSolution sum = g.solve(src[0] + c * src[1]);
    GlobalSolution a = g.solve(src[0]), b = g.solve(src[1]);
    for (double th : default_grid(*s, 40)) CHECK(std::abs(sum.eval(th).u - a.eval(th).u - c * b.eval(th).u) < 1e-10);
}

TEST_CASE("adjoint of an inverse is the inverse of the complementary label") {
    auto s = solver(2.1, 2);
    auto src = random_sources(21, 4, RegionMask::All);
    for (BranchLabel I : {BranchLabel::feynman(), BranchLabel::retarded()}) {
        ModeGreens a(s, I), b(s, I.complement());
        CHECK(rel_norm(inverse_gram(a, src), inverse_gram(b, src).adjoint()) < 1e-7);
    }
}

TEST_CASE("Feynman form is positive semidefinite and Hermitian") {
    auto s = solver(0.7, 0);
    auto pr = feynman_positivity(s, random_sources(5, 6, RegionMask::All));
    CHECK(pr.hermiticity < 1e-8);
    CHECK(pr.eigenvalues.minCoeff() > -1e-8 * pr.eigenvalues.cwiseAbs().maxCoeff());
}

TEST_CASE("block inverse matches the global inverse") {
    auto s = solver(1.3, 1);
    std::vector<SourceFunction> src = random_sources(9, 1, RegionMask::CapPlus);
    for (auto& f : random_sources(10, 1, RegionMask::Belt)) src.push_back(f);
    for (auto& f : random_sources(11, 1, RegionMask::CapMinus)) src.push_back(f);
    CHECK(block_vs_global(s, -1, src) < 1e-6);
    CHECK(block_vs_global(s, +1, src) < 1e-6);
}

TEST_CASE("no real poles and complex poles at the cap resolvent poles") {
    CHECK(min_real_det(1, BranchLabel::retarded(), 0.2, 3.0, 30) > 1e-4);
    cplx c0(-0.23, -2.0), c1(0.27, 2.0);
    auto found = pole_scan(1, BranchLabel::retarded(), c0, c1, 5, 25);
    auto pred = cap_pole_predictions(1, c0, c1);
    REQUIRE(found.size() == pred.size());
    for (cplx z : pred) {
        double best = 1e300;
        for (const auto& p : found) best = std::min(best, std::abs(p.sigma - z));
        CHECK(best < 1e-4);
    }
}

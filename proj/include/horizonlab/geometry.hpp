#pragma once

#include <string>
#include <vector>

#include "horizonlab/series.hpp"

namespace hzl {

// Spectral parameter; the conjugation exponent is tilde = -sigma + i/2 (d = 2).
struct SigmaParam {
    cplx sigma;
    cplx tilde() const { return -sigma + cplx(0.0, 0.5); }
    // Exponent p = i sigma + 1/2 appearing in the mode coefficients.
    cplx p() const { return kI * sigma + 0.5; }
};

enum class Region { CapPlus, Belt, CapMinus, HorizonPlus, HorizonMinus };
std::string region_name(Region r);

inline constexpr double kThetaHorizonPlus = kPi / 4;
inline constexpr double kThetaHorizonMinus = 3 * kPi / 4;

double v_of_theta(double theta);
// Hemisphere +1 is the theta < pi/2 half of the sphere.
Region region_of(double v, int hemisphere);
Region region_of_theta(double theta);

// Angular warp f(v) of the fibre circles; a polynomial in v.
class MetricProfile {
public:
    static MetricProfile exact();
    static MetricProfile polynomial(std::vector<double> coeffs);
    double f(double v) const;
    double fp(double v) const;
    const std::vector<double>& coeffs() const { return c_; }
    bool is_exact() const { return exact_; }

private:
    std::vector<double> c_;
    bool exact_ = false;
};

// Coefficients of the mode operator c2 d_v^2 + c1 d_v + c0, and the same
// operator in theta: a2 d_theta^2 + a1 d_theta + a0.
class ModeCoefficients {
public:
    ModeCoefficients(SigmaParam sp, int k, MetricProfile profile);

    cplx c2(double v) const;
    cplx c1(double v) const;
    cplx c0(double v) const;
    void theta_coeffs(double theta, double& a2, cplx& a1, cplx& a0) const;

    // Conjugated regional operator v^-1 |v|^-b (L + sigma^2 + 1/4) |v|^b,
    // b = p/2, assembled from the uncoupled region form; valid for v != 0.
    void regional(double v, cplx& r2, cplx& r1, cplx& r0) const;

    // Normal-form series t^2 A u'' + t B u' + C u at the horizon in the
    // scaled variable t = v/scale.
    void horizon_series(double scale, std::size_t n, Series& A, Series& B, Series& C) const;
    // Normal-form series at a pole in t = 1 - v.
    void pole_series(std::size_t n, Series& A, Series& B, Series& C) const;

    const SigmaParam& sp() const { return sp_; }
    int k() const { return k_; }
    const MetricProfile& profile() const { return prof_; }

private:
    SigmaParam sp_;
    int k_;
    MetricProfile prof_;
};

// Builds the coefficients and checks that the regional expressions on both
// sides of the horizon agree with the single smooth extension.
ModeCoefficients mode_coefficients(SigmaParam sp, int k, const MetricProfile& profile);

}  // namespace hzl

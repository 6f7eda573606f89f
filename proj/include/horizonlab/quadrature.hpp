#pragma once

#include <functional>
#include <vector>

#include "horizonlab/specfun.hpp"

namespace hzl {

// Composite Gauss-Legendre integral of h over [a, b] with running totals, so
// that the integral from a to any t follows from the panel interpolant.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;
    CumulativeIntegral(std::function<cplx(double)> h, double a, double b, double h_max = 0.025);
    cplx total() const { return prefix_.empty() ? cplx(0.0) : prefix_.back(); }
    // Integral from a to t, with t clamped to [a, b].
    cplx upto(double t) const;
    double lo() const { return a_; }
    double hi() const { return b_; }

private:
    double a_ = 0.0, b_ = 0.0;
    std::vector<double> mesh_;
    std::vector<cplx> prefix_;  // prefix_[i] = integral over [mesh_0, mesh_{i+1}]
    std::vector<cplx> values_;  // integrand at the Gauss-Legendre nodes, panel-major
    cplx panel_partial(std::size_t i, double t) const;
};

// Gauss-Legendre integral over [a, b] on panels of width <= h_max.
cplx integrate(const std::function<cplx(double)>& h, double a, double b, double h_max = 0.025);

}  // namespace hzl

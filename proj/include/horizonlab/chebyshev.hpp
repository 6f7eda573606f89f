#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "horizonlab/series.hpp"

namespace hzl {

// Chebyshev-Lobatto toolkit on [-1, 1], nodes in ascending order.
struct ChebBasis {
    int n;
    Eigen::VectorXd x;        // nodes
    Eigen::VectorXd bary;     // barycentric weights
    Eigen::MatrixXd D;        // differentiation
    Eigen::MatrixXd B;        // integration from -1
    Eigen::MatrixXd B2;       // double integration from -1
    Eigen::MatrixXd Br;       // integration from +1
    Eigen::MatrixXd B2r;      // double integration from +1
    Eigen::MatrixXd coef;     // values -> Chebyshev coefficients
    Eigen::VectorXd cc;       // Clenshaw-Curtis weights
};

const ChebBasis& cheb_basis(int n);

// Barycentric interpolation of nodal values at xi in [-1, 1].
cplx cheb_interp(const ChebBasis& cb, const Eigen::Ref<const Eigen::VectorXcd>& vals, double xi);
// Row of interpolation weights for xi (so that value = w.dot(vals)).
Eigen::VectorXd cheb_interp_row(const ChebBasis& cb, double xi);

// Monomial coefficients in s = (x - c)/r of the degree m-1 Chebyshev
// interpolant of g on [c - r, c + r].
Series cheb_fit_monomial(const std::function<cplx(double)>& g, double c, double r, int m);

// Gauss-Legendre nodes and weights on [-1, 1] (n = 20 or 40).
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

}  // namespace hzl

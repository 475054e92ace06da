#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace mic {

struct QuadratureResult {
    double value = 0;
    double error = 0;
};

/// Adaptive Gauss-Kronrod on [a, b]. Throws numeric_error when the error
/// estimate stays above max(abs_tol, rel_tol * L1).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-9) {
    if (a == b) return {};
    double err = 0, l1 = 0;
    // a target tighter than 1e-12 can recurse to full depth on steep integrands
    const double inner = std::max(1e-12, 1e-3 * rel_tol);
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 25, inner, &err, &l1);
    if (!std::isfinite(v) || err > std::max(abs_tol, rel_tol * l1)) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "]: estimate " << v << ", residual " << err;
        throw numeric_error(os.str());
    }
    return {v, err};
}

} // namespace mic

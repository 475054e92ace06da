#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace mic {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double mu0 = 4e-7 * pi;
inline constexpr double eps0 = 8.854e-12;

struct Medium {
    double mu = mu0;
    double epsilon = 6.978e-11;
    double sigma = 0.01;

    void validate() const {
        require(mu > 0, "medium.mu must be > 0");
        require(epsilon > 0, "medium.epsilon must be > 0");
        require(sigma >= 0, "medium.sigma must be >= 0");
    }
};

namespace media {
inline Medium soil() { return {}; }
inline Medium dry_soil() { return {mu0, 7 * eps0, 0.01}; }
inline Medium wet_soil() { return {mu0, 29 * eps0, 0.077}; }
inline Medium seawater() { return {mu0, 81 * eps0, 4.8}; }
inline Medium air() { return {mu0, eps0, 0.0}; }
} // namespace media

enum class SkinDepthMode { exact, vlf };

inline cplx wavenumber(double f, const Medium& m) {
    require_domain(f > 0, "wavenumber: frequency must be > 0");
    const double w = 2 * pi * f;
    // principal root of a value in the upper half plane has Im >= 0
    return w * std::sqrt(m.mu * cplx(m.epsilon, m.sigma / w));
}

inline double skin_depth(double f, const Medium& m, SkinDepthMode mode = SkinDepthMode::exact) {
    require_domain(f > 0, "skin_depth: frequency must be > 0");
    if (m.sigma == 0) return std::numeric_limits<double>::infinity();
    const double w = 2 * pi * f;
    if (mode == SkinDepthMode::vlf) return std::sqrt(1.0 / (pi * f * m.mu * m.sigma));
    const double x = m.sigma / (w * m.epsilon);
    // sqrt(1+x^2)-1 without cancellation for small x
    const double s = x * x / (std::sqrt(1 + x * x) + 1);
    return 1.0 / (w * std::sqrt(m.mu * m.epsilon / 2 * s));
}

inline double near_field_boundary(double f, const Medium& m, double kappa = 1.0) {
    require_domain(kappa > 0, "near_field_boundary: kappa must be > 0");
    return kappa / std::abs(wavenumber(f, m));
}

} // namespace mic

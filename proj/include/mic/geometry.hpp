#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "errors.hpp"

namespace mic {

using Vec3 = Eigen::Vector3d;

struct Pose {
    Vec3 position = Vec3::Zero();
    Vec3 axis = Vec3::UnitX();

    // Normalizes the axis so the unit-norm invariant holds by construction.
    static Pose make(const Vec3& position, const Vec3& axis) {
        const double n = axis.norm();
        require(n > 0 && std::isfinite(n), "pose.axis must be a non-zero finite vector");
        return {position, axis / n};
    }

    void validate() const {
        require(std::abs(axis.norm() - 1.0) <= 1e-12, "pose.axis must be a unit vector");
    }
};

/// Axes in the x-y plane for a link along +x, with angles measured the way
/// the coplanar form 2 cos(ts) cos(td) + sin(ts) sin(td) expects.
inline Vec3 tx_axis_coplanar(double theta_s) { return {std::cos(theta_s), std::sin(theta_s), 0}; }
inline Vec3 rx_axis_coplanar(double theta_d) { return {std::cos(theta_d), -std::sin(theta_d), 0}; }

inline double coplanar_polarization(double theta_s, double theta_d) {
    return 2 * std::cos(theta_s) * std::cos(theta_d) + std::sin(theta_s) * std::sin(theta_d);
}

/// Signed polarization factor n_D . (3 r (n_S . r) - n_S), |value| <= 2.
inline double polarization_factor(const Pose& tx, const Pose& rx) {
    const Vec3 dr = rx.position - tx.position;
    const double d = dr.norm();
    require_domain(d > 0, "polarization_factor: coincident positions");
    const Vec3 r = dr / d;
    return rx.axis.dot(3 * r * tx.axis.dot(r) - tx.axis);
}

inline double distance(const Pose& a, const Pose& b) { return (b.position - a.position).norm(); }

} // namespace mic

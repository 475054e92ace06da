#pragma once

#include <array>
#include <cmath>
#include <variant>

#include "antennas.hpp"

namespace mic {

using Antenna = std::variant<CoilSpec, RpmaSpec>;

struct GainBreakdown {
    double circuit = 0;
    double space = 0;
    double eddy = 1;
    double polarization = 0;   // J
    double polarization_signed = 0;
    double total = 0;
    double distance = 0;
    bool near_field_valid = true;
    bool weak_coupling_valid = true;
};

inline double eddy_gain(double d, double f, const Medium& m) {
    require_domain(d >= 0, "eddy_gain: distance must be >= 0");
    const double delta = skin_depth(f, m);
    if (std::isinf(delta)) return 1.0;
    return std::exp(-2 * d / delta);
}

inline double space_gain(double d, const Medium& m) {
    require_domain(d > 0, "space_gain: distance must be > 0");
    const double d3 = d * d * d;
    return m.mu * m.mu / (d3 * d3);
}

/// (pi a_S^2 a_D^2 N_S N_D)^2 |w^2 R_L / (Z_S Z_D^2)| / 16.
inline double circuit_gain_coil(const CoilSpec& tx, const CoilSpec& rx, double f) {
    const double w = 2 * pi * f;
    const double p = pi * tx.radius * tx.radius * rx.radius * rx.radius * tx.turns * rx.turns;
    const double zs = std::abs(coil_impedance(tx, f));
    const double zd = std::abs(coil_impedance(rx, f));
    return p * p * w * w * rx.load_resistance / (zs * zd * zd) / 16.0;
}

inline double rpma_friction_factor(const RpmaSpec& r, double f) {
    return r.efficiency / (1 + f / r.friction_corner);
}

inline double rpma_receiver_factor(const CoilSpec& rx, double f) {
    return pi * pi * f * rx.radius / (2 * std::abs(coil_impedance(rx, f)));
}

inline double circuit_gain_rpma(const RpmaSpec& r, const CoilSpec& rx, double f) {
    require_domain(f > 0, "circuit_gain_rpma: frequency must be > 0");
    const double s = r.remanence * r.volume / (4 * pi * mu0);
    return s * s * rpma_friction_factor(r, f) * rpma_receiver_factor(rx, f);
}

inline double circuit_gain(const Antenna& tx, const CoilSpec& rx, double f) {
    if (const auto* c = std::get_if<CoilSpec>(&tx)) return circuit_gain_coil(*c, rx, f);
    return circuit_gain_rpma(std::get<RpmaSpec>(tx), rx, f);
}

inline double antenna_radius(const Antenna& a) {
    if (const auto* c = std::get_if<CoilSpec>(&a)) return c->radius;
    const auto& r = std::get<RpmaSpec>(a);
    return std::cbrt(r.volume);
}

inline GainBreakdown channel_gain(const Antenna& tx, const CoilSpec& rx, const Pose& pose_tx,
                                  const Pose& pose_rx, const Medium& m, double f, double kappa = 1.0) {
    GainBreakdown g;
    g.distance = distance(pose_tx, pose_rx);
    g.circuit = circuit_gain(tx, rx, f);
    g.space = space_gain(g.distance, m);
    g.eddy = eddy_gain(g.distance, f, m);
    g.polarization_signed = polarization_factor(pose_tx, pose_rx);
    g.polarization = g.polarization_signed * g.polarization_signed;
    g.total = g.circuit * g.space * g.eddy * g.polarization;
    g.near_field_valid = std::abs(wavenumber(f, m)) * g.distance <= kappa;
    g.weak_coupling_valid = g.distance > std::max(antenna_radius(tx), rx.radius);
    return g;
}

using CVec3 = Eigen::Vector3cd;

/// Field of a magnetic dipole with moment vector m (A m^2). Time convention
/// e^{-jwt}, so the spatial factor is e^{+jkd} and decays for Im k >= 0.
inline CVec3 dipole_field(const Vec3& moment, const Vec3& displacement, double f, const Medium& med) {
    const double d = displacement.norm();
    require_domain(d > 0, "dipole_field: zero displacement");
    const cplx k = wavenumber(f, med);
    const cplx j(0, 1);
    const Vec3 r = displacement / d;
    const double mr = moment.dot(r);
    const cplx ph = std::exp(j * k * d) / (4 * pi);
    const cplx radial = (1.0 / (d * d * d) - j * k / (d * d)) * ph;
    const cplx transverse = (1.0 / (d * d * d) - j * k / (d * d) - k * k / d) * ph;
    // m = (m.r) r + m_perp ; H = 2 radial (m.r) r - transverse m_perp
    const Vec3 m_perp = moment - mr * r;
    CVec3 h;
    for (int i = 0; i < 3; ++i) h[i] = 2.0 * radial * mr * r[i] - transverse * m_perp[i];
    return h;
}

inline cplx flux_linkage(const CVec3& h, const CoilSpec& rx, const Pose& pose_rx, const Medium& med) {
    cplx hn = 0;
    for (int i = 0; i < 3; ++i) hn += h[i] * pose_rx.axis[i];
    return med.mu * hn * static_cast<double>(rx.turns) * pi * rx.radius * rx.radius;
}

/// Gain |I_D|^2 R_L / |I_S|^2 |Z_S| obtained from the full dipole field and flux linkage.
inline double field_gain(const CoilSpec& tx, const CoilSpec& rx, const Pose& pose_tx, const Pose& pose_rx,
                         const Medium& med, double f) {
    const Vec3 moment = tx.turns * pi * tx.radius * tx.radius * pose_tx.axis; // per ampere
    const CVec3 h = dipole_field(moment, pose_rx.position - pose_tx.position, f, med);
    const cplx emf = cplx(0, 2 * pi * f) * flux_linkage(h, rx, pose_rx, med);
    const double id = std::abs(emf) / std::abs(coil_impedance(rx, f));
    return id * id * rx.load_resistance / std::abs(coil_impedance(tx, f));
}

} // namespace mic

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "em.hpp"
#include "geometry.hpp"

namespace mic {

struct CoilSpec {
    double radius = 0.6;
    int turns = 15;
    double wire_resistance_per_m = 0.166;
    double wire_radius = 2.0e-5;
    double load_resistance = 1.0;
    double tuned_frequency = 1e4;

    void validate(const std::string& name = "coil") const {
        require(radius > 0, name + ".radius must be > 0");
        require(turns >= 1, name + ".turns must be >= 1");
        require(wire_resistance_per_m >= 0, name + ".wire_resistance_per_m must be >= 0");
        require(wire_radius > 0 && wire_radius < radius, name + ".wire_radius must be in (0, radius)");
        require(load_resistance > 0, name + ".load_resistance must be > 0");
        require(tuned_frequency > 0, name + ".tuned_frequency must be > 0");
    }

    CoilSpec tuned_to(double f0) const {
        CoilSpec c = *this;
        c.tuned_frequency = f0;
        return c;
    }

    bool operator==(const CoilSpec&) const = default;
};

inline CoilSpec default_tx_coil() { return {}; }
inline CoilSpec default_rx_coil() {
    CoilSpec c;
    c.radius = 0.4;
    c.turns = 30;
    return c;
}

/// Rated rotor acceleration of the reference RPMA, Hz/s.
inline constexpr double rpma_rated_acceleration = 539.0;

inline double rpma_ramp_time(double f, double accel_hz_per_s = rpma_rated_acceleration) {
    // dt = 2 pi f / (2 pi accel)
    return f / accel_hz_per_s;
}

struct RpmaSpec {
    double remanence = 1.2;
    double volume = 1e-4;
    double efficiency = 0.5;
    double friction_torque = 1e-3;
    double moment_of_inertia = 3.75e-4;
    double ramp_time = rpma_ramp_time(1e3);
    double friction_corner = 1e3; // f_c of the friction-loss model

    void validate(const std::string& name = "rpma") const {
        require(remanence > 0, name + ".remanence must be > 0");
        require(volume > 0, name + ".volume must be > 0");
        require(efficiency > 0 && efficiency <= 1, name + ".efficiency must be in (0, 1]");
        require(friction_torque >= 0, name + ".friction_torque must be >= 0");
        require(moment_of_inertia > 0, name + ".moment_of_inertia must be > 0");
        require(ramp_time > 0, name + ".ramp_time must be > 0");
        require(friction_corner > 0, name + ".friction_corner must be > 0");
    }
};

inline double coil_resistance(const CoilSpec& c) {
    return c.wire_resistance_per_m * 2 * pi * c.radius * c.turns;
}

inline double coil_inductance(const CoilSpec& c) {
    const double n = c.turns;
    return mu0 * n * n * c.radius * (std::log(8 * c.radius / c.wire_radius) - 2);
}

inline double matching_capacitance(const CoilSpec& c) {
    const double w0 = 2 * pi * c.tuned_frequency;
    return 1.0 / (w0 * w0 * coil_inductance(c));
}

inline cplx coil_impedance(const CoilSpec& c, double f) {
    require_domain(f > 0, "coil_impedance: frequency must be > 0");
    const double w = 2 * pi * f;
    const double L = coil_inductance(c);
    const double C = matching_capacitance(c);
    // written as j(wL - 1/(wC)) so the reactance cancels exactly at f0 up to rounding
    return {coil_resistance(c) + c.load_resistance, w * L - 1.0 / (w * C)};
}

inline double quality_factor(const CoilSpec& c) {
    return 2 * pi * c.tuned_frequency * coil_inductance(c) / (coil_resistance(c) + c.load_resistance);
}

struct MutualInductance {
    double value = 0;
    bool weak_coupling_valid = true;
};

/// Dipole-coupling mutual inductance mu pi a^2 a^2 N N J e^{-d/delta} / (4 d^3).
inline MutualInductance mutual_inductance(const CoilSpec& tx, const CoilSpec& rx, const Pose& pose_tx,
                                          const Pose& pose_rx, const Medium& m, double f) {
    const double d = distance(pose_tx, pose_rx);
    require_domain(d > 0, "mutual_inductance: coincident positions");
    const double J = polarization_factor(pose_tx, pose_rx);
    const double a2 = tx.radius * tx.radius * rx.radius * rx.radius;
    const double root_eddy = std::exp(-d / skin_depth(f, m));
    MutualInductance out;
    out.value = m.mu * pi * a2 * tx.turns * rx.turns * J * root_eddy / (4 * d * d * d);
    out.weak_coupling_valid = d > std::max(tx.radius, rx.radius);
    return out;
}

inline double rpma_moment(const RpmaSpec& r) { return r.remanence * r.volume / mu0; }

struct RpmaPower {
    double power = 0;
    double inertia_share = 0;
};

inline RpmaPower rpma_input_power(const RpmaSpec& r, double f) {
    require_domain(f > 0, "rpma_input_power: frequency must be > 0");
    const double w = 2 * pi * f;
    const double tau_nr = r.moment_of_inertia * w / r.ramp_time;
    const double tau = r.friction_torque + tau_nr;
    return {tau * w / r.efficiency, tau_nr / tau};
}

} // namespace mic

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mic/mic.hpp"

using namespace mic;

namespace {

// Two coaxial coplanar filament loops, Maxwell's elliptic-integral form.
double loop_mutual(double a, double b, double mu = mu0) {
    const double k = std::sqrt(4 * a * b) / (a + b);
    return mu * std::sqrt(a * b) * ((2 / k - k) * std::comp_ellint_1(k) - 2 / k * std::comp_ellint_2(k));
}

CoilSpec thick_wire() {
    CoilSpec c;
    c.wire_radius = 1.5e-3;
    return c;
}

} // namespace

TEST(Medium, LosslessWavenumberIsReal) {
    const double f = 1e4;
    const cplx k = wavenumber(f, media::air());
    EXPECT_DOUBLE_EQ(k.imag(), 0.0);
    EXPECT_NEAR(k.real(), 2 * pi * f * std::sqrt(mu0 * eps0), 1e-15);
}

TEST(Medium, SoilWavenumberMagnitude) {
    EXPECT_NEAR(std::abs(wavenumber(1e4, Medium{})), 0.0281, 5e-4);
    EXPECT_NEAR(std::abs(wavenumber(1e5, Medium{})), 0.0889, 5e-4);
    // good-conductor limit sqrt(w mu sigma)
    EXPECT_NEAR(std::abs(wavenumber(1e4, Medium{})), std::sqrt(2 * pi * 1e4 * mu0 * 0.01), 1e-3 * 0.0281);
    EXPECT_GT(wavenumber(1e4, Medium{}).imag(), 0);
}

TEST(Medium, SkinDepth) {
    EXPECT_NEAR(skin_depth(1e4, Medium{}, SkinDepthMode::vlf), 50.33, 0.05);
    EXPECT_TRUE(std::isinf(skin_depth(1e4, media::air())));
    const double e = skin_depth(1e4, Medium{}), v = skin_depth(1e4, Medium{}, SkinDepthMode::vlf);
    EXPECT_LT(std::abs(e - v) / v, 0.01);
}

TEST(Medium, NearFieldBoundary) {
    EXPECT_NEAR(near_field_boundary(1e5, Medium{}), 11.25, 0.05);
    EXPECT_NEAR(near_field_boundary(1e5, Medium{}, 2.0), 2 * near_field_boundary(1e5, Medium{}), 1e-12);
    EXPECT_GT(near_field_boundary(1e-3, media::air()), 1e10);
    EXPECT_NEAR(near_field_boundary(1e-5, media::air()) / near_field_boundary(1e-3, media::air()), 100, 1e-6);
}

TEST(Medium, RejectsBadValues) {
    Medium m;
    m.sigma = -1;
    EXPECT_THROW(m.validate(), config_error);
    EXPECT_THROW(wavenumber(-1, Medium{}), std::domain_error);
}

TEST(Coil, Resistance) {
    EXPECT_NEAR(coil_resistance(CoilSpec{}), 0.166 * 2 * pi * 0.6 * 15, 1e-12);
    EXPECT_NEAR(coil_resistance(CoilSpec{}), 9.387, 1e-3);
    CoilSpec c;
    c.wire_resistance_per_m = 0;
    EXPECT_EQ(coil_resistance(c), 0.0);
    c = CoilSpec{};
    c.turns = 30;
    EXPECT_NEAR(coil_resistance(c), 2 * coil_resistance(CoilSpec{}), 1e-12);
}

TEST(Coil, InductanceExample) {
    EXPECT_NEAR(coil_inductance(thick_wire()), 1.03e-3, 0.01e-3);
    CoilSpec c = thick_wire();
    c.turns = 60;
    EXPECT_NEAR(coil_inductance(c), 16 * coil_inductance(thick_wire()), 1e-12);
    c = thick_wire();
    c.wire_radius = 3e-3;
    EXPECT_LT(coil_inductance(c), coil_inductance(thick_wire()));
}

TEST(Coil, InductanceMatchesLoopPairOracle) {
    // a thin ring's self inductance is the mutual inductance between its axis filament and the wire surface
    for (double rw : {1.5e-3, 1e-4, 2e-5}) {
        CoilSpec c;
        c.wire_radius = rw;
        const double oracle = c.turns * c.turns * loop_mutual(c.radius, c.radius - rw);
        EXPECT_NEAR(coil_inductance(c) / oracle, 1.0, 5e-3) << "r_w=" << rw;
    }
}

TEST(Coil, MatchingCapacitance) {
    for (const CoilSpec& c : {default_tx_coil(), default_rx_coil(), thick_wire()}) {
        const double f = 1 / (2 * pi * std::sqrt(coil_inductance(c) * matching_capacitance(c)));
        EXPECT_NEAR(f, c.tuned_frequency, 1e-9 * c.tuned_frequency);
    }
    EXPECT_NEAR(matching_capacitance(thick_wire()), 0.246e-6, 0.003e-6);
    EXPECT_NEAR(matching_capacitance(thick_wire().tuned_to(5e3)), 4 * matching_capacitance(thick_wire()), 1e-15);
}

TEST(Coil, ImpedanceAroundResonance) {
    const CoilSpec c;
    const cplx z = coil_impedance(c, c.tuned_frequency);
    EXPECT_NEAR(z.imag(), 0, 1e-9);
    EXPECT_NEAR(z.real(), coil_resistance(c) + c.load_resistance, 1e-12);
    EXPECT_GT(std::abs(coil_impedance(c, 1e-3)), 1e6);
    EXPECT_GT(coil_impedance(c, 1.001 * c.tuned_frequency).imag(), 0);
    EXPECT_LT(coil_impedance(c, 0.999 * c.tuned_frequency).imag(), 0);
}

TEST(Coil, ValidateNamesField) {
    CoilSpec c;
    c.radius = -0.1;
    try {
        c.validate("tx");
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("tx.radius"), std::string::npos);
    }
}

TEST(Mutual, CoaxialLossless) {
    const CoilSpec a, b = default_rx_coil();
    const double d = 20;
    const Pose pa{Vec3::Zero(), Vec3::UnitX()}, pb{Vec3(d, 0, 0), Vec3::UnitX()};
    const auto m = mutual_inductance(a, b, pa, pb, media::air(), 1e4);
    const double expected = mu0 * pi * 0.36 * 0.16 * 15 * 30 / (2 * d * d * d);
    EXPECT_NEAR(m.value / expected, 1.0, 1e-12);
    EXPECT_TRUE(m.weak_coupling_valid);
}

TEST(Mutual, NullOrientation) {
    const CoilSpec c;
    const Pose pa{Vec3::Zero(), Vec3::UnitY()}, pb{Vec3(10, 0, 0), Vec3::UnitX()};
    EXPECT_NEAR(mutual_inductance(c, c, pa, pb, Medium{}, 1e4).value, 0.0, 1e-20);
}

TEST(Mutual, EddyFactorAtSixtyMetres) {
    const CoilSpec c;
    const Pose pa{Vec3::Zero(), Vec3::UnitX()}, pb{Vec3(60, 0, 0), Vec3::UnitX()};
    const double lossy = mutual_inductance(c, c, pa, pb, Medium{}, 1e4).value;
    const double lossless = mutual_inductance(c, c, pa, pb, media::air(), 1e4).value;
    EXPECT_NEAR(lossy / lossless, std::exp(-60 / skin_depth(1e4, Medium{})), 1e-12);
    EXPECT_NEAR(lossy / lossless, 0.303, 0.003);
}

TEST(Mutual, StrongCouplingFlagged) {
    const CoilSpec c;
    const Pose pa{Vec3::Zero(), Vec3::UnitX()}, pb{Vec3(0.5, 0, 0), Vec3::UnitX()};
    EXPECT_FALSE(mutual_inductance(c, c, pa, pb, Medium{}, 1e4).weak_coupling_valid);
}

TEST(Rpma, Moment) {
    RpmaSpec r;
    EXPECT_NEAR(rpma_moment(r), 1.2e-4 / mu0, 1e-9);
    EXPECT_NEAR(rpma_moment(r), 95.49, 0.01);
    r.volume *= 2;
    EXPECT_NEAR(rpma_moment(r), 2 * 95.49, 0.02);
    r.remanence = 0;
    EXPECT_EQ(rpma_moment(r), 0.0);
}

TEST(Rpma, RampTimeRoundTrip) {
    const double f = 2e3;
    const double dt = rpma_ramp_time(f);
    EXPECT_NEAR((2 * pi * f / dt) * dt, 2 * pi * f, 1e-9);
    EXPECT_NEAR(dt, f / 539.0, 1e-12);
    EXPECT_DOUBLE_EQ(RpmaSpec{}.moment_of_inertia, 3.75e-4);
}

TEST(Rpma, InputPowerScaling) {
    RpmaSpec r;
    r.ramp_time = 1.0; // fixed ramp so both torques are fixed
    const double p1 = rpma_input_power(r, 100).power, p2 = rpma_input_power(r, 200).power;
    EXPECT_GT(p2 / p1, 2.0);
    EXPECT_LT(p2 / p1, 4.0);
    r.friction_torque = 0;
    EXPECT_LT(rpma_input_power(r, 1e-6).power, 1e-12);
}

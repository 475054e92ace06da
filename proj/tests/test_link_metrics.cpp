#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mic/mic.hpp"

using namespace mic;

namespace {

LinkSpec identical_link(double d = 60) {
    return make_link(d, 0, pi, Medium{}, default_tx_coil(), default_tx_coil());
}

double range_at(const Medium& m, double f, double th) {
    LinkSpec l = default_link();
    l.medium = m;
    return mic_range(tuned_to(l, f), th).distance;
}

} // namespace

TEST(Bandwidth, NumericPlateau) {
    double lo = 1e9, hi = 0;
    for (double f : {1e3, 1e4, 1e5, 1e6}) {
        const LinkSpec l = tuned_to(default_link(), f);
        const auto b = bandwidth_numeric(l);
        EXPECT_GE(b.value, 340) << f;
        EXPECT_LE(b.value, 560) << f;
        const double g0 = link_gain(l, f).total;
        EXPECT_NEAR(link_gain(l, b.f_lo).total / g0, 0.5, 1e-4);
        EXPECT_NEAR(link_gain(l, b.f_hi).total / g0, 0.5, 1e-4);
        EXPECT_FALSE(b.multiple_crossings);
        lo = std::min(lo, b.value), hi = std::max(hi, b.value);
    }
    EXPECT_LT(hi / lo, 2.0);
}

TEST(Bandwidth, DipoleClosedFormNearNumeric) {
    const LinkSpec l = identical_link();
    EXPECT_NEAR(bandwidth_dipole_closed(l).value / bandwidth_numeric(l).value, 1.0, 0.10);
    EXPECT_THROW(bandwidth_dipole_closed(default_link()), config_error);
}

TEST(Bandwidth, PrintedImpedanceHasNegativeDiscriminant) {
    const CoilSpec c;
    const double r = coil_resistance(c) + c.load_resistance;
    EXPECT_THROW(dipole_bandwidth_formula(printed_dipole_impedance(r), c.tuned_frequency, matching_capacitance(c), r),
                 numeric_error);
}

TEST(Bandwidth, ClosedFormTracksResistanceSweep) {
    double prev_c = 1e9, prev_n = 1e9;
    for (double rl : {20.0, 10.0, 5.0, 1.0, 0.1}) {
        CoilSpec c;
        c.load_resistance = rl;
        LinkSpec l = make_link(60, 0, pi, Medium{}, c, c);
        const double bc = bandwidth_dipole_closed(l).value, bn = bandwidth_numeric(l).value;
        EXPECT_LT(bc, prev_c);
        EXPECT_LT(bn, prev_n);
        EXPECT_NEAR(bc / bn, 1.0, 0.10) << rl;
        prev_c = bc, prev_n = bn;
    }
}

TEST(Bandwidth, CouplingEstimate) {
    EXPECT_DOUBLE_EQ(bandwidth_coupling(50, 30, 1e4).value, 200.0);
    EXPECT_DOUBLE_EQ(bandwidth_coupling(40, 40, 1e4).value, 250.0);
    const double r = bandwidth_coupling(default_link()).value / bandwidth_numeric(default_link()).value;
    EXPECT_GT(r, 1.0 / 3);
    EXPECT_LT(r, 3.0);
    const LinkSpec s = identical_link();
    const double b[] = {bandwidth_numeric(s).value, bandwidth_dipole_closed(s).value, bandwidth_coupling(s).value};
    EXPECT_LT(*std::max_element(b, b + 3) / *std::min_element(b, b + 3), 10.0);
}

TEST(Snr, ScalingAndHandChain) {
    LinkSpec l = default_link();
    const double f = l.carrier();
    const double s1 = snr(l, f);
    l.tx_power *= 2;
    EXPECT_NEAR(snr(l, f) / s1, 2.0, 1e-12);
    const LinkSpec d = default_link();
    const double bw = bandwidth_numeric(d).value;
    const double chain = circuit_gain_coil(default_tx_coil(), default_rx_coil(), f) * space_gain(60, d.medium) *
                         eddy_gain(60, f, d.medium) * 4 * (5.0 / bw) / default_noise_psd();
    EXPECT_NEAR(s1 / chain, 1.0, 1e-12);
    EXPECT_LT(snr(make_link(60, pi / 2, 0), f), 1e-25 * s1); // cos(pi/2) is not exactly 0
}

TEST(Capacity, ConductivityContrast) {
    LinkSpec soil = tuned_to(with_distance(default_link(), 45), 1e3), sea = soil;
    sea.medium.sigma = 4.8;
    EXPECT_GT(capacity(soil).value / capacity(sea).value, 320);
}

TEST(Capacity, LongRangeBelowTenKbit) {
    for (double f : {1e3, 1e4, 1e5, 1e6})
        for (double d = 61; d <= 200; d += 7) EXPECT_LT(capacity(tuned_to(with_distance(default_link(), d), f)).value, 1e4);
}

TEST(Capacity, ModesAndLimits) {
    const LinkSpec l = default_link();
    const auto flat = capacity(l), integ = capacity(l, CapacityMode::integral);
    EXPECT_LT(integ.value, flat.value);
    EXPECT_GT(integ.value, 0.5 * flat.value);
    LinkSpec weak = l;
    weak.tx_power = 1e-20;
    EXPECT_LT(capacity(weak).value, 1e-6);
}

TEST(Range, ThresholdMonotone) {
    const LinkSpec l = default_link();
    EXPECT_GT(mic_range(l, 0.02).distance, mic_range(l, 0.04).distance);
    EXPECT_THROW(mic_range(l, -1), config_error);
}

TEST(Range, DrySoilPeaksAtTenKilohertz) {
    const std::vector<double> fs{1e3, 5e3, 1e4, 5e4, 1e5};
    std::vector<double> dry, wet;
    for (double f : fs) {
        dry.push_back(range_at(media::dry_soil(), f, 0.02));
        wet.push_back(range_at(media::wet_soil(), f, 0.02));
    }
    EXPECT_EQ(std::max_element(dry.begin(), dry.end()) - dry.begin(), 2);
    EXPECT_GT(*std::max_element(dry.begin(), dry.end()), 100);
    EXPECT_LT(*std::max_element(wet.begin(), wet.end()), *std::max_element(dry.begin(), dry.end()));
}

TEST(Range, NoEddyGeometry) {
    const Vec3 m(0, 0, 3.0);
    const double s = 1e-12;
    EXPECT_NEAR(range_no_eddy(m, Vec3::UnitZ(), s), std::cbrt(2 * mu0 * 3.0 / (4 * pi * s)), 1e-9);
    EXPECT_NEAR(range_no_eddy(m, Vec3::UnitZ(), s) / range_no_eddy(m, Vec3::UnitX(), s), std::cbrt(2.0), 1e-12);
}

TEST(Range, NoEddyMatchesMicRangeInAir) {
    LinkSpec l = make_link(60, 0, 0, media::air());
    const double d = mic_range(l, 0.02).distance;
    const auto& tx = std::get<CoilSpec>(l.tx);
    const Vec3 moment = tx.turns * pi * tx.radius * tx.radius * l.tx_pose.axis;
    // field strength at the solved range is the matched threshold
    const double b = mu0 * dipole_field(moment, Vec3(d, 0, 0), l.carrier(), media::air()).norm();
    EXPECT_NEAR(range_no_eddy(moment, Vec3::UnitX(), b) / d, 1.0, 0.05);
}

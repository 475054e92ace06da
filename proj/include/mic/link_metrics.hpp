#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "channel_gain.hpp"
#include "fading.hpp"
#include "quadrature.hpp"

namespace mic {

/// -103 dBm over 2 kHz expressed as W/Hz.
inline double default_noise_psd() { return std::pow(10.0, -10.3) * 1e-3 / 2000.0; }

inline double dbm_per_band_to_psd(double dbm, double band_hz) { return std::pow(10.0, dbm / 10) * 1e-3 / band_hz; }

struct LinkSpec {
    Antenna tx = default_tx_coil();
    CoilSpec rx = default_rx_coil();
    Pose tx_pose{Vec3::Zero(), Vec3::UnitX()};
    Pose rx_pose{Vec3(60, 0, 0), -Vec3::UnitX()};
    Medium medium{};
    double tx_power = 5.0;
    std::optional<double> tx_psd;
    double noise_psd = default_noise_psd();
    FadingModel fading = NoFading{};
    double kappa = 1.0;

    double carrier() const {
        if (const auto* c = std::get_if<CoilSpec>(&tx)) return c->tuned_frequency;
        return rx.tuned_frequency;
    }

    void validate() const {
        if (const auto* c = std::get_if<CoilSpec>(&tx)) c->validate("tx");
        else std::get<RpmaSpec>(tx).validate("tx");
        rx.validate("rx");
        tx_pose.validate();
        rx_pose.validate();
        medium.validate();
        require(tx_power > 0, "tx_power must be > 0");
        require(!tx_psd || *tx_psd > 0, "tx_psd must be > 0");
        require(noise_psd > 0, "noise_psd must be > 0");
        mic::validate(fading);
    }
};

/// Coplanar link along +x with the tx at the origin.
inline LinkSpec make_link(double d, double theta_s, double theta_d, const Medium& m = {},
                          const Antenna& tx = default_tx_coil(), const CoilSpec& rx = default_rx_coil()) {
    LinkSpec l;
    l.tx = tx;
    l.rx = rx;
    l.medium = m;
    l.tx_pose = Pose::make(Vec3::Zero(), tx_axis_coplanar(theta_s));
    l.rx_pose = Pose::make(Vec3(d, 0, 0), rx_axis_coplanar(theta_d));
    return l;
}

/// Default point-to-point link: 60 m, theta_S = 0, theta_D = pi.
inline LinkSpec default_link() { return make_link(60, 0, pi); }

inline LinkSpec with_distance(LinkSpec l, double d) {
    const Vec3 dir = (l.rx_pose.position - l.tx_pose.position).normalized();
    l.rx_pose.position = l.tx_pose.position + d * dir;
    return l;
}

/// Retune every coil of the link to f0.
inline LinkSpec tuned_to(LinkSpec l, double f0) {
    if (auto* c = std::get_if<CoilSpec>(&l.tx)) c->tuned_frequency = f0;
    l.rx.tuned_frequency = f0;
    return l;
}

inline GainBreakdown link_gain(const LinkSpec& l, double f) {
    return channel_gain(l.tx, l.rx, l.tx_pose, l.rx_pose, l.medium, f, l.kappa);
}

enum class BandwidthMethod { numeric, dipole_closed, coupling };

struct BandwidthResult {
    BandwidthMethod method = BandwidthMethod::numeric;
    double value = 0;
    double f_lo = 0, f_hi = 0;
    bool multiple_crossings = false;
};

namespace detail {

template <class R>
double bisect_crossing(R&& resp, double half, double inside, double outside) {
    // resp(inside) >= half > resp(outside)
    for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-13 * std::abs(inside); ++i) {
        const double mid = 0.5 * (inside + outside);
        (resp(mid) >= half ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
}

// Scans outward from f0 with geometrically growing offsets; returns the first
// half-power crossing and whether the response climbs back above half later.
template <class R>
std::optional<std::pair<double, bool>> side_crossing(R&& resp, double f0, double half, int side) {
    const double max_off = side > 0 ? 99 * f0 : 0.99 * f0;
    double prev = f0;
    std::optional<double> crossing;
    bool again = false;
    // finer steps until the first crossing, coarser while looking for a second one
    for (double off = f0 * 1e-7;; off *= crossing ? 1.1 : 1.05) {
        const bool last = off >= max_off;
        const double f = f0 + side * std::min(off, max_off);
        const double v = resp(f);
        if (!crossing) {
            if (v < half) crossing = bisect_crossing(resp, half, prev, f);
        } else if (v >= half) {
            again = true;
            break;
        }
        prev = f;
        if (last) break;
    }
    if (!crossing) return std::nullopt;
    return std::make_pair(*crossing, again);
}

} // namespace detail

/// Half-power band of an arbitrary response around f0, searched in [f0/100, 100 f0].
template <class R>
BandwidthResult half_power_band(R&& resp, double f0) {
    const double peak = resp(f0);
    if (!(peak > 0) || !std::isfinite(peak)) throw numeric_error("half_power_band: response at f0 is not positive");
    const double half = peak / 2;
    const auto lo = detail::side_crossing(resp, f0, half, -1);
    const auto hi = detail::side_crossing(resp, f0, half, +1);
    if (!lo || !hi) throw numeric_error("half_power_band: no half-power crossing in [f0/100, 100 f0]");
    BandwidthResult r;
    r.f_lo = lo->first;
    r.f_hi = hi->first;
    r.value = r.f_hi - r.f_lo;
    r.multiple_crossings = lo->second || hi->second;
    return r;
}

inline BandwidthResult bandwidth_numeric(const LinkSpec& l) {
    return half_power_band([&](double f) { return link_gain(l, f).total; }, l.carrier());
}

/// Evaluates B = sqrt(w + r) - sqrt(w - r) with
/// w = f0^2 + 2 pi^2 C^2 f0^4 (Z_C^{-2/3} - R^2) and r = sqrt(w^2 - f0^4).
inline double dipole_bandwidth_formula(double z_c, double f0, double c_d, double r_total) {
    const double f02 = f0 * f0;
    const double varpi = f02 + 2 * pi * pi * c_d * c_d * f02 * f02 * (std::pow(z_c, -2.0 / 3.0) - r_total * r_total);
    const double disc = varpi * varpi - f02 * f02;
    if (!(disc >= 0) || varpi < 0) throw numeric_error("dipole bandwidth: negative discriminant");
    const double rho = std::sqrt(disc);
    return std::sqrt(varpi + rho) - std::sqrt(varpi - rho);
}

/// The impedance level printed alongside the closed form, (R_cD + R_L)^3 / 8.
inline double printed_dipole_impedance(double r_total) { return r_total * r_total * r_total / 8; }

/// Half-power level of |Z|^{-3}: |Z|^3 = 2 R^3, expressed as Z_C with Z_C^{-2/3} = |Z|^2.
inline double half_power_dipole_impedance(double r_total) { return 1.0 / (2 * r_total * r_total * r_total); }

inline BandwidthResult bandwidth_dipole_closed(const LinkSpec& l) {
    const auto* tx = std::get_if<CoilSpec>(&l.tx);
    if (!tx || !(*tx == l.rx))
        throw config_error("bandwidth_dipole_closed needs identical tx and rx coils; use bandwidth_numeric");
    const double r = coil_resistance(l.rx) + l.rx.load_resistance;
    BandwidthResult out;
    out.method = BandwidthMethod::dipole_closed;
    out.value = dipole_bandwidth_formula(half_power_dipole_impedance(r), l.rx.tuned_frequency,
                                         matching_capacitance(l.rx), r);
    return out;
}

inline BandwidthResult bandwidth_coupling(double qs, double qd, double f0) {
    require(qs > 0 && qd > 0, "bandwidth_coupling: Q factors must be > 0");
    BandwidthResult out;
    out.method = BandwidthMethod::coupling;
    out.value = f0 / std::max(qs, qd);
    return out;
}

inline BandwidthResult bandwidth_coupling(const LinkSpec& l) {
    const double qd = quality_factor(l.rx);
    const double qs = std::holds_alternative<CoilSpec>(l.tx) ? quality_factor(std::get<CoilSpec>(l.tx)) : qd;
    return bandwidth_coupling(qs, qd, l.carrier());
}

/// Transmit PSD: explicit value, or P_S spread over the numeric 3-dB band.
inline double tx_psd(const LinkSpec& l) {
    if (l.tx_psd) return *l.tx_psd;
    return l.tx_power / bandwidth_numeric(l).value;
}

inline double snr(const LinkSpec& l, double f, double psd) { return psd * link_gain(l, f).total / l.noise_psd; }
inline double snr(const LinkSpec& l, double f) { return snr(l, f, tx_psd(l)); }

enum class CapacityMode { flat, integral };

struct CapacityResult {
    double value = 0;
    BandwidthResult bandwidth;
    double snr_f0 = 0;
};

inline CapacityResult capacity(const LinkSpec& l, CapacityMode mode = CapacityMode::flat) {
    CapacityResult r;
    r.bandwidth = bandwidth_numeric(l);
    const double psd = l.tx_psd ? *l.tx_psd : l.tx_power / r.bandwidth.value;
    r.snr_f0 = snr(l, l.carrier(), psd);
    if (mode == CapacityMode::flat) {
        r.value = r.bandwidth.value * std::log2(1 + r.snr_f0);
    } else {
        auto g = [&](double f) { return std::log2(1 + snr(l, f, psd)); };
        r.value = integrate(g, r.bandwidth.f_lo, r.bandwidth.f_hi, 1e-10, 1e-10).value;
    }
    return r;
}

struct RangeResult {
    double distance = 0;
    bool capped = false;
};

inline constexpr double range_min_distance = 0.1;
inline constexpr double range_max_distance = 1e4;

/// Distance along the link direction where the SNR at the carrier falls to the threshold.
inline RangeResult mic_range(const LinkSpec& l, double threshold) {
    require(threshold > 0, "mic_range: threshold must be > 0");
    const double psd = tx_psd(l);
    const double f = l.carrier();
    auto s = [&](double d) { return snr(with_distance(l, d), f, psd); };
    if (!(s(range_min_distance) > threshold))
        throw numeric_error("mic_range: threshold not reached even at 0.1 m");
    if (s(range_max_distance) >= threshold) return {range_max_distance, true};
    double lo = std::log(range_min_distance), hi = std::log(range_max_distance);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (s(std::exp(mid)) >= threshold ? lo : hi) = mid;
    }
    return {std::exp(0.5 * (lo + hi)), false};
}

/// Eddy-free range: d^3 = mu |m| / (4 pi S_min) |3 (m.r) r - m| with unit m, r.
inline double range_no_eddy(const Vec3& moment, const Vec3& direction, double s_min, double mu = mu0) {
    require(s_min > 0, "range_no_eddy: s_min must be > 0");
    const double mag = moment.norm();
    const Vec3 mh = moment / mag;
    const Vec3 r = direction.normalized();
    const double factor = (3 * mh.dot(r) * r - mh).norm();
    return std::cbrt(mu * mag / (4 * pi * s_min) * factor);
}

struct BerPoint {
    double ebn0 = 0;
    double ber_awgn = 0;
    double ber_fading = 0;
};

/// Uncoded BPSK: Q(sqrt(2 Eb/N0 X)) averaged over the link's fading law.
inline std::vector<BerPoint> uncoded_ber_curve(const LinkSpec& l, const std::vector<double>& ebn0,
                                               const McOptions& mc = {}) {
    std::vector<BerPoint> out;
    out.reserve(ebn0.size());
    for (double e : ebn0) out.push_back({e, q_function(std::sqrt(2 * e)), ergodic_ber(l.fading, 2 * e, mc).value});
    return out;
}

} // namespace mic

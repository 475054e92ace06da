#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "link_metrics.hpp"
#include "parallel.hpp"

namespace mic {

// ---- general KVL constellation ----

struct KvlCoil {
    CoilSpec coil;
    Pose pose;
    cplx drive = 0;
};

enum class CouplingMask { all, nearest_neighbour };

struct KvlSystem {
    std::vector<KvlCoil> coils;
    double frequency = 1e4;
    Medium medium{};
    CouplingMask mask = CouplingMask::all;
};

struct KvlSolution {
    Eigen::VectorXcd currents;
    double residual = 0;
    double condition = 0;
};

inline Eigen::MatrixXcd impedance_matrix(const KvlSystem& s) {
    const auto n = static_cast<Eigen::Index>(s.coils.size());
    const double w = 2 * pi * s.frequency;
    Eigen::MatrixXcd z(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        z(k, k) = coil_impedance(s.coils[k].coil, s.frequency);
        for (Eigen::Index l = k + 1; l < n; ++l) {
            cplx zkl = 0;
            if (s.mask == CouplingMask::all || l == k + 1) {
                const auto& a = s.coils[k];
                const auto& b = s.coils[l];
                zkl = cplx(0, w) * mutual_inductance(a.coil, b.coil, a.pose, b.pose, s.medium, s.frequency).value;
            }
            z(k, l) = z(l, k) = zkl;
        }
    }
    return z;
}

inline KvlSolution kvl_solve(const KvlSystem& s) {
    require(s.coils.size() >= 2, "kvl_solve: need at least two coils");
    const Eigen::MatrixXcd z = impedance_matrix(s);
    const auto n = z.rows();
    Eigen::VectorXcd u(n);
    for (Eigen::Index k = 0; k < n; ++k) u[k] = s.coils[k].drive;

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(z);
    const auto& sv = svd.singularValues();
    const double cond = sv[0] / sv[n - 1];
    if (!(cond <= 1e12)) {
        Eigen::Index bk = 0, bl = 1;
        double worst = -1;
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index l = k + 1; l < n; ++l) {
                const double c = std::abs(z(k, l)) / std::sqrt(std::abs(z(k, k)) * std::abs(z(l, l)));
                if (c > worst) worst = c, bk = k, bl = l;
            }
        std::ostringstream os;
        os << "kvl_solve: impedance matrix near-singular (condition " << cond << "), degenerate coil pair (" << bk
           << ", " << bl << ")";
        throw numeric_error(os.str());
    }
    KvlSolution out;
    out.currents = z.partialPivLu().solve(u);
    out.condition = cond;
    const double un = u.norm();
    out.residual = un > 0 ? (z * out.currents - u).norm() / un : (z * out.currents).norm();
    if (!(out.residual < 1e-10)) throw numeric_error("kvl_solve: residual above 1e-10");
    return out;
}

/// |I_rx|^2 R_L / |U_tx I_tx|.
inline double kvl_power_gain(const KvlSystem& s, const KvlSolution& sol, std::size_t tx, std::size_t rx) {
    const auto i = static_cast<Eigen::Index>(rx);
    const auto t = static_cast<Eigen::Index>(tx);
    const double id = std::abs(sol.currents[i]);
    return id * id * s.coils[rx].coil.load_resistance / std::abs(s.coils[tx].drive * sol.currents[t]);
}

inline KvlSystem two_coil_system(const CoilSpec& tx, const CoilSpec& rx, const Pose& ptx, const Pose& prx,
                                 const Medium& m, double f) {
    return {{{tx, ptx, 1.0}, {rx, prx, 0.0}}, f, m, CouplingMask::all};
}

// ---- crosstalk with one passive coil ----

struct CrosstalkImpedances {
    cplx z_lc, z_sd, z_sr, z_rd;
};

inline CrosstalkImpedances crosstalk_terms(const CoilSpec& coil, const Pose& s, const Pose& d, const Pose& r,
                                           double f, const Medium& m) {
    const cplx jw(0, 2 * pi * f);
    return {coil_impedance(coil, f), jw * mutual_inductance(coil, coil, s, d, m, f).value,
            jw * mutual_inductance(coil, coil, s, r, m, f).value, jw * mutual_inductance(coil, coil, r, d, m, f).value};
}

inline cplx crosstalk_pa1(const CrosstalkImpedances& t) { return t.z_rd * t.z_sr * t.z_lc; }

inline cplx crosstalk_pa2(const CrosstalkImpedances& t) {
    const cplx z2 = t.z_lc * t.z_lc;
    return 2.0 * t.z_rd * t.z_sd * t.z_sr * t.z_lc - t.z_rd * t.z_rd * z2 - t.z_sd * t.z_sd * z2 -
           t.z_sr * t.z_sr * z2;
}

/// Receiver current with the passive coil present, closed form.
inline cplx crosstalk_current(const CrosstalkImpedances& t, cplx u_s) {
    const cplx z2 = t.z_lc * t.z_lc;
    return -u_s * (t.z_sd * z2 - crosstalk_pa1(t)) / (z2 * z2 + crosstalk_pa2(t));
}

enum class CrosstalkClass { positive, negative, negligible };

inline const char* to_string(CrosstalkClass c) {
    switch (c) {
    case CrosstalkClass::positive: return "positive";
    case CrosstalkClass::negative: return "negative";
    default: return "negligible";
    }
}

struct CrosstalkReport {
    cplx z_pa1, z_pa2;
    double ratio = 1;
    CrosstalkClass classification = CrosstalkClass::negligible;
    cplx i_d_closed;
};

/// Gain ratio G_SD,p / G_SD for identical tuned coils at S, D and the passive relay R.
inline CrosstalkReport crosstalk_impedances(const CoilSpec& coil, const Pose& s, const Pose& d, const Pose& r,
                                            double f, const Medium& m) {
    require_domain(distance(s, d) > 0 && distance(s, r) > 0 && distance(r, d) > 0,
                   "crosstalk: positions must be distinct");
    const auto t = crosstalk_terms(coil, s, d, r, f, m);
    CrosstalkReport rep;
    rep.z_pa1 = crosstalk_pa1(t);
    rep.z_pa2 = crosstalk_pa2(t);
    rep.i_d_closed = crosstalk_current(t, 1.0);

    const KvlSystem with{{{coil, s, 1.0}, {coil, d, 0.0}, {coil, r, 0.0}}, f, m, CouplingMask::all};
    const KvlSystem without = two_coil_system(coil, coil, s, d, m, f);
    const double gp = kvl_power_gain(with, kvl_solve(with), 0, 1);
    const double g = kvl_power_gain(without, kvl_solve(without), 0, 1);
    rep.ratio = gp / g;
    if (rep.ratio > 1.01) rep.classification = CrosstalkClass::positive;
    else if (rep.ratio < 0.99) rep.classification = CrosstalkClass::negative;
    return rep;
}

// ---- MI waveguide ----

/// F(k+1) = z F(k) - F(k-1), F(0) = 1, F(-1) = 0.
inline cplx waveguide_fn(cplx z, int k) {
    if (k < 0) return 0;
    cplx prev = 0, cur = 1;
    for (int i = 0; i < k; ++i) {
        const cplx next = z * cur - prev;
        prev = cur;
        cur = next;
        if (!(std::abs(cur) < 1e300)) {
            std::ostringstream os;
            os << "waveguide: |F| overflow at k = " << i + 1;
            throw numeric_error(os.str());
        }
    }
    return cur;
}

inline cplx waveguide_sn(cplx z_m, cplx z_l, int k) { return waveguide_fn(z_m, k) + z_l * waveguide_fn(z_m, k - 1); }

/// Gain |I_D|^2 R_L / |U I_S| of a chain of n identical relays between identical
/// end coils, nearest-neighbour coupling m_adjacent.
inline double waveguide_gain(const CoilSpec& relay, int n, double m_adjacent, double f, double r_ci = 0,
                             double extra_load = 0) {
    require(n >= 0, "waveguide_gain: relay count must be >= 0");
    require(m_adjacent > 0, "waveguide_gain: m_adjacent must be > 0");
    const cplx jwm(0, 2 * pi * f * m_adjacent);
    const cplx z_m = (coil_impedance(relay, f) + r_ci) / jwm;
    const cplx z_l = extra_load / jwm;
    const double rl = relay.load_resistance;
    return rl / (std::abs(jwm) * std::abs(waveguide_sn(z_m, z_l, n + 1)) * std::abs(waveguide_sn(z_m, z_l, n + 2)));
}

/// Collinear coaxial chain with spacing `spacing`: n relays between S and D.
inline KvlSystem waveguide_system(const CoilSpec& coil, int n, double spacing, double f, const Medium& m,
                                  CouplingMask mask = CouplingMask::nearest_neighbour) {
    KvlSystem s;
    s.frequency = f;
    s.medium = m;
    s.mask = mask;
    for (int k = 0; k < n + 2; ++k) s.coils.push_back({coil, {Vec3(k * spacing, 0, 0), Vec3::UnitX()}, k == 0 ? 1.0 : 0.0});
    return s;
}

// ---- amplify-and-forward cooperative link ----

struct Relay {
    CoilSpec coil = default_tx_coil();
    Pose pose{Vec3(30, 3, 0), Vec3::UnitX()};
};

struct CmicResult {
    double snr_sd = 0, snr_sr = 0, snr_rd = 0, snr_af = 0; // at the carrier
    double rate_af = 0, rate_dmi = 0;                       // bit/s
    double cmg = 0;
    BandwidthResult bandwidth_af, bandwidth_dmi;
};

struct CmicLinks {
    LinkSpec sd, sr, rd;
    double psd = 0;
};

inline CmicLinks cmic_links(const LinkSpec& link, const Relay& relay) {
    CmicLinks c;
    c.sd = link;
    c.sr = link;
    c.sr.rx = relay.coil;
    c.sr.rx_pose = relay.pose;
    c.rd = link;
    c.rd.tx = relay.coil;
    c.rd.tx_pose = relay.pose;
    c.psd = tx_psd(link);
    return c;
}

/// Fixed-gain AF combining: the relay gain is set from the S-R SNR at the carrier.
inline double af_combined_snr(double sd, double sr, double rd, double sr_carrier) {
    return sd + sr * rd / (1 + sr_carrier + rd);
}

inline CmicResult cmic_af(const LinkSpec& link, const Relay& relay) {
    const auto c = cmic_links(link, relay);
    const double f0 = link.carrier();
    CmicResult r;
    r.snr_sd = snr(c.sd, f0, c.psd);
    r.snr_sr = snr(c.sr, f0, c.psd);
    r.snr_rd = snr(c.rd, f0, c.psd);
    r.snr_af = af_combined_snr(r.snr_sd, r.snr_sr, r.snr_rd, r.snr_sr);
    const double sr0 = r.snr_sr;
    auto ysd = [&](double f) { return snr(c.sd, f, c.psd); };
    auto yaf = [&](double f) { return af_combined_snr(ysd(f), snr(c.sr, f, c.psd), snr(c.rd, f, c.psd), sr0); };
    r.bandwidth_dmi = half_power_band(ysd, f0);
    r.bandwidth_af = half_power_band(yaf, f0);
    auto rate = [&](auto&& y, double b) {
        auto g = [&](double f) { return std::log2(1 + y(f)); };
        return integrate(g, f0 - b / 2, f0 + b / 2, 1e-10, 1e-10).value;
    };
    r.rate_dmi = rate(ysd, r.bandwidth_dmi.value);
    r.rate_af = 0.5 * rate(yaf, r.bandwidth_af.value);
    r.cmg = r.rate_af / r.rate_dmi;
    return r;
}

struct BandwidthPair {
    double af = 0, dmi = 0;
};

inline BandwidthPair cmic_af_bandwidth_comparison(const LinkSpec& link, const Relay& relay) {
    const auto r = cmic_af(link, relay);
    return {r.bandwidth_af.value, r.bandwidth_dmi.value};
}

struct RelayGrid {
    double x0 = -20, x1 = 80;
    double y0 = -40, y1 = 40;
    int nx = 51, ny = 41;
    double exclusion = 1.0; // cells closer than this to S or D are skipped
};

struct RelayCell {
    double x = 0, y = 0, cmg = std::numeric_limits<double>::quiet_NaN();
};

struct RelayAreaMap {
    std::vector<RelayCell> cells; // row-major, y outer
    std::size_t best = 0;
    int nx = 0, ny = 0;
};

/// CMG over relay positions in the S-D plane (z of the link), relay axis fixed.
inline RelayAreaMap relay_area_map(const LinkSpec& link, const CoilSpec& relay_coil, const Vec3& relay_axis,
                                   const RelayGrid& g, unsigned jobs = 1) {
    require(g.nx >= 1 && g.ny >= 1, "relay_area_map: grid must be non-empty");
    RelayAreaMap map;
    map.nx = g.nx;
    map.ny = g.ny;
    map.cells.resize(static_cast<std::size_t>(g.nx) * g.ny);
    const double z = link.tx_pose.position.z();
    const double sep = std::max(g.exclusion, std::max(relay_coil.radius, link.rx.radius) * 1.0001);
    parallel_for(map.cells.size(), jobs, [&](std::size_t i) {
        const int ix = static_cast<int>(i % g.nx), iy = static_cast<int>(i / g.nx);
        RelayCell c;
        c.x = g.nx > 1 ? g.x0 + (g.x1 - g.x0) * ix / (g.nx - 1) : g.x0;
        c.y = g.ny > 1 ? g.y0 + (g.y1 - g.y0) * iy / (g.ny - 1) : g.y0;
        const Vec3 p(c.x, c.y, z);
        if ((p - link.tx_pose.position).norm() > sep && (p - link.rx_pose.position).norm() > sep)
            c.cmg = cmic_af(link, Relay{relay_coil, Pose::make(p, relay_axis)}).cmg;
        map.cells[i] = c;
    });
    double best = -1;
    for (std::size_t i = 0; i < map.cells.size(); ++i)
        if (map.cells[i].cmg > best) best = map.cells[i].cmg, map.best = i;
    return map;
}

} // namespace mic

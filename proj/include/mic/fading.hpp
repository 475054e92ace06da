#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace mic {

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

struct BcsSpec {
    double sigma = 0.5;
    double varsigma = 0.8;

    void validate(const std::string& name = "bcs") const {
        require(sigma > 0, name + ".sigma must be > 0");
        require(varsigma > 0 && varsigma <= 1, name + ".varsigma must be in (0, 1]");
    }
};

struct PointMass {
    double value = 0;
    double weight = 0;
};

/// Mixed law: point masses plus a density. `continuous_expectation` integrates
/// h against the density with whatever substitution keeps the quadrature smooth.
struct FadingDistribution {
    std::vector<PointMass> point_masses;
    std::function<double(double)> density;
    std::function<double(double)> cdf; // P[X < t]
    double lo = 0, hi = 0;
    std::function<double(const std::function<double(double)>&)> continuous_expectation;

    double expect(const std::function<double(double)>& h) const {
        double s = 0;
        for (const auto& p : point_masses) s += p.weight * h(p.value);
        if (continuous_expectation) s += continuous_expectation(h);
        return s;
    }
    double total_probability() const {
        return expect([](double) { return 1.0; });
    }
    double mean() const {
        return expect([](double x) { return x; });
    }
};

// ---- BCS ----

inline double bcs_point_mass(const BcsSpec& s) {
    return std::erfc(std::sqrt(s.varsigma / (2 * s.sigma * s.sigma)));
}

inline double bcs_density(double x, const BcsSpec& s) {
    if (x <= 1 - s.varsigma || x >= 1) return 0;
    const double v = s.sigma * s.sigma;
    return std::exp(-(1 - x) / (2 * v)) / std::sqrt(2 * pi * v * (1 - x));
}

inline double bcs_cdf(double t, const BcsSpec& s) {
    if (t <= 1 - s.varsigma) return 0;
    if (t >= 1) return 1;
    return std::erfc(std::sqrt((1 - t) / (2 * s.sigma * s.sigma)));
}

inline FadingDistribution bcs_distribution(const BcsSpec& s) {
    s.validate();
    FadingDistribution d;
    d.point_masses = {{1 - s.varsigma, bcs_point_mass(s)}};
    d.density = [s](double x) { return bcs_density(x, s); };
    d.cdf = [s](double t) { return bcs_cdf(t, s); };
    d.lo = 1 - s.varsigma;
    d.hi = 1;
    d.continuous_expectation = [s](const std::function<double(double)>& h) {
        // x = 1 - (sigma t)^2 turns the (1-x)^{-1/2} singularity into a unit Gaussian weight;
        // past t = 40 the weight is below e^-800
        const double c = 2 / std::sqrt(2 * pi);
        auto g = [&](double t) {
            const double u = s.sigma * t;
            return h(1 - u * u) * c * std::exp(-t * t / 2);
        };
        return integrate(g, 0.0, std::min(std::sqrt(s.varsigma) / s.sigma, 40.0)).value;
    };
    return d;
}

inline double bcs_sample(Rng& rng, const BcsSpec& s) {
    const double g = s.sigma * standard_normal(rng);
    return 1 - std::min(g * g, s.varsigma);
}

enum class ExpectationMode { closed_form, integral };

inline double bcs_expectation(const BcsSpec& s, ExpectationMode mode = ExpectationMode::integral) {
    s.validate();
    if (mode == ExpectationMode::integral) return bcs_distribution(s).mean();
    const double v = s.sigma * s.sigma;
    return (1 - v) * std::erf(std::sqrt(s.varsigma / (2 * v))) +
           std::sqrt(2 * s.varsigma * v) * std::exp(-s.varsigma / (2 * v)) / std::sqrt(pi);
}

// ---- uniform 3-D misalignment ----

inline double uniform_misalignment_pdf(double x) {
    static const double a = std::asinh(std::sqrt(3.0));
    const double ax = std::abs(x);
    if (ax > 1) return 0;
    if (ax <= 0.5) return a / std::sqrt(3.0);
    return (a - std::asinh(std::sqrt(4 * ax * ax - 1))) / std::sqrt(3.0);
}

inline Vec3 random_unit_vector(Rng& rng) {
    const double z = 2 * uniform01(rng) - 1;
    const double phi = 2 * pi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

/// |n_D . (3 r (n_S . r) - n_S)| / 2 with both axes uniform on the sphere.
inline double uniform_misalignment_sample(Rng& rng) {
    const Vec3 ns = random_unit_vector(rng);
    const Vec3 nd = random_unit_vector(rng);
    const Vec3 r = Vec3::UnitZ();
    return std::abs(nd.dot(3 * r * ns.dot(r) - ns)) / 2;
}

// Integral of 2 f(x) over [0, b] for b in [0, 1].
inline double uniform_abs_mass(double b) {
    b = std::clamp(b, 0.0, 1.0);
    const double flat = 2 * uniform_misalignment_pdf(0) * std::min(b, 0.5);
    if (b <= 0.5) return flat;
    auto g = [](double v) {
        const double x = 0.5 + v * v;
        return 2 * uniform_misalignment_pdf(x) * 2 * v;
    };
    return flat + integrate(g, 0.0, std::sqrt(b - 0.5)).value;
}

/// Law of the gain factor X = J = 4 x^2 under uniform misalignment.
inline FadingDistribution uniform_misalignment_distribution() {
    FadingDistribution d;
    d.density = [](double t) {
        if (t <= 0 || t >= 4) return 0.0;
        const double x = std::sqrt(t) / 2;
        return 2 * uniform_misalignment_pdf(x) / (4 * std::sqrt(t));
    };
    d.cdf = [](double t) {
        if (t <= 0) return 0.0;
        if (t >= 4) return 1.0;
        return uniform_abs_mass(std::sqrt(t) / 2);
    };
    d.lo = 0;
    d.hi = 4;
    d.continuous_expectation = [](const std::function<double(double)>& h) {
        const double f0 = uniform_misalignment_pdf(0);
        auto inner = [&](double x) { return h(4 * x * x) * 2 * f0; };
        auto outer = [&](double v) {
            const double x = 0.5 + v * v;
            return h(4 * x * x) * 2 * uniform_misalignment_pdf(x) * 2 * v;
        };
        return integrate(inner, 0.0, 0.5).value + integrate(outer, 0.0, std::sqrt(0.5)).value;
    };
    return d;
}

// ---- fading model ----

struct NoFading {};

enum class VibrationMode { exact, geometric };

struct BcsFading {
    std::optional<BcsSpec> tx;
    std::optional<BcsSpec> rx;
    VibrationMode mode = VibrationMode::exact;
};

struct UniformMisalignment {};

using FadingModel = std::variant<NoFading, BcsFading, UniformMisalignment>;

inline void validate(const FadingModel& m) {
    if (const auto* b = std::get_if<BcsFading>(&m)) {
        if (b->tx) b->tx->validate("fading.tx");
        if (b->rx) b->rx->validate("fading.rx");
    }
}

/// Analytic law of the fading factor when one exists.
inline std::optional<FadingDistribution> fading_distribution(const FadingModel& model) {
    if (std::holds_alternative<NoFading>(model)) {
        FadingDistribution d;
        d.point_masses = {{1.0, 1.0}};
        d.cdf = [](double t) { return t > 1 ? 1.0 : 0.0; };
        d.lo = d.hi = 1;
        return d;
    }
    if (std::holds_alternative<UniformMisalignment>(model)) return uniform_misalignment_distribution();
    const auto& b = std::get<BcsFading>(model);
    if (b.mode != VibrationMode::exact) return std::nullopt;
    if (b.tx && b.rx) return std::nullopt;
    if (!b.tx && !b.rx) return fading_distribution(NoFading{});
    return bcs_distribution(b.tx ? *b.tx : *b.rx);
}

inline Vec3 tilt_axis(const Vec3& n, double tilt, double azimuth) {
    Vec3 e1 = n.cross(Vec3::UnitZ());
    if (e1.norm() < 1e-9) e1 = n.cross(Vec3::UnitX());
    e1.normalize();
    const Vec3 e2 = n.cross(e1);
    return std::cos(tilt) * n + std::sin(tilt) * (std::cos(azimuth) * e1 + std::sin(azimuth) * e2);
}

inline Vec3 vibrate_axis(Rng& rng, const Vec3& n, const BcsSpec& s) {
    const double g = s.sigma * standard_normal(rng);
    const double tilt = std::min(std::abs(g), std::sqrt(s.varsigma));
    const double az = 2 * pi * uniform01(rng);
    return tilt_axis(n, tilt, az);
}

/// J of the nominal poses after random vibration of each end.
inline double link_fading_sample(Rng& rng, const FadingModel& model, const Pose& tx, const Pose& rx) {
    const double nominal = polarization_factor(tx, rx);
    if (std::holds_alternative<NoFading>(model)) return nominal * nominal;
    if (std::holds_alternative<UniformMisalignment>(model)) {
        Pose a = tx, b = rx;
        a.axis = random_unit_vector(rng);
        b.axis = random_unit_vector(rng);
        const double j = polarization_factor(a, b);
        return j * j;
    }
    const auto& bf = std::get<BcsFading>(model);
    if (bf.mode == VibrationMode::exact) {
        double f = 1;
        if (bf.tx) f *= bcs_sample(rng, *bf.tx);
        if (bf.rx) f *= bcs_sample(rng, *bf.rx);
        return nominal * nominal * f;
    }
    Pose a = tx, b = rx;
    if (bf.tx) a.axis = vibrate_axis(rng, tx.axis, *bf.tx);
    if (bf.rx) b.axis = vibrate_axis(rng, rx.axis, *bf.rx);
    const double j = polarization_factor(a, b);
    return j * j;
}

/// Same-height downlink with both axes vertical: nominal J = 1.
inline std::pair<Pose, Pose> reference_downlink() {
    return {Pose{Vec3::Zero(), Vec3::UnitZ()}, Pose{Vec3::UnitX(), Vec3::UnitZ()}};
}

/// One draw of the multiplicative factor applied to mean_snr.
inline double fading_factor_sample(Rng& rng, const FadingModel& model) {
    if (std::holds_alternative<UniformMisalignment>(model)) {
        const double x = uniform_misalignment_sample(rng);
        return 4 * x * x;
    }
    const auto [tx, rx] = reference_downlink();
    return link_fading_sample(rng, model, tx, rx);
}

struct Estimate {
    double value = 0;
    double std_error = 0;
    bool monte_carlo = false;
};

struct McOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = default_seed;
};

template <class H>
Estimate mc_expectation(const FadingModel& model, H&& h, const McOptions& mc) {
    Rng rng = substream(mc.seed, 0);
    // Welford keeps the variance stable for indicator-like h
    double mean = 0, m2 = 0;
    for (std::size_t i = 0; i < mc.samples; ++i) {
        const double y = h(fading_factor_sample(rng, model));
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
    }
    const double n = static_cast<double>(mc.samples);
    return {mean, std::sqrt(m2 / (n - 1) / n), true};
}

inline Estimate outage_probability_mc(const FadingModel& model, double mean_snr, double threshold,
                                      const McOptions& mc = {}) {
    const double t = threshold / mean_snr;
    return mc_expectation(model, [t](double x) { return x < t ? 1.0 : 0.0; }, mc);
}

inline Estimate ergodic_capacity_mc(const FadingModel& model, double mean_snr, const McOptions& mc = {}) {
    return mc_expectation(model, [mean_snr](double x) { return std::log2(1 + mean_snr * x); }, mc);
}

inline Estimate ergodic_ber_mc(const FadingModel& model, double ebn0, const McOptions& mc = {}) {
    return mc_expectation(model, [ebn0](double x) { return q_function(std::sqrt(ebn0 * x)); }, mc);
}

inline Estimate outage_probability(const FadingModel& model, double mean_snr, double threshold,
                                   const McOptions& mc = {}) {
    require(mean_snr > 0, "outage_probability: mean_snr must be > 0");
    validate(model);
    if (auto d = fading_distribution(model)) return {d->cdf(threshold / mean_snr), 0, false};
    return outage_probability_mc(model, mean_snr, threshold, mc);
}

inline Estimate ergodic_capacity(const FadingModel& model, double mean_snr, const McOptions& mc = {}) {
    require(mean_snr > 0, "ergodic_capacity: mean_snr must be > 0");
    validate(model);
    if (auto d = fading_distribution(model))
        return {d->expect([mean_snr](double x) { return std::log2(1 + mean_snr * x); }), 0, false};
    return ergodic_capacity_mc(model, mean_snr, mc);
}

inline Estimate ergodic_ber(const FadingModel& model, double ebn0, const McOptions& mc = {}) {
    require(ebn0 >= 0, "ergodic_ber: ebn0 must be >= 0");
    validate(model);
    if (auto d = fading_distribution(model))
        return {d->expect([ebn0](double x) { return q_function(std::sqrt(ebn0 * x)); }), 0, false};
    return ergodic_ber_mc(model, ebn0, mc);
}

/// Mean of the fading factor, analytic when possible.
inline Estimate fading_mean(const FadingModel& model, const McOptions& mc = {}) {
    if (auto d = fading_distribution(model)) return {d->mean(), 0, false};
    return mc_expectation(model, [](double x) { return x; }, mc);
}

} // namespace mic

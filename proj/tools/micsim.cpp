// micsim: command-line front end for the MI link library.
//
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mic/mic.hpp"

namespace fs = std::filesystem;
using namespace mic;

namespace {

struct Globals {
    std::string scenario_path;
    std::uint64_t seed = default_seed;
    unsigned jobs = 1;
    std::string out = ".";
    std::size_t mc_samples = 100000;
    bool print_scenario = false;
};

Scenario load(const Globals& g) { return g.scenario_path.empty() ? Scenario{} : parse_scenario(g.scenario_path); }

void emit(const Globals& g, const std::string& name, const CsvTable& t) {
    fs::create_directories(g.out);
    const auto path = (fs::path(g.out) / name).string();
    t.save(path);
    std::cout << "wrote " << path << " (" << t.size() << " rows)\n";
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v;
    for (double x : linspace(std::log10(a), std::log10(b), n)) v.push_back(std::pow(10.0, x));
    return v;
}

Medium with_sigma(Medium m, double sigma) {
    m.sigma = sigma;
    return m;
}

// ---------------------------------------------------------------- link / sweep

struct LinkOpts {
    std::optional<double> threshold;
};

int run_link(const Globals& g, const LinkOpts& o) {
    const Scenario s = load(g);
    const LinkSpec l = to_link(s);
    const double f0 = l.carrier();
    const auto gb = link_gain(l, f0);
    const auto cf = capacity(l, CapacityMode::flat);
    const auto ci = capacity(l, CapacityMode::integral);
    CsvTable t({"quantity", "value", "unit"});
    t.add({std::string("distance"), gb.distance, std::string("m")});
    t.add({std::string("frequency"), f0, std::string("Hz")});
    t.add({std::string("circuit_gain"), gb.circuit, std::string("1")});
    t.add({std::string("space_gain"), gb.space, std::string("1")});
    t.add({std::string("eddy_gain"), gb.eddy, std::string("1")});
    t.add({std::string("polarization_gain"), gb.polarization, std::string("1")});
    t.add({std::string("channel_gain"), gb.total, std::string("1")});
    t.add({std::string("near_field_valid"), static_cast<long long>(gb.near_field_valid), std::string("bool")});
    t.add({std::string("bandwidth_numeric"), cf.bandwidth.value, std::string("Hz")});
    t.add({std::string("bandwidth_f_lo"), cf.bandwidth.f_lo, std::string("Hz")});
    t.add({std::string("bandwidth_f_hi"), cf.bandwidth.f_hi, std::string("Hz")});
    t.add({std::string("bandwidth_coupling"), bandwidth_coupling(l).value, std::string("Hz")});
    if (s.tx == s.rx) t.add({std::string("bandwidth_dipole_closed"), bandwidth_dipole_closed(l).value, std::string("Hz")});
    t.add({std::string("snr"), cf.snr_f0, std::string("1")});
    t.add({std::string("capacity_flat"), cf.value, std::string("bit/s")});
    t.add({std::string("capacity_integral"), ci.value, std::string("bit/s")});
    const auto th = o.threshold ? o.threshold : s.snr_threshold;
    if (th) {
        const auto r = mic_range(l, *th);
        t.add({std::string("range"), r.distance, std::string("m")});
        t.add({std::string("range_capped"), static_cast<long long>(r.capped), std::string("bool")});
    }
    std::cout << t.str();
    emit(g, "link.csv", t);
    return 0;
}

struct SweepOpts {
    std::string param = "distance";
    double start = 5, stop = 200;
    int points = 40;
    bool log = false;
};

int run_sweep(const Globals& g, const SweepOpts& o) {
    if (o.points < 1 || !(o.stop > o.start)) throw config_error("sweep: need points >= 1 and stop > start");
    if (o.param != "distance" && o.param != "frequency") throw config_error("sweep: --param must be distance or frequency");
    const Scenario s = load(g);
    const LinkSpec base = to_link(s);
    const auto xs = o.log ? logspace(o.start, o.stop, o.points) : linspace(o.start, o.stop, o.points);
    std::vector<std::vector<CsvField>> rows(xs.size());
    parallel_for(xs.size(), g.jobs, [&](std::size_t i) {
        LinkSpec l = o.param == "distance" ? with_distance(base, xs[i]) : tuned_to(base, xs[i]);
        const auto c = capacity(l);
        rows[i] = {xs[i], link_gain(l, l.carrier()).total, c.snr_f0, c.bandwidth.value, c.value};
    });
    CsvTable t({o.param == "distance" ? "distance_m" : "frequency_Hz", "channel_gain", "snr", "bandwidth_Hz",
                "capacity_bit_per_s"});
    for (auto& r : rows) t.add(r);
    emit(g, "sweep.csv", t);
    return 0;
}

// ---------------------------------------------------------------- fading

struct FadingOpts {
    std::optional<double> sigma_s, sigma_d, varsigma, threshold;
    double snr = 10;
    double ebn0 = 10;
    std::string model;
    std::string mode;
};

int run_fading(const Globals& g, const FadingOpts& o) {
    Scenario s = load(g);
    if (!o.model.empty()) s.fading.model = o.model;
    if (o.sigma_s) s.fading.sigma_s = o.sigma_s;
    if (o.sigma_d) s.fading.sigma_d = o.sigma_d;
    if (o.varsigma) s.fading.varsigma = *o.varsigma;
    if (!o.mode.empty()) s.fading.mode = o.mode;
    if (o.model.empty() && (o.sigma_s || o.sigma_d)) s.fading.model = "bcs";
    const FadingModel m = to_fading_model(s.fading);
    validate(m);
    const McOptions mc{g.mc_samples, g.seed};
    const auto ec = ergodic_capacity(m, o.snr, mc);
    const auto ber = ergodic_ber(m, o.ebn0, mc);
    const auto mean = fading_mean(m, mc);
    CsvTable t({"quantity", "value", "std_error", "unit"});
    t.add({std::string("mean_fading_gain"), mean.value, mean.std_error, std::string("1")});
    t.add({std::string("ergodic_capacity"), ec.value, ec.std_error, std::string("bit/s/Hz")});
    t.add({std::string("ergodic_capacity_no_fading"), std::log2(1 + o.snr), 0.0, std::string("bit/s/Hz")});
    t.add({std::string("ergodic_ber"), ber.value, ber.std_error, std::string("1")});
    t.add({std::string("ber_lower_bound"), q_function(std::sqrt(o.ebn0 * mean.value)), 0.0, std::string("1")});
    if (o.threshold) {
        const auto out = outage_probability(m, o.snr, *o.threshold, mc);
        t.add({std::string("outage_probability"), out.value, out.std_error, std::string("1")});
    }
    std::cout << t.str();
    emit(g, "fading.csv", t);
    return 0;
}

// ---------------------------------------------------------------- relays

struct RelayOpts {
    std::optional<double> x, y;
    std::vector<double> axis{1, 0, 0};
};

Relay relay_from(const Scenario& s, const RelayOpts& o) {
    if (o.axis.size() != 3) throw config_error("--relay-axis needs three components");
    const double x = o.x.value_or(s.distance / 2), y = o.y.value_or(3.0);
    return Relay{s.relay, Pose::make(Vec3(x, y, 0), Vec3(o.axis[0], o.axis[1], o.axis[2]))};
}

int run_relay(const Globals& g, const RelayOpts& o) {
    const Scenario s = load(g);
    const LinkSpec l = to_link(s);
    const Relay r = relay_from(s, o);
    const auto c = cmic_af(l, r);
    CsvTable t({"quantity", "value", "unit"});
    t.add({std::string("snr_sd"), c.snr_sd, std::string("1")});
    t.add({std::string("snr_sr"), c.snr_sr, std::string("1")});
    t.add({std::string("snr_rd"), c.snr_rd, std::string("1")});
    t.add({std::string("snr_af"), c.snr_af, std::string("1")});
    t.add({std::string("bandwidth_af"), c.bandwidth_af.value, std::string("Hz")});
    t.add({std::string("bandwidth_dmi"), c.bandwidth_dmi.value, std::string("Hz")});
    t.add({std::string("rate_af"), c.rate_af, std::string("bit/s")});
    t.add({std::string("rate_dmi"), c.rate_dmi, std::string("bit/s")});
    t.add({std::string("cmg"), c.cmg, std::string("1")});
    std::cout << t.str();
    emit(g, "relay.csv", t);
    return 0;
}

struct WaveguideOpts {
    int relays = 10;
    double spacing = 5;
    double r_ci = 0;
};

int run_waveguide(const Globals& g, const WaveguideOpts& o) {
    if (o.relays < 0 || !(o.spacing > 0)) throw config_error("waveguide: need relays >= 0 and spacing > 0");
    const Scenario s = load(g);
    const CoilSpec c = s.relay;
    const double f = c.tuned_frequency;
    const Pose a{Vec3::Zero(), Vec3::UnitX()}, b{Vec3(o.spacing, 0, 0), Vec3::UnitX()};
    const double m = mutual_inductance(c, c, a, b, s.medium, f).value;
    CsvTable t({"relays", "length_m", "gain_closed_form", "gain_kvl_nearest", "gain_kvl_full"});
    for (int n = 0; n <= o.relays; ++n) {
        const auto sn = waveguide_system(c, n, o.spacing, f, s.medium, CouplingMask::nearest_neighbour);
        const auto sf = waveguide_system(c, n, o.spacing, f, s.medium, CouplingMask::all);
        t.add({static_cast<long long>(n), (n + 1) * o.spacing, waveguide_gain(c, n, m, f, o.r_ci),
               kvl_power_gain(sn, kvl_solve(sn), 0, n + 1), kvl_power_gain(sf, kvl_solve(sf), 0, n + 1)});
    }
    emit(g, "waveguide.csv", t);
    return 0;
}

struct CrosstalkOpts {
    RelayOpts relay;
    std::optional<double> frequency;
};

int run_crosstalk(const Globals& g, const CrosstalkOpts& o) {
    const Scenario s = load(g);
    const double f = o.frequency.value_or(s.relay.tuned_frequency);
    const CoilSpec c = s.relay.tuned_to(f);
    const Relay r = relay_from(s, o.relay);
    const Pose ps{Vec3::Zero(), Vec3::UnitX()}, pd{Vec3(s.distance, 0, 0), Vec3::UnitX()};
    const auto rep = crosstalk_impedances(c, ps, pd, r.pose, f, s.medium);
    CsvTable t({"quantity", "real", "imag"});
    t.add({std::string("z_pa1"), rep.z_pa1.real(), rep.z_pa1.imag()});
    t.add({std::string("z_pa2"), rep.z_pa2.real(), rep.z_pa2.imag()});
    t.add({std::string("i_d"), rep.i_d_closed.real(), rep.i_d_closed.imag()});
    t.add({std::string("ratio"), rep.ratio, 0.0});
    std::cout << t.str() << "classification," << to_string(rep.classification) << "\n";
    emit(g, "crosstalk.csv", t);
    return 0;
}

// ---------------------------------------------------------------- network

struct NetworkOpts {
    std::optional<int> src, dst;
    std::optional<double> power_weight;
    std::optional<double> isolation_density;
    double region = 200;
    std::size_t trials = 2000;
    std::string orientation = "random";
};

int run_network(const Globals& g, const NetworkOpts& o) {
    const Scenario s = load(g);
    const Network& net = s.network;
    int ran = 0;
    if (!net.nodes.empty()) {
        CsvTable t({"frequency_Hz", "from", "to", "snr", "capacity_bit_per_s"});
        BandwidthCache bc;
        for (double f : net.frequency_set)
            for (const auto& e : link_graph(net, f, &bc).edges)
                t.add({f, static_cast<long long>(e.u), static_cast<long long>(e.v), e.snr, e.capacity});
        emit(g, "network-edges.csv", t);
        ++ran;
    }
    if (o.src || o.dst) {
        if (!o.src || !o.dst) throw config_error("network: --src and --dst go together");
        const auto p = best_path(net, *o.src, *o.dst);
        CsvTable t({"hop", "from", "to", "frequency_Hz", "capacity_bit_per_s"});
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            t.add({static_cast<long long>(i), static_cast<long long>(p.nodes[i]), static_cast<long long>(p.nodes[i + 1]),
                   p.hop_frequencies[i], p.hop_capacities[i]});
        std::cout << (p.reachable ? "bottleneck " + format_double(p.bottleneck) + " bit/s" : std::string("unreachable"))
                  << "\n";
        emit(g, "network-path.csv", t);
        ++ran;
    }
    if (o.power_weight) {
        PowerGameOptions po;
        po.weight = *o.power_weight;
        const auto r = power_allocation_br(net, po);
        CsvTable t({"link", "power_W", "utility"});
        for (std::size_t i = 0; i < r.powers.size(); ++i)
            t.add({static_cast<long long>(i), r.powers[i], r.utilities[i]});
        std::cout << (r.converged ? "converged" : "not converged") << " after " << r.iterations << " iterations\n";
        emit(g, "network-power.csv", t);
        ++ran;
    }
    if (o.isolation_density) {
        IsolationSpec is;
        is.density = *o.isolation_density;
        is.region_side = o.region;
        is.coil = s.tx;
        is.medium = s.medium;
        is.frequency_set = net.frequency_set;
        is.snr_threshold = net.snr_threshold;
        is.tx_power = s.tx_power;
        is.noise_psd = s.noise_psd;
        if (o.orientation == "aligned") is.orientation = OrientationModel::aligned;
        else if (o.orientation != "random") throw config_error("network: --orientation must be random or aligned");
        const auto e = isolation_probability(is, o.trials, g.seed, g.jobs);
        CsvTable t({"density_per_m3", "isolation_probability", "std_error"});
        t.add({is.density, e.value, e.std_error});
        std::cout << t.str();
        emit(g, "network-isolation.csv", t);
        ++ran;
    }
    if (!ran) throw config_error("network: scenario has no nodes and no --isolation-density was given");
    return 0;
}

// ---------------------------------------------------------------- figure presets

struct FigOpts {
    std::string name;
    std::optional<double> threshold, varsigma;
    double kappa = 1;
};

void fig_capacity(const Globals& g, const Scenario& s) {
    const std::vector<std::pair<std::string, double>> media{{"air", 0.0}, {"soil", s.medium.sigma}, {"seawater", 4.8}};
    const std::vector<double> freqs{1e3, 1e4, 1e5, 1e6};
    const auto ds = linspace(5, 200, 40);
    const std::size_t n = media.size() * freqs.size() * ds.size();
    std::vector<std::vector<CsvField>> rows(n);
    parallel_for(n, g.jobs, [&](std::size_t i) {
        const auto& [name, sigma] = media[i / (freqs.size() * ds.size())];
        const double f = freqs[(i / ds.size()) % freqs.size()];
        const double d = ds[i % ds.size()];
        LinkSpec l = to_link(s);
        l.medium = with_sigma(s.medium, sigma);
        l = tuned_to(with_distance(l, d), f);
        // strongly conducting media can kill the link or flatten the band edge; keep the row, flag it
        try {
            const auto c = capacity(l);
            rows[i] = {name, sigma, f, d, c.snr_f0, c.bandwidth.value, c.value, std::string("ok")};
        } catch (const numeric_error&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            rows[i] = {name, sigma, f, d, nan, nan, nan, std::string("no_band")};
        }
    });
    CsvTable t({"medium", "sigma_S_per_m", "frequency_Hz", "distance_m", "snr", "bandwidth_Hz", "capacity_bit_per_s",
                "status"});
    for (auto& r : rows) t.add(r);
    emit(g, "fig-capacity.csv", t);
}

void fig_range(const Globals& g, const Scenario& s, double threshold) {
    const std::vector<std::pair<std::string, Medium>> media{{"dry_soil", media::dry_soil()}, {"wet_soil", media::wet_soil()}};
    auto freqs = logspace(100, 1e6, 41);
    for (double f : {1e3, 5e3, 1e4, 5e4, 1e5}) freqs.push_back(f);
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end(), [](double a, double b) { return std::abs(a - b) < 1e-6 * b; }),
                freqs.end());
    const std::size_t n = media.size() * freqs.size();
    std::vector<std::vector<CsvField>> rows(n);
    parallel_for(n, g.jobs, [&](std::size_t i) {
        const auto& [name, m] = media[i / freqs.size()];
        const double f = freqs[i % freqs.size()];
        LinkSpec l = to_link(s);
        l.medium = m;
        l = tuned_to(l, f);
        const auto r = mic_range(l, threshold);
        rows[i] = {name, f, r.distance, static_cast<long long>(r.capped)};
    });
    CsvTable t({"medium", "frequency_Hz", "range_m", "capped"});
    for (auto& r : rows) t.add(r);
    emit(g, "fig-range.csv", t);
}

void fig_fading(const Globals& g, const Scenario& s, double varsigma, double threshold) {
    const std::vector<double> sigmas{0.05, 0.2, 0.4, 0.6, 0.8, 1.0};
    const LinkSpec l = to_link(s);
    const double f0 = l.carrier();
    const double chain = link_gain(l, f0).total / link_gain(l, f0).polarization / l.noise_psd;
    const double bw = bandwidth_numeric(l).value;
    CsvTable out({"sigma_d", "tx_power_W", "mean_snr", "outage_probability"});
    CsvTable cap({"sigma_d", "mean_snr", "ergodic_capacity_bit_per_s_per_Hz", "no_fading_bit_per_s_per_Hz"});
    CsvTable ber({"sigma_d", "ebn0", "ergodic_ber", "lower_bound"});
    for (double sd : sigmas) {
        const FadingModel m = BcsFading{std::nullopt, BcsSpec{sd, varsigma}, VibrationMode::exact};
        for (double p : logspace(1e-3, 1e3, 25)) {
            const double snr0 = p / bw * chain;
            out.add({sd, p, snr0, outage_probability(m, snr0, threshold).value});
        }
        for (double snr0 : {1.0, 3.0, 10.0, 30.0, 100.0})
            cap.add({sd, snr0, ergodic_capacity(m, snr0).value, std::log2(1 + snr0)});
        const double mean = fading_mean(m).value;
        for (double e : {1.0, 3.0, 10.0, 30.0, 100.0})
            ber.add({sd, e, ergodic_ber(m, e).value, q_function(std::sqrt(e * mean))});
    }
    emit(g, "fig-fading-outage.csv", out);
    emit(g, "fig-fading-capacity.csv", cap);
    emit(g, "fig-fading-ber.csv", ber);
}

void fig_ber(const Globals& g) {
    CsvTable t({"ebn0_dB", "ebn0", "ber_awgn", "ber_bcs", "ber_uniform"});
    LinkSpec bcs = default_link(), uni = default_link();
    bcs.fading = BcsFading{std::nullopt, BcsSpec{0.5, 0.8}, VibrationMode::exact};
    uni.fading = UniformMisalignment{};
    std::vector<double> e;
    for (int db = -5; db <= 20; ++db) e.push_back(std::pow(10.0, db / 10.0));
    const auto a = uncoded_ber_curve(bcs, e), b = uncoded_ber_curve(uni, e);
    for (std::size_t i = 0; i < e.size(); ++i)
        t.add({10 * std::log10(e[i]), e[i], a[i].ber_awgn, a[i].ber_fading, b[i].ber_fading});
    emit(g, "fig-ber.csv", t);
}

void fig_crosstalk(const Globals& g, const Scenario& s) {
    const std::vector<double> freqs{1e4, 1e6};
    const auto ds = logspace(2, 200, 41);
    const std::size_t n = freqs.size() * ds.size();
    std::vector<std::vector<CsvField>> rows(n);
    parallel_for(n, g.jobs, [&](std::size_t i) {
        const double f = freqs[i / ds.size()], d = ds[i % ds.size()];
        const CoilSpec c = s.relay.tuned_to(f);
        const Pose ps{Vec3::Zero(), Vec3::UnitX()}, pd{Vec3(d, 0, 0), Vec3::UnitX()};
        const Pose pr{Vec3(d / 2, 2, 0), Vec3::UnitX()};
        const auto rep = crosstalk_impedances(c, ps, pd, pr, f, s.medium);
        rows[i] = {f, d, d / 2, 2.0, rep.ratio, std::string(to_string(rep.classification))};
    });
    CsvTable t({"frequency_Hz", "d_SD_m", "relay_x_m", "relay_y_m", "ratio", "classification"});
    for (auto& r : rows) t.add(r);
    emit(g, "fig-crosstalk.csv", t);
}

LinkSpec cmic_link(const Scenario& s, double d) {
    LinkSpec l = make_link(d, s.theta_s, pi / 6, s.medium, s.tx, s.rx);
    l.tx_power = s.tx_power;
    l.noise_psd = s.noise_psd;
    return l;
}

void fig_cmi_bw(const Globals& g, const Scenario& s) {
    const auto ds = linspace(20, 100, 17);
    std::vector<std::vector<CsvField>> rows(ds.size());
    parallel_for(ds.size(), g.jobs, [&](std::size_t i) {
        const double d = ds[i];
        const auto c = cmic_af(cmic_link(s, d), Relay{s.relay, Pose::make(Vec3(d / 2, 3, 0), Vec3::UnitX())});
        rows[i] = {d, c.bandwidth_af.value, c.bandwidth_dmi.value, c.cmg};
    });
    CsvTable t({"d_SD_m", "bandwidth_af_Hz", "bandwidth_dmi_Hz", "cmg"});
    for (auto& r : rows) t.add(r);
    emit(g, "fig-cmi-bw.csv", t);
}

void fig_cmg(const Globals& g, const Scenario& s) {
    const auto map = relay_area_map(cmic_link(s, s.distance), s.relay, Vec3::UnitX(), RelayGrid{}, g.jobs);
    CsvTable t({"x_m", "y_m", "cmg"});
    for (const auto& c : map.cells) t.add({c.x, c.y, c.cmg});
    emit(g, "fig-cmg.csv", t);
    const auto& b = map.cells[map.best];
    std::cout << "max cmg " << format_double(b.cmg) << " at (" << b.x << ", " << b.y << ")\n";
}

void fig_ej(const Globals& g, const Scenario& s) {
    const auto sig = linspace(0.1, 2.0, 20);
    const std::size_t n = sig.size() * sig.size();
    std::vector<std::vector<CsvField>> rows(n);
    parallel_for(n, g.jobs, [&](std::size_t i) {
        const double ss = sig[i / sig.size()], sd = sig[i % sig.size()];
        const FadingModel m = BcsFading{BcsSpec{ss, s.fading.varsigma}, BcsSpec{sd, s.fading.varsigma},
                                        VibrationMode::geometric};
        const auto e = mc_expectation(m, [](double x) { return x; }, {g.mc_samples, splitmix64(g.seed + i)});
        rows[i] = {ss, sd, e.value, e.std_error};
    });
    CsvTable t({"sigma_s", "sigma_d", "mean_J", "std_error"});
    for (auto& r : rows) t.add(r);
    emit(g, "fig-ej.csv", t);
}

void fig_nearfield(const Globals& g, const Scenario& s, double kappa) {
    CsvTable t({"sigma_S_per_m", "frequency_Hz", "boundary_m"});
    for (double sigma : {1e-3, 1e-2, 1e-1, 1.0, 4.8})
        for (double f : logspace(100, 1e7, 51)) t.add({sigma, f, near_field_boundary(f, with_sigma(s.medium, sigma), kappa)});
    emit(g, "fig-nearfield.csv", t);
}

const std::vector<std::string> fig_names{"capacity", "range", "fading", "ber", "crosstalk",
                                         "cmi-bw",   "cmg",   "ej",     "nearfield"};

int run_fig(const Globals& g, FigOpts o) {
    if (o.name.rfind("fig-", 0) == 0) o.name = o.name.substr(4);
    const Scenario s = load(g);
    const auto th = o.threshold ? o.threshold : s.snr_threshold;
    if (o.name == "capacity") fig_capacity(g, s);
    else if (o.name == "range") {
        if (!th) throw config_error("fig-range needs an explicit --snr-threshold; there is no default threshold");
        fig_range(g, s, *th);
    } else if (o.name == "fading") {
        if (!o.varsigma) throw config_error("fig-fading needs an explicit --varsigma; there is no default vibration boundary");
        if (!th) throw config_error("fig-fading needs an explicit --snr-threshold for the outage family");
        fig_fading(g, s, *o.varsigma, *th);
    } else if (o.name == "ber") fig_ber(g);
    else if (o.name == "crosstalk") fig_crosstalk(g, s);
    else if (o.name == "cmi-bw") fig_cmi_bw(g, s);
    else if (o.name == "cmg") fig_cmg(g, s);
    else if (o.name == "ej") fig_ej(g, s);
    else if (o.name == "nearfield") fig_nearfield(g, s, o.kappa);
    else throw CLI::ValidationError("fig", "unknown preset " + o.name);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MI link, relay and network simulator"};
    app.require_subcommand(0, 1);
    Globals g;
    app.add_option("--scenario", g.scenario_path, "scenario JSON file (omitted fields use defaults)");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output directory for CSV files");
    app.add_option("--mc-samples", g.mc_samples, "Monte Carlo samples per estimate")->check(CLI::PositiveNumber);
    app.add_flag("--print-scenario", g.print_scenario, "print the effective scenario as JSON and exit");

    LinkOpts lo;
    auto* link = app.add_subcommand("link", "gain breakdown, bandwidths, capacity and range of the scenario link\n"
                                            "CSV link.csv: quantity,value,unit");
    link->add_option("--snr-threshold", lo.threshold, "SNR threshold for the range solver (linear)");

    SweepOpts so;
    auto* sweep = app.add_subcommand("sweep", "sweep distance or carrier frequency\n"
                                              "CSV sweep.csv: distance_m|frequency_Hz,channel_gain,snr,bandwidth_Hz,capacity_bit_per_s");
    sweep->add_option("--param", so.param, "distance or frequency");
    sweep->add_option("--start", so.start);
    sweep->add_option("--stop", so.stop);
    sweep->add_option("--points", so.points);
    sweep->add_flag("--log", so.log, "logarithmic grid");

    FadingOpts fo;
    auto* fading = app.add_subcommand("fading", "ergodic capacity, BER and outage under a fading model\n"
                                                "CSV fading.csv: quantity,value,std_error,unit");
    fading->add_option("--model", fo.model, "none, bcs or uniform");
    fading->add_option("--mode", fo.mode, "exact or geometric vibration");
    fading->add_option("--sigma-s", fo.sigma_s, "transmitter vibration intensity");
    fading->add_option("--sigma-d", fo.sigma_d, "receiver vibration intensity");
    fading->add_option("--varsigma", fo.varsigma, "vibration boundary");
    fading->add_option("--snr", fo.snr, "mean SNR (linear)");
    fading->add_option("--ebn0", fo.ebn0, "Eb/N0 (linear)");
    fading->add_option("--snr-threshold", fo.threshold, "outage threshold (linear)");

    RelayOpts ro;
    auto* relay = app.add_subcommand("relay", "amplify-and-forward relay on the scenario link\n"
                                              "CSV relay.csv: quantity,value,unit");
    relay->add_option("--relay-x", ro.x);
    relay->add_option("--relay-y", ro.y);
    relay->add_option("--relay-axis", ro.axis)->expected(3);

    WaveguideOpts wo;
    auto* wg = app.add_subcommand("waveguide", "passive relay chain, closed form against KVL\n"
                                               "CSV waveguide.csv: relays,length_m,gain_closed_form,gain_kvl_nearest,gain_kvl_full");
    wg->add_option("--relays", wo.relays);
    wg->add_option("--spacing", wo.spacing, "coil spacing (m)");
    wg->add_option("--r-ci", wo.r_ci, "extra series resistance per coil (ohm)");

    CrosstalkOpts co;
    auto* xt = app.add_subcommand("crosstalk", "effect of one passive coil on the scenario link\n"
                                               "CSV crosstalk.csv: quantity,real,imag");
    xt->add_option("--relay-x", co.relay.x);
    xt->add_option("--relay-y", co.relay.y);
    xt->add_option("--relay-axis", co.relay.axis)->expected(3);
    xt->add_option("--frequency", co.frequency);

    NetworkOpts no;
    auto* net = app.add_subcommand("network", "link graphs, routing, power game and isolation\n"
                                              "CSV network-edges.csv: frequency_Hz,from,to,snr,capacity_bit_per_s\n"
                                              "CSV network-path.csv: hop,from,to,frequency_Hz,capacity_bit_per_s\n"
                                              "CSV network-power.csv: link,power_W,utility\n"
                                              "CSV network-isolation.csv: density_per_m3,isolation_probability,std_error");
    net->add_option("--src", no.src);
    net->add_option("--dst", no.dst);
    net->add_option("--power-weight", no.power_weight, "utility price per watt");
    net->add_option("--isolation-density", no.isolation_density, "nodes per cubic metre");
    net->add_option("--region", no.region, "cube edge for isolation trials (m)");
    net->add_option("--trials", no.trials);
    net->add_option("--orientation", no.orientation, "random or aligned");

    FigOpts fgo;
    auto* fig = app.add_subcommand("fig", "figure presets: capacity, range, fading, ber, crosstalk, cmi-bw, cmg, ej, nearfield\n"
                                          "fig-capacity.csv: medium,sigma_S_per_m,frequency_Hz,distance_m,snr,bandwidth_Hz,capacity_bit_per_s,status\n"
                                          "fig-range.csv: medium,frequency_Hz,range_m,capped\n"
                                          "fig-fading-{outage,capacity,ber}.csv\n"
                                          "fig-ber.csv: ebn0_dB,ebn0,ber_awgn,ber_bcs,ber_uniform\n"
                                          "fig-crosstalk.csv: frequency_Hz,d_SD_m,relay_x_m,relay_y_m,ratio,classification\n"
                                          "fig-cmi-bw.csv: d_SD_m,bandwidth_af_Hz,bandwidth_dmi_Hz,cmg\n"
                                          "fig-cmg.csv: x_m,y_m,cmg\n"
                                          "fig-ej.csv: sigma_s,sigma_d,mean_J,std_error\n"
                                          "fig-nearfield.csv: sigma_S_per_m,frequency_Hz,boundary_m");
    fig->add_option("preset", fgo.name)->required();
    fig->add_option("--snr-threshold", fgo.threshold, "SNR threshold (linear), required by range and fading");
    fig->add_option("--varsigma", fgo.varsigma, "vibration boundary, required by fading");
    fig->add_option("--kappa", fgo.kappa, "near-field threshold on |k d|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (g.print_scenario) {
            std::cout << emit_scenario(load(g)).dump(2) << "\n";
            return 0;
        }
        if (*link) return run_link(g, lo);
        if (*sweep) return run_sweep(g, so);
        if (*fading) return run_fading(g, fo);
        if (*relay) return run_relay(g, ro);
        if (*wg) return run_waveguide(g, wo);
        if (*xt) return run_crosstalk(g, co);
        if (*net) return run_network(g, no);
        if (*fig) return run_fig(g, fgo);
        std::cout << app.help();
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}

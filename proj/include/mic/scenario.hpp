#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "network.hpp"
#include "relays.hpp"

namespace mic {

inline constexpr int scenario_schema_version = 1;

struct FadingConfig {
    std::string model = "none"; // none | bcs | uniform
    std::optional<double> sigma_s, sigma_d;
    double varsigma = 0.8;
    std::string mode = "exact"; // exact | geometric
};

/// Everything a run needs; omitted fields keep the defaults.
struct Scenario {
    Medium medium{};
    CoilSpec tx = default_tx_coil();
    CoilSpec rx = default_rx_coil();
    CoilSpec relay = default_tx_coil();
    double distance = 60;
    double theta_s = 0;
    double theta_d = pi;
    double tx_power = 5;
    double noise_psd = default_noise_psd();
    FadingConfig fading;
    std::optional<double> snr_threshold;
    Network network;
};

inline FadingModel to_fading_model(const FadingConfig& c) {
    if (c.model == "none") return NoFading{};
    if (c.model == "uniform") return UniformMisalignment{};
    if (c.model != "bcs") throw config_error("fading.model must be one of none, bcs, uniform");
    BcsFading b;
    if (c.sigma_s) b.tx = BcsSpec{*c.sigma_s, c.varsigma};
    if (c.sigma_d) b.rx = BcsSpec{*c.sigma_d, c.varsigma};
    if (c.mode == "geometric") b.mode = VibrationMode::geometric;
    else if (c.mode != "exact") throw config_error("fading.mode must be exact or geometric");
    return b;
}

inline LinkSpec to_link(const Scenario& s) {
    LinkSpec l = make_link(s.distance, s.theta_s, s.theta_d, s.medium, s.tx, s.rx);
    l.tx_power = s.tx_power;
    l.noise_psd = s.noise_psd;
    l.fading = to_fading_model(s.fading);
    return l;
}

inline void validate(const Scenario& s) {
    s.medium.validate();
    s.tx.validate("tx");
    s.rx.validate("rx");
    s.relay.validate("relay");
    require(s.distance > 0, "link.distance must be > 0");
    require(s.tx_power > 0, "link.tx_power must be > 0");
    require(s.noise_psd > 0, "link.noise_psd must be > 0");
    require(!s.snr_threshold || *s.snr_threshold > 0, "snr_threshold must be > 0");
    mic::validate(to_fading_model(s.fading));
    s.network.validate();
}

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw config_error(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw config_error(where + "/" + k + ": unknown key");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(where + "/" + key + ": " + e.what());
    }
}

inline void read_opt(const json& j, const char* key, std::optional<double>& out, const std::string& where) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    double v = 0;
    read(j, key, v, where);
    out = v;
}

inline Vec3 read_vec(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw config_error(where + ": expected a 3-element array");
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } catch (const json::exception& e) {
        throw config_error(where + ": " + e.what());
    }
}

inline void read_coil(const json& j, CoilSpec& c, const std::string& where) {
    check_keys(j, where, {"radius", "turns", "wire_resistance_per_m", "wire_radius", "load_resistance", "tuned_frequency"});
    read(j, "radius", c.radius, where);
    read(j, "turns", c.turns, where);
    read(j, "wire_resistance_per_m", c.wire_resistance_per_m, where);
    read(j, "wire_radius", c.wire_radius, where);
    read(j, "load_resistance", c.load_resistance, where);
    read(j, "tuned_frequency", c.tuned_frequency, where);
}

inline json coil_json(const CoilSpec& c) {
    return {{"radius", c.radius},
            {"turns", c.turns},
            {"wire_resistance_per_m", c.wire_resistance_per_m},
            {"wire_radius", c.wire_radius},
            {"load_resistance", c.load_resistance},
            {"tuned_frequency", c.tuned_frequency}};
}

} // namespace detail

inline Scenario parse_scenario_json(const nlohmann::json& j) {
    using namespace detail;
    Scenario s;
    if (j.is_null()) return s;
    check_keys(j, "", {"schema_version", "medium", "tx", "rx", "relay", "link", "fading", "snr_threshold", "network"});
    int version = scenario_schema_version;
    read(j, "schema_version", version, "");
    if (version != scenario_schema_version)
        throw config_error("/schema_version: unsupported version " + std::to_string(version));
    if (j.contains("medium")) {
        const auto& m = j["medium"];
        check_keys(m, "/medium", {"mu", "epsilon", "sigma"});
        read(m, "mu", s.medium.mu, "/medium");
        read(m, "epsilon", s.medium.epsilon, "/medium");
        read(m, "sigma", s.medium.sigma, "/medium");
    }
    if (j.contains("tx")) read_coil(j["tx"], s.tx, "/tx");
    if (j.contains("rx")) read_coil(j["rx"], s.rx, "/rx");
    if (j.contains("relay")) read_coil(j["relay"], s.relay, "/relay");
    if (j.contains("link")) {
        const auto& l = j["link"];
        check_keys(l, "/link", {"distance", "theta_s", "theta_d", "tx_power", "noise_psd", "noise_dbm", "noise_bandwidth"});
        read(l, "distance", s.distance, "/link");
        read(l, "theta_s", s.theta_s, "/link");
        read(l, "theta_d", s.theta_d, "/link");
        read(l, "tx_power", s.tx_power, "/link");
        read(l, "noise_psd", s.noise_psd, "/link");
        if (l.contains("noise_dbm")) {
            if (l.contains("noise_psd")) throw config_error("/link: give noise_psd or noise_dbm, not both");
            double dbm = -103, band = 2000;
            read(l, "noise_dbm", dbm, "/link");
            read(l, "noise_bandwidth", band, "/link");
            if (!(band > 0)) throw config_error("/link/noise_bandwidth: must be > 0");
            s.noise_psd = dbm_per_band_to_psd(dbm, band);
        }
    }
    if (j.contains("fading")) {
        const auto& f = j["fading"];
        check_keys(f, "/fading", {"model", "sigma_s", "sigma_d", "varsigma", "mode"});
        read(f, "model", s.fading.model, "/fading");
        read_opt(f, "sigma_s", s.fading.sigma_s, "/fading");
        read_opt(f, "sigma_d", s.fading.sigma_d, "/fading");
        read(f, "varsigma", s.fading.varsigma, "/fading");
        read(f, "mode", s.fading.mode, "/fading");
    }
    read_opt(j, "snr_threshold", s.snr_threshold, "");
    if (j.contains("network")) {
        const auto& n = j["network"];
        check_keys(n, "/network", {"frequency_set", "snr_threshold", "orientation", "nodes", "links"});
        read(n, "frequency_set", s.network.frequency_set, "/network");
        read(n, "snr_threshold", s.network.snr_threshold, "/network");
        std::string orient = "fixed";
        read(n, "orientation", orient, "/network");
        if (orient == "optimal_rx") s.network.orientation = OrientationMode::optimal_rx;
        else if (orient != "fixed") throw config_error("/network/orientation: must be fixed or optimal_rx");
        if (n.contains("nodes")) {
            if (!n["nodes"].is_array()) throw config_error("/network/nodes: expected an array");
            for (std::size_t i = 0; i < n["nodes"].size(); ++i) {
                const auto& nj = n["nodes"][i];
                const std::string w = "/network/nodes/" + std::to_string(i);
                check_keys(nj, w, {"id", "coil", "position", "axis", "tx_power", "noise_psd"});
                Node node;
                node.coil = s.tx;
                read(nj, "id", node.id, w);
                if (nj.contains("coil")) read_coil(nj["coil"], node.coil, w + "/coil");
                Vec3 pos = Vec3::Zero(), axis = Vec3::UnitX();
                if (nj.contains("position")) pos = read_vec(nj["position"], w + "/position");
                if (nj.contains("axis")) axis = read_vec(nj["axis"], w + "/axis");
                node.pose = Pose::make(pos, axis);
                read(nj, "tx_power", node.tx_power, w);
                read(nj, "noise_psd", node.noise_psd, w);
                s.network.nodes.push_back(node);
            }
        }
        read(n, "links", s.network.links, "/network");
    }
    validate(s);
    return s;
}

inline Scenario parse_scenario_text(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Scenario{};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("scenario parse error: ") + e.what());
    }
    return parse_scenario_json(j);
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open scenario file " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_scenario_text(os.str());
}

inline nlohmann::json emit_scenario(const Scenario& s) {
    using detail::coil_json;
    nlohmann::json j;
    j["schema_version"] = scenario_schema_version;
    j["medium"] = {{"mu", s.medium.mu}, {"epsilon", s.medium.epsilon}, {"sigma", s.medium.sigma}};
    j["tx"] = coil_json(s.tx);
    j["rx"] = coil_json(s.rx);
    j["relay"] = coil_json(s.relay);
    j["link"] = {{"distance", s.distance}, {"theta_s", s.theta_s}, {"theta_d", s.theta_d},
                 {"tx_power", s.tx_power}, {"noise_psd", s.noise_psd}};
    nlohmann::json f = {{"model", s.fading.model}, {"varsigma", s.fading.varsigma}, {"mode", s.fading.mode}};
    f["sigma_s"] = s.fading.sigma_s ? nlohmann::json(*s.fading.sigma_s) : nlohmann::json(nullptr);
    f["sigma_d"] = s.fading.sigma_d ? nlohmann::json(*s.fading.sigma_d) : nlohmann::json(nullptr);
    j["fading"] = f;
    j["snr_threshold"] = s.snr_threshold ? nlohmann::json(*s.snr_threshold) : nlohmann::json(nullptr);
    nlohmann::json n;
    n["frequency_set"] = s.network.frequency_set;
    n["snr_threshold"] = s.network.snr_threshold;
    n["orientation"] = s.network.orientation == OrientationMode::fixed ? "fixed" : "optimal_rx";
    n["nodes"] = nlohmann::json::array();
    for (const auto& node : s.network.nodes) {
        const auto& p = node.pose.position;
        const auto& a = node.pose.axis;
        n["nodes"].push_back({{"id", node.id},
                              {"coil", coil_json(node.coil)},
                              {"position", {p.x(), p.y(), p.z()}},
                              {"axis", {a.x(), a.y(), a.z()}},
                              {"tx_power", node.tx_power},
                              {"noise_psd", node.noise_psd}});
    }
    n["links"] = s.network.links;
    j["network"] = n;
    return j;
}

} // namespace mic

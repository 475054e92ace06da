#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "link_metrics.hpp"
#include "parallel.hpp"

namespace mic {

struct Node {
    int id = 0;
    CoilSpec coil = default_tx_coil();
    Pose pose{};
    double tx_power = 5.0; // also the power cap in the game
    double noise_psd = default_noise_psd();
};

enum class OrientationMode { fixed, optimal_rx };

struct Network {
    Medium medium{};
    std::vector<Node> nodes;
    std::vector<double> frequency_set{1e3, 1e4, 1e5};
    double snr_threshold = 1.0;
    OrientationMode orientation = OrientationMode::fixed;
    std::vector<std::pair<int, int>> links; // (tx id, rx id) pairs for the power game

    void validate() const {
        require(!frequency_set.empty(), "network.frequency_set must be non-empty");
        for (double f : frequency_set) require(f > 0, "network.frequency_set entries must be > 0");
        require(snr_threshold > 0, "network.snr_threshold must be > 0");
        std::set<int> ids;
        for (const auto& n : nodes) {
            require(ids.insert(n.id).second, "network.nodes ids must be unique");
            n.coil.validate("node.coil");
            n.pose.validate();
            require(n.tx_power > 0, "node.tx_power must be > 0");
            require(n.noise_psd > 0, "node.noise_psd must be > 0");
        }
    }

    std::size_t index_of(int id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return i;
        throw config_error("network: unknown node id " + std::to_string(id));
    }
};

/// 3-dB band of the circuit gain alone; the power of a hop is spread over it.
inline double circuit_bandwidth(const CoilSpec& tx, const CoilSpec& rx, double f0) {
    const CoilSpec a = tx.tuned_to(f0), b = rx.tuned_to(f0);
    return half_power_band([&](double f) { return circuit_gain_coil(a, b, f); }, f0).value;
}

/// Polarization gain of a hop under the network's orientation mode.
inline double hop_polarization(const Network& net, const Node& u, const Node& v) {
    if (net.orientation == OrientationMode::fixed) {
        const double j = polarization_factor(u.pose, v.pose);
        return j * j;
    }
    // receiver turns its axis to the incoming field: J = 1 + 3 cos^2(theta)
    const Vec3 r = (v.pose.position - u.pose.position).normalized();
    const double c = u.pose.axis.dot(r);
    return 1 + 3 * c * c;
}

struct HopMetrics {
    double snr = 0, capacity = 0, bandwidth = 0;
};

/// Both coils retuned to f; P spread over the circuit band.
inline HopMetrics hop_metrics(const Network& net, const Node& u, const Node& v, double f, double bandwidth) {
    const CoilSpec a = u.coil.tuned_to(f), b = v.coil.tuned_to(f);
    const double d = distance(u.pose, v.pose);
    const double g = circuit_gain_coil(a, b, f) * space_gain(d, net.medium) * eddy_gain(d, f, net.medium) *
                     hop_polarization(net, u, v);
    HopMetrics h;
    h.bandwidth = bandwidth;
    h.snr = u.tx_power / bandwidth * g / v.noise_psd;
    h.capacity = bandwidth * std::log2(1 + h.snr);
    return h;
}

struct Edge {
    int u = 0, v = 0;
    double frequency = 0;
    double snr = 0;
    double capacity = 0;
};

struct LinkGraph {
    double frequency = 0;
    std::vector<Edge> edges;
};

class BandwidthCache {
public:
    double get(const CoilSpec& a, const CoilSpec& b, double f) {
        for (const auto& e : entries_)
            if (e.a == a && e.b == b && e.f == f) return e.bw;
        const double bw = circuit_bandwidth(a, b, f);
        entries_.push_back({a, b, f, bw});
        return bw;
    }

private:
    struct Entry {
        CoilSpec a, b;
        double f, bw;
    };
    std::vector<Entry> entries_;
};

inline LinkGraph link_graph(const Network& net, double f, BandwidthCache* cache = nullptr) {
    net.validate();
    BandwidthCache local;
    BandwidthCache& bc = cache ? *cache : local;
    LinkGraph g;
    g.frequency = f;
    for (const auto& u : net.nodes)
        for (const auto& v : net.nodes) {
            if (u.id == v.id) continue;
            const auto h = hop_metrics(net, u, v, f, bc.get(u.coil, v.coil, f));
            if (h.snr >= net.snr_threshold) g.edges.push_back({u.id, v.id, f, h.snr, h.capacity});
        }
    return g;
}

struct PathResult {
    bool reachable = false;
    std::vector<int> nodes;
    std::vector<double> hop_frequencies;
    std::vector<double> hop_capacities;
    double bottleneck = 0;
};

/// Best frequency per ordered pair: capacity, ties to the lower frequency.
inline std::map<std::pair<int, int>, Edge> best_hops(const Network& net) {
    BandwidthCache bc;
    std::vector<double> fs = net.frequency_set;
    std::sort(fs.begin(), fs.end());
    std::map<std::pair<int, int>, Edge> best;
    for (double f : fs)
        for (const auto& e : link_graph(net, f, &bc).edges) {
            auto [it, fresh] = best.emplace(std::make_pair(e.u, e.v), e);
            if (!fresh && e.capacity > it->second.capacity) it->second = e;
        }
    return best;
}

/// Widest path; ties by fewer hops, then lexicographically smaller id sequence.
inline PathResult best_path(const Network& net, int src, int dst) {
    net.validate();
    net.index_of(src);
    net.index_of(dst);
    PathResult out;
    if (src == dst) {
        out.reachable = true;
        out.nodes = {src};
        out.bottleneck = std::numeric_limits<double>::infinity();
        return out;
    }
    const auto hops = best_hops(net);
    std::map<int, std::vector<int>> adj, radj;
    for (const auto& [k, e] : hops) {
        adj[k.first].push_back(k.second);
        radj[k.second].push_back(k.first);
    }
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());

    auto hop_dist_to_dst = [&](double floor) {
        std::map<int, int> dist{{dst, 0}};
        std::deque<int> q{dst};
        while (!q.empty()) {
            const int x = q.front();
            q.pop_front();
            for (int p : radj[x])
                if (!dist.count(p) && hops.at({p, x}).capacity >= floor) {
                    dist[p] = dist[x] + 1;
                    q.push_back(p);
                }
        }
        return dist;
    };

    std::vector<double> caps;
    for (const auto& [k, e] : hops) caps.push_back(e.capacity);
    std::sort(caps.rbegin(), caps.rend());
    caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
    for (double b : caps) {
        const auto dist = hop_dist_to_dst(b);
        if (!dist.count(src)) continue;
        int x = src;
        out.nodes = {src};
        while (x != dst) {
            for (int y : adj[x]) {
                const auto it = dist.find(y);
                if (it != dist.end() && it->second == dist.at(x) - 1 && hops.at({x, y}).capacity >= b) {
                    const auto& e = hops.at({x, y});
                    out.hop_frequencies.push_back(e.frequency);
                    out.hop_capacities.push_back(e.capacity);
                    out.nodes.push_back(y);
                    x = y;
                    break;
                }
            }
        }
        out.reachable = true;
        out.bottleneck = *std::min_element(out.hop_capacities.begin(), out.hop_capacities.end());
        return out;
    }
    return out;
}

// ---- isolation probability ----

enum class OrientationModel { random, aligned };

struct IsolationSpec {
    double density = 1e-4;   // nodes per m^3
    double region_side = 200; // cube edge, m; the probe node sits at its centre
    CoilSpec coil = default_tx_coil();
    Medium medium{};
    std::vector<double> frequency_set{1e4};
    double snr_threshold = 1.0;
    double tx_power = 5.0;
    double noise_psd = default_noise_psd();
    OrientationModel orientation = OrientationModel::random;
};

inline std::size_t poisson_inverse(double lambda, double u) {
    if (lambda <= 0) return 0;
    double cum = 0;
    for (std::size_t k = 0;; ++k) {
        cum += std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
        if (cum >= u || k > 10 * lambda + 100) return k;
    }
}

/// Fraction of trials in which the centre node has no edge (either direction, any frequency).
inline Estimate isolation_probability(const IsolationSpec& s, std::size_t trials, std::uint64_t seed = default_seed,
                                      unsigned jobs = 1) {
    require(trials >= 1, "isolation_probability: trials must be >= 1");
    require(s.density >= 0, "isolation_probability: density must be >= 0");
    std::vector<double> bw;
    for (double f : s.frequency_set) bw.push_back(circuit_bandwidth(s.coil, s.coil, f));
    const double volume = s.region_side * s.region_side * s.region_side;
    std::vector<char> isolated(trials, 0);
    parallel_for(trials, jobs, [&](std::size_t t) {
        Rng place = substream(seed, 2 * t);
        Rng orient = substream(seed, 2 * t + 1);
        const std::size_t n = poisson_inverse(s.density * volume, uniform01(place));
        const Vec3 probe_axis = random_unit_vector(orient);
        bool alone = true;
        for (std::size_t i = 0; i < n && alone; ++i) {
            const Vec3 p((uniform01(place) - 0.5) * s.region_side, (uniform01(place) - 0.5) * s.region_side,
                         (uniform01(place) - 0.5) * s.region_side);
            const Vec3 axis = random_unit_vector(orient);
            const double d = p.norm();
            if (d == 0) continue;
            double jj = 4;
            if (s.orientation == OrientationModel::random) {
                const double j = polarization_factor({Vec3::Zero(), probe_axis}, {p, axis});
                jj = j * j;
            }
            for (std::size_t k = 0; k < s.frequency_set.size() && alone; ++k) {
                const double f = s.frequency_set[k];
                const CoilSpec c = s.coil.tuned_to(f);
                const double g = circuit_gain_coil(c, c, f) * space_gain(d, s.medium) * eddy_gain(d, f, s.medium) * jj;
                // identical coils: the link is symmetric, so one direction decides both
                if (s.tx_power / bw[k] * g / s.noise_psd >= s.snr_threshold) alone = false;
            }
        }
        isolated[t] = alone;
    });
    double k = 0;
    for (char c : isolated) k += c;
    const double p = k / static_cast<double>(trials);
    return {p, std::sqrt(p * (1 - p) / static_cast<double>(trials)), true};
}

// ---- best-response power allocation ----

struct PowerGameOptions {
    double weight = 1e-3; // utility price per watt
    int max_iters = 200;
    double tol = 1e-9;
    double damping = 0.5;
};

struct PowerTraceEntry {
    int iteration = 0;
    std::size_t link = 0;
    double power_before = 0, power_after = 0;
    double utility_before = 0, utility_after = 0; // other links held at the previous profile
};

struct PowerGameResult {
    std::vector<double> powers;
    std::vector<double> utilities;
    std::vector<PowerTraceEntry> trace;
    int iterations = 0;
    bool converged = false;
};

/// Gains and bands of the game: g[j][i] couples transmitter of link j into receiver of link i.
struct PowerGame {
    std::vector<std::vector<double>> gain;
    std::vector<double> bandwidth, noise, p_max;

    double interference(std::size_t i, const std::vector<double>& p) const {
        double s = noise[i];
        for (std::size_t j = 0; j < p.size(); ++j)
            if (j != i) s += p[j] / bandwidth[j] * gain[j][i];
        return s;
    }
    double utility(std::size_t i, double pi_, const std::vector<double>& p, double w) const {
        return bandwidth[i] * std::log2(1 + pi_ / bandwidth[i] * gain[i][i] / interference(i, p)) - w * pi_;
    }
    double best_response(std::size_t i, const std::vector<double>& p, double w) const {
        if (w <= 0) return p_max[i];
        const double v = bandwidth[i] / (w * std::log(2.0)) - bandwidth[i] * interference(i, p) / gain[i][i];
        return std::clamp(v, 0.0, p_max[i]);
    }
};

/// Each transmitter uses its coil's tuned f0, flat-band.
inline PowerGame make_power_game(const Network& net) {
    net.validate();
    std::vector<std::pair<std::size_t, std::size_t>> links;
    if (!net.links.empty()) {
        for (auto [a, b] : net.links) links.emplace_back(net.index_of(a), net.index_of(b));
    } else {
        for (std::size_t i = 0; i < net.nodes.size(); ++i) {
            std::size_t best = i;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < net.nodes.size(); ++j)
                if (j != i && distance(net.nodes[i].pose, net.nodes[j].pose) < bd)
                    bd = distance(net.nodes[i].pose, net.nodes[j].pose), best = j;
            if (best != i) links.emplace_back(i, best);
        }
    }
    PowerGame g;
    const std::size_t n = links.size();
    g.gain.assign(n, std::vector<double>(n, 0));
    for (std::size_t j = 0; j < n; ++j) {
        const Node& tx = net.nodes[links[j].first];
        const double f = tx.coil.tuned_frequency;
        for (std::size_t i = 0; i < n; ++i) {
            const Node& rx = net.nodes[links[i].second];
            if (rx.id == tx.id) continue;
            const double d = distance(tx.pose, rx.pose);
            g.gain[j][i] = circuit_gain_coil(tx.coil, rx.coil.tuned_to(f), f) * space_gain(d, net.medium) *
                           eddy_gain(d, f, net.medium) * hop_polarization(net, tx, rx);
        }
        const Node& own_rx = net.nodes[links[j].second];
        g.bandwidth.push_back(circuit_bandwidth(tx.coil, own_rx.coil, f));
        g.noise.push_back(own_rx.noise_psd);
        g.p_max.push_back(tx.tx_power);
    }
    return g;
}

inline PowerGameResult power_allocation_br(const PowerGame& g, const PowerGameOptions& o) {
    require(o.weight >= 0, "power_allocation_br: weight must be >= 0");
    require(o.damping > 0 && o.damping <= 1, "power_allocation_br: damping must be in (0, 1]");
    const std::size_t n = g.p_max.size();
    PowerGameResult r;
    r.powers = g.p_max;
    for (int it = 1; it <= o.max_iters; ++it) {
        const std::vector<double> prev = r.powers;
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double br = g.best_response(i, prev, o.weight);
            const double next = (1 - o.damping) * prev[i] + o.damping * br;
            r.trace.push_back({it, i, prev[i], next, g.utility(i, prev[i], prev, o.weight),
                               g.utility(i, next, prev, o.weight)});
            r.powers[i] = next;
            change = std::max(change, std::abs(next - prev[i]));
        }
        r.iterations = it;
        if (change < o.tol) {
            r.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) r.utilities.push_back(g.utility(i, r.powers[i], r.powers, o.weight));
    return r;
}

inline PowerGameResult power_allocation_br(const Network& net, const PowerGameOptions& o) {
    return power_allocation_br(make_power_game(net), o);
}

} // namespace mic

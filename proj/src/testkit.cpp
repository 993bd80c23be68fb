#include "wds/testkit.hpp"

#include "wds/completion.hpp"
#include "wds/random.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace wds::testkit {

namespace {

void validate(const GeneratorConfig& cfg) {
    if (cfg.reservoirs < 1 || cfg.consumers < 1) throw InfeasibleConfig("need at least one reservoir and one consumer");
    if (!(cfg.head_range.first <= cfg.head_range.second)) throw InfeasibleConfig("head range is empty");
    const auto [rlo, rhi] = cfg.resistance_range;
    if (!(rlo > 0.0 && rlo <= rhi && std::isfinite(rhi))) throw InfeasibleConfig("resistance range must be positive");
    const std::size_t n = cfg.reservoirs + cfg.consumers;
    if (cfg.extra_edges > max_extra_edges(n))
        throw InfeasibleConfig("extra_edges " + std::to_string(cfg.extra_edges) + " exceeds the cap " +
                               std::to_string(max_extra_edges(n)) + " for " + std::to_string(n) + " nodes");
}

// Realistic diameter and roughness; the length is then chosen so the pipe
// has resistance r.
PipeParams params_for_resistance(Rng& rng, double r) {
    PipeParams p;
    p.diameter_m = rng.uniform(0.1, 0.6);
    p.roughness = rng.uniform(80.0, 150.0);
    const double unit = resistance({1.0, p.diameter_m, p.roughness});
    p.length_m = r / unit;
    return p;
}

}  // namespace

std::size_t max_extra_edges(std::size_t node_count) { return node_count * (node_count - 1); }

Network random_connected_wds(const GeneratorConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    const std::size_t n = cfg.reservoirs + cfg.consumers;

    NetworkSpec spec;
    for (std::size_t i = 0; i < cfg.reservoirs; ++i) spec.nodes.push_back({"R" + std::to_string(i + 1), NodeRole::Reservoir});
    for (std::size_t i = 0; i < cfg.consumers; ++i) spec.nodes.push_back({"J" + std::to_string(i + 1), NodeRole::Consumer});

    // Fisher-Yates order, then attach each node to a uniformly chosen earlier one.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);

    const double log_lo = std::log(cfg.resistance_range.first);
    const double log_hi = std::log(cfg.resistance_range.second);
    auto add_pipe = [&](std::size_t a, std::size_t b) {
        if (rng.coin()) std::swap(a, b);
        const double r = std::exp(rng.uniform(log_lo, log_hi));
        spec.pipes.push_back({"P" + std::to_string(spec.pipes.size() + 1), spec.nodes[a].id, spec.nodes[b].id,
                              params_for_resistance(rng, r)});
    };
    for (std::size_t i = 1; i < n; ++i) add_pipe(order[i], order[rng.below(i)]);
    for (std::size_t k = 0; k < cfg.extra_edges; ++k) {
        const auto a = static_cast<std::size_t>(rng.below(n));
        auto b = static_cast<std::size_t>(rng.below(n - 1));
        if (b >= a) ++b;
        add_pipe(a, b);
    }
    return build_network(spec);
}

HydraulicState random_ground_truth_state(const Network& net, std::uint64_t seed, std::pair<double, double> head_range) {
    Rng rng(seed);
    Eigen::VectorXd h(static_cast<Eigen::Index>(net.node_count()));
    for (Eigen::Index v = 0; v < h.size(); ++v) h[v] = rng.uniform(head_range.first, head_range.second);
    return complete_from_heads(net, h).state;
}

}  // namespace wds::testkit

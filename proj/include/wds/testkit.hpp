#pragma once

#include "wds/hydraulics.hpp"
#include "wds/network.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace wds::testkit {

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::size_t reservoirs = 1;
    std::size_t consumers = 1;
    /// Pipes added on top of a random spanning tree; parallels allowed.
    std::size_t extra_edges = 0;
    std::pair<double, double> head_range{50.0, 150.0};
    std::pair<double, double> resistance_range{1.0, 100.0};
};

class InfeasibleConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Upper bound on extra_edges: n_n (n_n - 1), i.e. on average two pipes per
/// unordered node pair on top of the tree.
std::size_t max_extra_edges(std::size_t node_count);

/// Random connected network. Node ids are R1.., J1..; pipe ids P1..
/// Deterministic in cfg (including the seed).
Network random_connected_wds(const GeneratorConfig& cfg);

/// Physically correct state from uniformly sampled heads.
HydraulicState random_ground_truth_state(const Network& net, std::uint64_t seed,
                                         std::pair<double, double> head_range = {50.0, 150.0});

}  // namespace wds::testkit

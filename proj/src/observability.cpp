#include "wds/observability.hpp"

#include "wds/structure.hpp"

namespace wds {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::DeterminedAllHeads: return "DeterminedAllHeads";
        case Verdict::DeterminedForestFlows: return "DeterminedForestFlows";
        case Verdict::ConditionallyDeterminedFlows: return "ConditionallyDeterminedFlows";
        case Verdict::DeterminedDemandDriven: return "DeterminedDemandDriven";
        case Verdict::UndeterminedRankDeficient: return "UndeterminedRankDeficient";
        case Verdict::NotCovered: return "NotCovered";
    }
    return "Unknown";
}

std::optional<Theorem> theorem_for(Verdict v) {
    switch (v) {
        case Verdict::DeterminedAllHeads: return Theorem::AllHeads;
        case Verdict::DeterminedForestFlows: return Theorem::ForestFlows;
        case Verdict::ConditionallyDeterminedFlows: return Theorem::HeadsAndFlows;
        case Verdict::DeterminedDemandDriven: return Theorem::DemandDriven;
        default: return std::nullopt;
    }
}

ObservabilityVerdict classify_observation_pattern(const Network& net, const ObservationSet& pattern,
                                                  const ClassifyOptions& opts) {
    validate_observations(net, pattern);

    ObservabilityVerdict out;
    out.consumer_count = net.consumer_count();

    std::vector<std::size_t> flow_pipes;
    for (std::size_t e = 0; e < net.pipe_count(); ++e)
        if (pattern.flows.count(net.pipe(e).id)) flow_pipes.push_back(e);
    out.flow_rank = consumer_column_rank(net, flow_pipes);

    std::vector<std::string> missing_nodes;
    for (const auto& n : net.nodes())
        if (!pattern.heads.count(n.id)) missing_nodes.push_back(n.id);
    if (missing_nodes.empty()) {
        out.verdict = Verdict::DeterminedAllHeads;
        out.detail = "every node head is observed; flows follow pipe by pipe and demands from mass balance";
        return out;
    }

    std::vector<std::string> missing_reservoirs;
    for (auto v : net.reservoirs())
        if (!pattern.heads.count(net.node(v).id)) missing_reservoirs.push_back(net.node(v).id);
    if (!missing_reservoirs.empty()) {
        out.verdict = Verdict::NotCovered;
        out.missing_heads = std::move(missing_reservoirs);
        out.detail = "not every reservoir head is observed; no completion result applies";
        return out;
    }

    const bool all_demands = pattern.demands.size() == net.consumer_count();
    if (all_demands) {
        out.verdict = Verdict::DeterminedDemandDriven;
        out.detail = "reservoir heads and every consumer demand are observed";
        return out;
    }

    const bool all_flows = flow_pipes.size() == net.pipe_count();
    if (all_flows && opts.prefer_flow_consistency) {
        out.verdict = Verdict::ConditionallyDeterminedFlows;
        out.detail = "reservoir heads and every flow are observed";
        out.proviso = "D(q) q - B_Vr^T h_Vr must lie in im(B_Vc^T); otherwise the observations are inconsistent";
        return out;
    }

    if (out.flow_rank == net.consumer_count()) {
        out.verdict = Verdict::DeterminedForestFlows;
        out.detail = "observed flows contain a forest connecting every consumer to one reservoir (rank " +
                     std::to_string(out.flow_rank) + ")";
        return out;
    }

    const bool extra_consumer_info = !pattern.demands.empty() || pattern.heads.size() > net.reservoir_count();
    if (!extra_consumer_info) {
        out.verdict = Verdict::UndeterminedRankDeficient;
        out.detail = "observed flows reach rank " + std::to_string(out.flow_rank) + " of " +
                     std::to_string(net.consumer_count()) + " required";
        return out;
    }

    out.verdict = Verdict::NotCovered;
    out.detail = "mixed pattern of partial consumer heads, demands and rank-deficient flows";
    return out;
}

}  // namespace wds

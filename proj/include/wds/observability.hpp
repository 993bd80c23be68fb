#pragma once

#include "wds/completion.hpp"
#include "wds/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wds {

enum class Verdict {
    DeterminedAllHeads,
    DeterminedForestFlows,
    ConditionallyDeterminedFlows,
    DeterminedDemandDriven,
    UndeterminedRankDeficient,
    NotCovered,
};

const char* to_string(Verdict v);

struct ObservabilityVerdict {
    Verdict verdict = Verdict::NotCovered;
    std::string detail;
    /// Rank of the consumer-row columns of the observed flows.
    std::size_t flow_rank = 0;
    std::size_t consumer_count = 0;
    /// Nodes whose head is required but not observed (reservoirs, or all
    /// nodes when only heads are observed).
    std::vector<std::string> missing_heads;
    /// Value-dependent condition the verdict relies on, if any.
    std::string proviso;

    bool determined() const noexcept {
        return verdict == Verdict::DeterminedAllHeads || verdict == Verdict::DeterminedForestFlows ||
               verdict == Verdict::DeterminedDemandDriven;
    }
};

struct ClassifyOptions {
    /// When every flow is observed, report the all-flows case (whose
    /// solvability depends on the observed values) instead of the forest case.
    bool prefer_flow_consistency = false;
};

/// Purely structural: only the key sets of `pattern` are inspected.
ObservabilityVerdict classify_observation_pattern(const Network& net, const ObservationSet& pattern,
                                                  const ClassifyOptions& opts = {});

/// Completion theorem backing a verdict, if any.
std::optional<Theorem> theorem_for(Verdict v);

}  // namespace wds

#pragma once

#include "wds/completion.hpp"
#include "wds/hydraulics.hpp"
#include "wds/network.hpp"
#include "wds/observability.hpp"
#include "wds/structure.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace wds::io {

using json = nlohmann::ordered_json;

/// Malformed or schema-violating input document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

NetworkSpec network_spec_from_json(const json& j);
json network_to_json(const Network& net);

ObservationSet observations_from_json(const json& j);
json observations_to_json(const ObservationSet& obs);

/// State keyed by id: {"heads":{...},"flows":{...},"demands":{...}}.
json state_to_json(const Network& net, const HydraulicState& s);
/// Accepts a bare state or any document carrying it under "state".
/// Every node, pipe and consumer must be present.
HydraulicState state_from_json(const Network& net, const json& j);

json residual_to_json(const ResidualReport& r);
json report_to_json(const Network& net, const SolveReport& r);
json verdict_to_json(const ObservabilityVerdict& v);
json decomposition_to_json(const Network& net, const EdgeDecomposition& dec);

json read_json_file(const std::filesystem::path& path);

}  // namespace wds::io

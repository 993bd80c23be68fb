#include "wds/io.hpp"

#include <fstream>

namespace wds::io {

namespace {

template <typename T>
T field(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(where) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

std::map<std::string, double> keyed_values(const json& j, const char* key) {
    std::map<std::string, double> out;
    if (!j.contains(key)) return out;
    const auto& obj = j.at(key);
    if (!obj.is_object()) throw FormatError(std::string("'") + key + "' must be an object of id -> number");
    for (const auto& [id, v] : obj.items()) {
        if (!v.is_number()) throw FormatError(std::string("'") + key + "." + id + "' must be a number");
        out.emplace(id, v.get<double>());
    }
    return out;
}

}  // namespace

NetworkSpec network_spec_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("network document must be an object");
    NetworkSpec spec;
    const auto nodes = field<json>(j, "nodes", "network");
    const auto pipes = field<json>(j, "pipes", "network");
    if (!nodes.is_array() || !pipes.is_array()) throw FormatError("network: 'nodes' and 'pipes' must be arrays");
    for (const auto& n : nodes) {
        const auto role = field<std::string>(n, "role", "node");
        NodeSpec node{field<std::string>(n, "id", "node"), NodeRole::Consumer};
        if (role == "reservoir")
            node.role = NodeRole::Reservoir;
        else if (role != "consumer")
            throw FormatError("node '" + node.id + "': role must be 'reservoir' or 'consumer'");
        spec.nodes.push_back(std::move(node));
    }
    for (const auto& p : pipes) {
        spec.pipes.push_back({field<std::string>(p, "id", "pipe"), field<std::string>(p, "from", "pipe"),
                              field<std::string>(p, "to", "pipe"),
                              PipeParams{field<double>(p, "length_m", "pipe"), field<double>(p, "diameter_m", "pipe"),
                                         field<double>(p, "roughness", "pipe")}});
    }
    return spec;
}

json network_to_json(const Network& net) {
    json nodes = json::array();
    for (const auto& n : net.nodes())
        nodes.push_back({{"id", n.id}, {"role", n.role == NodeRole::Reservoir ? "reservoir" : "consumer"}});
    json pipes = json::array();
    for (const auto& p : net.pipes())
        pipes.push_back({{"id", p.id},
                         {"from", net.node(p.tail).id},
                         {"to", net.node(p.head).id},
                         {"length_m", p.params.length_m},
                         {"diameter_m", p.params.diameter_m},
                         {"roughness", p.params.roughness}});
    return {{"nodes", nodes}, {"pipes", pipes}};
}

ObservationSet observations_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("observation document must be an object");
    return {keyed_values(j, "heads"), keyed_values(j, "flows"), keyed_values(j, "demands")};
}

json observations_to_json(const ObservationSet& obs) {
    return {{"heads", obs.heads}, {"flows", obs.flows}, {"demands", obs.demands}};
}

json state_to_json(const Network& net, const HydraulicState& s) {
    check_dimensions(net, s);
    json heads = json::object();
    json flows = json::object();
    json demands = json::object();
    for (std::size_t v = 0; v < net.node_count(); ++v) heads[net.node(v).id] = s.heads[static_cast<Eigen::Index>(v)];
    for (std::size_t e = 0; e < net.pipe_count(); ++e) flows[net.pipe(e).id] = s.flows[static_cast<Eigen::Index>(e)];
    for (std::size_t k = 0; k < net.consumer_count(); ++k)
        demands[net.node(net.consumers()[k]).id] = s.demands[static_cast<Eigen::Index>(k)];
    return {{"heads", heads}, {"flows", flows}, {"demands", demands}};
}

HydraulicState state_from_json(const Network& net, const json& j) {
    if (!j.is_object()) throw FormatError("state document must be an object");
    const json& doc = j.contains("state") ? j.at("state") : j;
    const auto obs = observations_from_json(doc);
    auto lookup = [](const std::map<std::string, double>& m, const std::string& id, const char* what) {
        auto it = m.find(id);
        if (it == m.end()) throw FormatError(std::string("state: missing ") + what + " for '" + id + "'");
        return it->second;
    };
    HydraulicState s;
    s.heads.resize(static_cast<Eigen::Index>(net.node_count()));
    s.flows.resize(static_cast<Eigen::Index>(net.pipe_count()));
    s.demands.resize(static_cast<Eigen::Index>(net.consumer_count()));
    for (std::size_t v = 0; v < net.node_count(); ++v)
        s.heads[static_cast<Eigen::Index>(v)] = lookup(obs.heads, net.node(v).id, "head");
    for (std::size_t e = 0; e < net.pipe_count(); ++e)
        s.flows[static_cast<Eigen::Index>(e)] = lookup(obs.flows, net.pipe(e).id, "flow");
    for (std::size_t k = 0; k < net.consumer_count(); ++k)
        s.demands[static_cast<Eigen::Index>(k)] = lookup(obs.demands, net.node(net.consumers()[k]).id, "demand");
    return s;
}

json residual_to_json(const ResidualReport& r) {
    return {{"energy_inf_norm", r.energy_inf_norm},
            {"mass_inf_norm", r.mass_inf_norm},
            {"max_energy_pipe", r.max_energy_pipe},
            {"max_mass_node", r.max_mass_node}};
}

json report_to_json(const Network& net, const SolveReport& r) {
    return {{"theorem", to_string(r.theorem)},
            {"iterations", r.iterations},
            {"state", state_to_json(net, r.state)},
            {"residual", residual_to_json(r.final_residual)},
            {"warnings", r.warnings}};
}

json verdict_to_json(const ObservabilityVerdict& v) {
    json j = {{"verdict", to_string(v.verdict)},
              {"detail", v.detail},
              {"flow_rank", v.flow_rank},
              {"consumer_count", v.consumer_count},
              {"missing_heads", v.missing_heads}};
    if (!v.proviso.empty()) j["proviso"] = v.proviso;
    return j;
}

json decomposition_to_json(const Network& net, const EdgeDecomposition& dec) {
    json ind = json::array();
    json dep = json::array();
    for (auto e : dec.independent) ind.push_back(net.pipe(e).id);
    for (auto e : dec.dependent) dep.push_back(net.pipe(e).id);
    return {{"independent", ind}, {"dependent", dep}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

}  // namespace wds::io

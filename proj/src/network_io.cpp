#include "credal/network_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "credal/errors.hpp"

namespace credal {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ValidationError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array())
        throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number())
            throw ValidationError(where + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

CredalNetwork load_network(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ValidationError("document: expected a JSON object");

    const auto& jvars = require(doc, "variables", "document");
    if (!jvars.is_array())
        throw ValidationError("variables: expected an array");
    if (jvars.empty())
        throw ValidationError("variables: empty network");

    std::vector<Variable> variables;
    std::map<std::string, VarId> by_name;
    for (const auto& jv : jvars) {
        Variable var;
        const auto& name = require(jv, "name", "variables");
        if (!name.is_string())
            throw ValidationError("variables.name: expected a string");
        var.name = name.get<std::string>();
        const std::string where = "variables['" + var.name + "'].values";
        const auto& values = require(jv, "values", "variables['" + var.name + "']");
        if (!values.is_array())
            throw ValidationError(where + ": expected an array of labels");
        for (const auto& label : values) {
            if (!label.is_string())
                throw ValidationError(where + ": labels must be strings");
            var.labels.push_back(label.get<std::string>());
        }
        var.id = variables.size();
        if (!by_name.emplace(var.name, var.id).second)
            throw ValidationError("variables: duplicate variable name '" + var.name + "'");
        variables.push_back(std::move(var));
    }

    auto lookup = [&](const json& j, const std::string& where) -> VarId {
        if (!j.is_string())
            throw ValidationError(where + ": expected a variable name");
        auto it = by_name.find(j.get<std::string>());
        if (it == by_name.end())
            throw ValidationError(where + ": unknown variable '" + j.get<std::string>() + "'");
        return it->second;
    };

    std::vector<std::vector<VarId>> parents(variables.size());
    if (doc.contains("arcs")) {
        const auto& arcs = doc.at("arcs");
        if (!arcs.is_array())
            throw ValidationError("arcs: expected an array of [parent, child] pairs");
        for (const auto& arc : arcs) {
            if (!arc.is_array() || arc.size() != 2)
                throw ValidationError("arcs: expected [parent, child] pairs");
            VarId from = lookup(arc[0], "arcs");
            VarId to = lookup(arc[1], "arcs");
            parents[to].push_back(from);
        }
    }
    Dag dag(variables.size(), std::move(parents));

    const auto& jsets = require(doc, "credal_sets", "document");
    if (!jsets.is_object())
        throw ValidationError("credal_sets: expected an object keyed by variable name");
    for (const auto& [name, _] : jsets.items())
        if (!by_name.count(name))
            throw ValidationError("credal_sets: unknown variable '" + name + "'");

    std::vector<LocalCredalSet> locals(variables.size());
    for (VarId v = 0; v < variables.size(); ++v) {
        const auto& var = variables[v];
        const std::string where = "credal_sets['" + var.name + "']";
        if (!jsets.contains(var.name))
            throw ValidationError(where + ": missing local credal set");
        const auto& entries = jsets.at(var.name);
        if (!entries.is_array())
            throw ValidationError(where + ": expected an array of entries");

        const auto& ps = dag.parents(v);
        std::vector<std::size_t> pcards;
        for (VarId p : ps)
            pcards.push_back(variables[p].cardinality());
        const std::size_t configs = config_count(pcards);

        auto& local = locals[v];
        local.node = v;
        local.rows.assign(configs, {});
        std::vector<bool> seen(configs, false);

        for (const auto& entry : entries) {
            const auto& jparents = require(entry, "parents", where);
            if (!jparents.is_array() || jparents.size() != ps.size())
                throw ValidationError(where + ".parents: expected " + std::to_string(ps.size()) +
                                      " parent value labels");
            std::size_t config = 0;
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const auto& pvar = variables[ps[i]];
                if (!jparents[i].is_string())
                    throw ValidationError(where + ".parents: labels must be strings");
                auto idx = pvar.label_index(jparents[i].get<std::string>());
                if (!idx)
                    throw ValidationError(where + ".parents: unknown value '" +
                                          jparents[i].get<std::string>() + "' of '" + pvar.name + "'");
                config = config * pvar.cardinality() + *idx;
            }
            if (seen[config])
                throw ValidationError(where + ": parent configuration given twice");
            seen[config] = true;

            const bool has_vertices = entry.contains("vertices");
            const bool has_intervals = entry.contains("intervals");
            if (has_vertices == has_intervals)
                throw ValidationError(where + ": each entry needs exactly one of 'vertices' or 'intervals'");
            if (has_vertices) {
                const auto& jverts = entry.at("vertices");
                if (!jverts.is_array() || jverts.empty())
                    throw ValidationError(where + ".vertices: expected a nonempty array");
                for (const auto& jp : jverts)
                    local.rows[config].push_back(number_list(jp, where + ".vertices"));
            } else {
                const auto& jint = entry.at("intervals");
                auto lower = number_list(require(jint, "lower", where + ".intervals"), where + ".intervals.lower");
                auto upper = number_list(require(jint, "upper", where + ".intervals"), where + ".intervals.upper");
                if (lower.size() != var.cardinality() || upper.size() != var.cardinality())
                    throw ValidationError(where + ".intervals: expected " +
                                          std::to_string(var.cardinality()) + " bounds");
                try {
                    local.rows[config] = intervals_to_vertices(lower, upper);
                } catch (const ValidationError& e) {
                    throw ValidationError(where + ".intervals: " + e.what());
                }
            }
        }
        for (std::size_t c = 0; c < configs; ++c)
            if (!seen[c])
                throw ValidationError(where + ": missing parent configuration " + std::to_string(c));
    }

    return CredalNetwork(std::move(variables), std::move(dag), std::move(locals));
}

CredalNetwork load_network_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open network file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_network(buf.str());
}

std::string serialize_network(const CredalNetwork& net) {
    json doc;
    doc["variables"] = json::array();
    for (const auto& var : net.variables())
        doc["variables"].push_back({{"name", var.name}, {"values", var.labels}});

    doc["arcs"] = json::array();
    for (VarId v = 0; v < net.size(); ++v)
        for (VarId p : net.dag().parents(v))
            doc["arcs"].push_back({net.variable(p).name, net.variable(v).name});

    // Ordered object so output is deterministic regardless of insertion.
    json sets = json::object();
    for (VarId v = 0; v < net.size(); ++v) {
        json entries = json::array();
        auto pcards = net.parent_cards(v);
        const auto& ps = net.dag().parents(v);
        for (std::size_t c = 0; c < net.local(v).rows.size(); ++c) {
            auto values = decode_config(c, pcards);
            json labels = json::array();
            for (std::size_t i = 0; i < ps.size(); ++i)
                labels.push_back(net.variable(ps[i]).labels[values[i]]);
            entries.push_back({{"parents", labels}, {"vertices", net.local(v).rows[c]}});
        }
        sets[net.variable(v).name] = std::move(entries);
    }
    doc["credal_sets"] = std::move(sets);
    return doc.dump(1) + "\n";
}

void write_network_file(const CredalNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write network file '" + path.string() + "'");
    out << serialize_network(net);
}

} // namespace credal

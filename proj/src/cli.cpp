#include "credal/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

#include "credal/engine.hpp"
#include "credal/errors.hpp"
#include "credal/network_io.hpp"
#include "credal/random_network.hpp"
#include "credal/reductions.hpp"

#ifndef CREDAL_VERSION
#define CREDAL_VERSION "dev"
#endif

namespace credal {

namespace {

using nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        parts.push_back(trim(item));
    return parts;
}

std::map<VarId, std::size_t> parse_evidence(const CredalNetwork& net, const std::string& spec) {
    std::map<VarId, std::size_t> evidence;
    if (trim(spec).empty())
        return evidence;
    for (const auto& item : split(spec, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError("evidence: expected Var=value, got '" + item + "'");
        const std::string name = trim(item.substr(0, eq)), label = trim(item.substr(eq + 1));
        const auto v = net.find(name);
        if (!v)
            throw ValidationError("evidence: unknown variable '" + name + "'");
        const auto value = net.variable(*v).label_index(label);
        if (!value)
            throw ValidationError("evidence: variable '" + name + "' has no value '" + label + "'");
        if (!evidence.emplace(*v, *value).second)
            throw ValidationError("evidence: variable '" + name + "' given twice");
    }
    return evidence;
}

std::vector<std::uint64_t> parse_set(const std::string& spec) {
    std::vector<std::uint64_t> s;
    if (trim(spec).empty())
        throw ValidationError("set: must contain at least one element");
    for (const auto& item : split(spec, ',')) {
        std::size_t used = 0;
        unsigned long long x = 0;
        try {
            if (item.empty() || item.front() == '-')
                throw std::invalid_argument(item);
            x = std::stoull(item, &used);
        } catch (const std::exception&) {
            throw ValidationError("set: '" + item + "' is not a non-negative integer");
        }
        if (used != item.size())
            throw ValidationError("set: '" + item + "' is not a non-negative integer");
        s.push_back(x);
    }
    return s;
}

// Shortest round-trip rendering, shared by JSON and text output.
std::string num(double x) { return ordered_json(x).dump(); }

void write_text(std::ostream& out, const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text))
        throw ValidationError("out: cannot write '" + path + "'");
}

struct InferArgs {
    std::string network, target, evidence, method = "auto", output = "json";
    double tol = kLpTol;
    std::uint64_t max_candidates = EngineOptions{}.max_candidates;
    std::uint64_t max_oracle = EngineOptions{}.max_oracle;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
    const auto net = load_network_file(a.network);
    Query query;
    const auto target = net.find(a.target);
    if (!target)
        throw ValidationError("target: unknown variable '" + a.target + "'");
    query.target = *target;
    query.evidence = parse_evidence(net, a.evidence);
    if (query.observed(query.target))
        throw ValidationError("evidence: target '" + a.target + "' cannot be observed");
    validate_query(net, query);
    if (!(a.tol > 0.0))
        throw ValidationError("tol: must be positive");

    EngineOptions opts;
    opts.tol = a.tol;
    opts.max_candidates = a.max_candidates;
    opts.max_oracle = a.max_oracle;
    if (a.threads > 0)
        set_threads(a.threads);

    const auto start = std::chrono::steady_clock::now();
    InferenceResult result;
    if (a.method == "separable")
        result = separable_ve(net, query, opts);
    else if (a.method == "enumerate")
        result = enumerate_strong_extension(net, query, opts);
    else if (a.method == "binary-polytree")
        result = binary_polytree_bounds(net, query, opts);
    else if (binary_polytree_eligible(net, query))
        result = binary_polytree_bounds(net, query, opts);
    else
        result = separable_ve(net, query, opts);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const auto& var = net.variable(query.target);
    const auto& d = result.diagnostics;
    if (a.output == "text") {
        out << "target " << var.name << "\n";
        out << "method " << d.method << (a.method == "auto" ? " (auto)" : "") << "\n";
        for (auto [v, value] : query.evidence)
            out << "evidence " << net.variable(v).name << "=" << net.variable(v).labels[value] << "\n";
        for (std::size_t k = 0; k < var.cardinality(); ++k)
            out << var.labels[k] << " " << num(result.bounds[k].lower) << " " << num(result.bounds[k].upper)
                << "\n";
        out << "candidates_examined " << d.candidates_examined << "\n";
        out << "re_removed " << d.re_removed << "\n";
        out << "max_slice_size " << d.max_slice_size << "\n";
        out << "ms " << num(ms) << "\n";
        for (const auto& note : d.notes)
            out << "note " << note << "\n";
        return 0;
    }

    ordered_json report;
    report["target"] = var.name;
    report["method"] = d.method;
    report["requested_method"] = a.method;
    ordered_json evidence = ordered_json::object();
    for (auto [v, value] : query.evidence)
        evidence[net.variable(v).name] = net.variable(v).labels[value];
    report["evidence"] = evidence;
    ordered_json bounds = ordered_json::object();
    for (std::size_t k = 0; k < var.cardinality(); ++k)
        bounds[var.labels[k]] = {result.bounds[k].lower, result.bounds[k].upper};
    report["bounds"] = bounds;
    report["diagnostics"] = {{"candidates_examined", d.candidates_examined},
                             {"re_removed", d.re_removed},
                             {"max_slice_size", d.max_slice_size},
                             {"massless_skipped", d.massless_skipped},
                             {"ms", ms},
                             {"notes", d.notes}};
    report["seed"] = a.seed;
    report["version"] = CREDAL_VERSION;
    out << report.dump(2) << "\n";
    return 0;
}

int cmd_gen_subsetsum(const std::string& set, std::uint64_t target, const std::string& path, std::ostream& out) {
    SubsetSumInstance inst{parse_set(set), target};
    auto [net, query] = subsetsum_to_network(inst);
    write_text(out, serialize_network(net), path);
    if (path.empty() || path == "-")
        return 0;
    ordered_json suggestion;
    suggestion["network"] = path;
    suggestion["target"] = net.variable(query.target).name;
    suggestion["value"] = std::to_string(inst.l);
    suggestion["command"] = "credal infer --network " + path + " --target " + net.variable(query.target).name;
    out << suggestion.dump(2) << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact inference in credal networks", "credal"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CREDAL_VERSION);

    InferArgs infer;
    auto* infer_cmd = app.add_subcommand("infer", "Lower and upper posterior probabilities of a target");
    infer_cmd->add_option("--network", infer.network, "Network JSON file")->required();
    infer_cmd->add_option("--target", infer.target, "Target variable name")->required();
    infer_cmd->add_option("--evidence", infer.evidence, "Observations as Var=value,...");
    infer_cmd->add_option("--method", infer.method, "separable, enumerate, binary-polytree or auto")
        ->check(CLI::IsMember({"separable", "enumerate", "binary-polytree", "auto"}));
    infer_cmd->add_option("--tol", infer.tol, "Redundancy-elimination tolerance");
    infer_cmd->add_option("--max-candidates", infer.max_candidates, "Per-slice candidate cap");
    infer_cmd->add_option("--max-oracle", infer.max_oracle, "Vertex-combination cap for enumerate");
    infer_cmd->add_option("--output", infer.output, "json or text")->check(CLI::IsMember({"json", "text"}));
    infer_cmd->add_option("--seed", infer.seed, "Echoed in the report; inference is deterministic");
    infer_cmd->add_option("--threads", infer.threads, "OpenMP threads (default: all)");

    std::string set, subset_out;
    std::uint64_t subset_target = 0;
    auto* subset_cmd = app.add_subcommand("gen-subsetsum", "Write the SubsetSum reduction network");
    subset_cmd->add_option("--set", set, "Comma-separated non-negative integers")->required();
    subset_cmd->add_option("--target", subset_target, "Positive integer target sum")->required();
    subset_cmd->add_option("--out", subset_out, "Output path (default stdout)");

    RandomNetworkOptions random;
    std::string random_out;
    auto* random_cmd = app.add_subcommand("gen-random", "Write a seeded random network");
    random_cmd->add_option("--nodes", random.nodes, "Node count")->required();
    random_cmd->add_flag("--polytree", random.polytree, "Forest skeleton");
    random_cmd->add_flag("--binary", random.binary, "Binary variables");
    random_cmd->add_option("--max-vertices", random.max_vertices, "Vertices per parent configuration");
    random_cmd->add_option("--max-parents", random.max_parents, "Parents per node");
    random_cmd->add_option("--max-cardinality", random.max_cardinality, "Values per variable");
    random_cmd->add_option("--seed", random.seed, "Generator seed");
    random_cmd->add_option("--out", random_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*infer_cmd)
            return cmd_infer(infer, out);
        if (*subset_cmd)
            return cmd_gen_subsetsum(set, subset_target, subset_out, out);
        if (random.nodes == 0)
            throw ValidationError("nodes: must be at least 1");
        write_text(out, serialize_network(random_network(random)), random_out);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ZeroEvidenceError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimitError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace credal

#include "mgspec/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mgspec/errors.hpp"

namespace mgspec {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key \"" + key + "\" in " + where);
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing \"" + key + "\" in " + where);
    if (!obj[key].is_number()) throw ConfigError("\"" + key + "\" in " + where + " must be a number");
    return obj[key].get<double>();
}

/// Flat row-major list of [re, im] pairs; the dimension is the square root
/// of the entry count.
Matrix parse_matrix(const json& j, const std::string& name, int expected_dim) {
    if (!j.is_array()) throw ConfigError("\"" + name + "\" must be an array of [re, im] pairs");
    const auto count = j.size();
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
    if (static_cast<size_t>(n) * n != count)
        throw ConfigError("\"" + name + "\" has " + std::to_string(count) +
                          " entries, not a square count");
    if (n != expected_dim)
        throw ConfigError("\"" + name + "\" is " + std::to_string(n) + "x" + std::to_string(n) +
                          " but the graph has boundary dimension " + std::to_string(expected_dim));
    Matrix m(n, n);
    for (size_t idx = 0; idx < count; ++idx) {
        const json& entry = j[idx];
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number())
            throw ConfigError("entry " + std::to_string(idx) + " of \"" + name +
                              "\" must be an [re, im] pair");
        m(static_cast<int>(idx) / n, static_cast<int>(idx) % n) =
            Complex(entry[0].get<double>(), entry[1].get<double>());
    }
    return m;
}

VertexCondition parse_vertex(const json& j, const std::string& name) {
    const std::string where = "vertex \"" + name + "\"";
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    reject_unknown_keys(j, {"type", "gamma"}, where);
    if (!j.contains("type") || !j["type"].is_string())
        throw ConfigError(where + " needs a string \"type\"");
    const std::string type = j["type"].get<std::string>();
    VertexCondition vc;
    if (type == "dirichlet") {
        vc.type = VertexCondition::Type::Dirichlet;
    } else if (type == "neumann") {
        vc.type = VertexCondition::Type::Neumann;
    } else if (type == "standard") {
        vc.type = VertexCondition::Type::Standard;
    } else if (type == "robin") {
        vc.type = VertexCondition::Type::Robin;
        vc.gamma = require_number(j, "gamma", where);
        return vc;
    } else {
        throw ConfigError(where + ": unknown type \"" + type +
                          "\" (expected dirichlet|neumann|robin|standard)");
    }
    if (j.contains("gamma")) throw ConfigError(where + ": \"gamma\" is only valid for robin");
    return vc;
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(doc, {"edges", "vertices", "raw_conditions", "solver", "sweep"}, "config");

    if (!doc.contains("edges") || !doc["edges"].is_array() || doc["edges"].empty())
        throw ConfigError("config needs a non-empty \"edges\" array");

    // Boundary slot order is (e1-, e1+, e2-, e2+, ...), fixed here once.
    std::vector<double> lengths;
    std::vector<std::string> slot_vertex_names;
    for (size_t i = 0; i < doc["edges"].size(); ++i) {
        const json& je = doc["edges"][i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        if (!je.is_object()) throw ConfigError(where + " must be an object");
        reject_unknown_keys(je, {"length", "vertex_minus", "vertex_plus"}, where);
        const double length = require_number(je, "length", where);
        if (!(length > 0)) throw ConfigError(where + ": length must be positive");
        lengths.push_back(length);
        for (const char* key : {"vertex_minus", "vertex_plus"}) {
            if (!je.contains(key) || !je[key].is_string())
                throw ConfigError(where + " needs a string \"" + key + "\"");
            slot_vertex_names.push_back(je[key].get<std::string>());
        }
    }
    MetricGraph graph(lengths);
    const int n = graph.boundary_dim();

    const bool has_vertices = doc.contains("vertices");
    const bool has_raw = doc.contains("raw_conditions");
    if (has_vertices == has_raw)
        throw ConfigError("exactly one of \"vertices\" or \"raw_conditions\" is required");

    std::optional<MatchingConditions> conditions;
    if (has_vertices) {
        const json& jv = doc["vertices"];
        if (!jv.is_object()) throw ConfigError("\"vertices\" must be a map of name -> descriptor");
        std::map<std::string, int> vertex_index;
        std::vector<VertexCondition> descriptors;
        for (const auto& [name, body] : jv.items()) {
            vertex_index[name] = static_cast<int>(descriptors.size());
            descriptors.push_back(parse_vertex(body, name));
        }
        std::vector<int> vertex_of_slot(n);
        for (int s = 0; s < n; ++s) {
            const auto it = vertex_index.find(slot_vertex_names[s]);
            if (it == vertex_index.end())
                throw ConfigError("edge endpoint refers to undeclared vertex \"" +
                                  slot_vertex_names[s] + "\"");
            vertex_of_slot[s] = it->second;
        }
        conditions = preset_conditions(vertex_of_slot, descriptors);
    } else {
        const json& jr = doc["raw_conditions"];
        if (!jr.is_object()) throw ConfigError("\"raw_conditions\" must be an object");
        reject_unknown_keys(jr, {"p_d", "p_n", "p_r", "lambda"}, "raw_conditions");
        for (const char* key : {"p_d", "p_n", "p_r", "lambda"})
            if (!jr.contains(key))
                throw ConfigError(std::string("raw_conditions needs \"") + key + "\"");
        conditions = validate_conditions(
            parse_matrix(jr["p_d"], "p_d", n), parse_matrix(jr["p_n"], "p_n", n),
            parse_matrix(jr["p_r"], "p_r", n), parse_matrix(jr["lambda"], "lambda", n));
    }

    ProblemConfig cfg{std::move(graph), std::move(*conditions), {}, {}, {}, {}};

    if (doc.contains("solver")) {
        const json& js = doc["solver"];
        if (!js.is_object()) throw ConfigError("\"solver\" must be an object");
        reject_unknown_keys(js, {"window", "scan_step", "detect_rel", "refine_rel"}, "solver");
        if (js.contains("window")) {
            const json& w = js["window"];
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
                throw ConfigError("solver.window must be [lo, hi]");
            cfg.window_lo = w[0].get<double>();
            cfg.window_hi = w[1].get<double>();
            if (!(*cfg.window_lo < *cfg.window_hi))
                throw ConfigError("solver.window must satisfy lo < hi");
        }
        if (js.contains("scan_step")) cfg.solver.scan_step = require_number(js, "scan_step", "solver");
        if (js.contains("detect_rel"))
            cfg.solver.detect_rel = require_number(js, "detect_rel", "solver");
        if (js.contains("refine_rel"))
            cfg.solver.refine_rel = require_number(js, "refine_rel", "solver");
    }

    cfg.sweep.solver = cfg.solver;
    if (doc.contains("sweep")) {
        const json& js = doc["sweep"];
        if (!js.is_object()) throw ConfigError("\"sweep\" must be an object");
        reject_unknown_keys(js, {"epsilons", "num_fast"}, "sweep");
        if (js.contains("epsilons")) {
            const json& je = js["epsilons"];
            if (je.is_array()) {
                for (const json& v : je) {
                    if (!v.is_number()) throw ConfigError("sweep.epsilons entries must be numbers");
                    cfg.sweep.epsilons.push_back(v.get<double>());
                }
            } else if (je.is_object()) {
                reject_unknown_keys(je, {"start", "stop", "points"}, "sweep.epsilons");
                const double start = require_number(je, "start", "sweep.epsilons");
                const double stop = require_number(je, "stop", "sweep.epsilons");
                const int points = static_cast<int>(require_number(je, "points", "sweep.epsilons"));
                if (!(start > stop) || !(stop > 0) || points < 4)
                    throw ConfigError("sweep.epsilons needs start > stop > 0 and points >= 4");
                for (int i = 0; i < points; ++i)
                    cfg.sweep.epsilons.push_back(
                        start * std::pow(stop / start, static_cast<double>(i) / (points - 1)));
            } else {
                throw ConfigError("sweep.epsilons must be an array or {start, stop, points}");
            }
        }
        if (js.contains("num_fast")) {
            cfg.sweep.num_fast = static_cast<int>(require_number(js, "num_fast", "sweep"));
            if (cfg.sweep.num_fast < 1) throw ConfigError("sweep.num_fast must be >= 1");
        }
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace mgspec

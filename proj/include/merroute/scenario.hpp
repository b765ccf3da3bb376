#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "merroute/errors.hpp"

namespace merroute {

/// Uniform time discretization: spans of `span_minutes`, indexed 0..num_spans.
struct TimeGrid {
    int span_minutes = 1;  // delta-t
    int num_spans = 1;     // D

    int horizon_minutes() const { return span_minutes * num_spans; }
    int num_points() const { return num_spans + 1; }  // |{0,...,D}|
    double span_hours() const { return span_minutes / 60.0; }
};

struct Node {
    int id = 0;
    std::optional<int> island_id;
    double load_kw = 0.0;  // interrupted load while the island is unrepaired
    double weight = 1.0;
};

using DistanceMatrix = std::vector<std::vector<double>>;
using SpanMatrix = std::vector<std::vector<int>>;

constexpr int kNeverRepaired = -1;

struct Island {
    int id = 0;
    std::vector<int> node_ids;
    int repair_span = 0;  // kNeverRepaired when the fault is never repaired

    bool unrepaired_at(int span) const {
        return repair_span == kNeverRepaired || span < repair_span;
    }
};

struct MerSpec {
    int id = 0;
    int initial_node = 0;  // node id
    double travel_cost_kwh_per_span = 0.0;
    double speed = 1.0;  // distance units per minute
};

struct Scenario {
    TimeGrid grid;
    std::vector<Node> nodes;
    DistanceMatrix distances;  // full matrix over nodes, in file order
    std::vector<Island> islands;
    std::vector<MerSpec> fleet;
    std::string units = "feet";

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_mers() const { return fleet.size(); }

    int node_index(int id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        throw ValidationError("unknown node id: " + std::to_string(id));
    }

    /// Index of the island containing node index `i`, or -1 if energized.
    int island_of(int node_idx) const {
        const auto& maybe = nodes[node_idx].island_id;
        if (!maybe) return -1;
        for (std::size_t l = 0; l < islands.size(); ++l)
            if (islands[l].id == *maybe) return static_cast<int>(l);
        return -1;
    }
};

/// Integer travel times per Table-style rounding: ceil(distance / span_length),
/// floored at one span for distinct nodes so travel can never be instantaneous.
inline SpanMatrix compute_travel_times(const DistanceMatrix& distances, double speed,
                                       const TimeGrid& grid) {
    if (!(speed > 0.0)) throw ValidationError("speed must be > 0");
    const std::size_t n = distances.size();
    const double span_length = speed * grid.span_minutes;
    SpanMatrix spans(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i == k) continue;
            double q = distances[i][k] / span_length;
            // Guard against 3.0000000000000004-style division noise.
            int t = static_cast<int>(std::ceil(q - 1e-9));
            spans[i][k] = std::max(1, t);
        }
    }
    return spans;
}

inline int max_travel_time(const SpanMatrix& spans) {
    int best = 0;
    for (const auto& row : spans)
        for (int v : row) best = std::max(best, v);
    return best;
}

namespace detail {

/// All-pairs shortest paths (Floyd-Warshall) over an undirected edge list.
inline DistanceMatrix shortest_path_matrix(std::size_t n,
                                           const std::vector<std::tuple<int, int, double>>& edges) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    DistanceMatrix d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (const auto& [a, b, len] : edges) {
        d[a][b] = std::min(d[a][b], len);
        d[b][a] = std::min(d[b][a], len);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(d[i][j]))
                throw ValidationError("distances.edges: road graph is not connected");
    return d;
}

}  // namespace detail

/// Checks every scenario invariant; throws ValidationError naming the field.
inline void validate_scenario(const Scenario& sc) {
    if (sc.grid.span_minutes < 1) throw ValidationError("time_grid.span_minutes: must be >= 1");
    if (sc.grid.num_spans < 1) throw ValidationError("time_grid.num_spans: must be >= 1");
    if (sc.nodes.empty()) throw ValidationError("nodes: at least one node required");
    if (sc.fleet.empty()) throw ValidationError("fleet: at least one MER required");

    std::set<int> node_ids;
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
        const Node& n = sc.nodes[i];
        std::string path = "nodes[" + std::to_string(i) + "]";
        if (!node_ids.insert(n.id).second)
            throw ValidationError(path + ".id: duplicate node id " + std::to_string(n.id));
        if (n.load_kw < 0.0) throw ValidationError(path + ".load_kw: must be >= 0");
        if (n.weight < 0.0) throw ValidationError(path + ".weight: must be >= 0");
    }

    const std::size_t n = sc.nodes.size();
    if (sc.distances.size() != n)
        throw ValidationError("distances: matrix must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        std::string path = "distances[" + std::to_string(i) + "]";
        if (sc.distances[i].size() != n) throw ValidationError(path + ": row has wrong length");
        for (std::size_t k = 0; k < n; ++k) {
            double d = sc.distances[i][k];
            if (!(d >= 0.0) || !std::isfinite(d))
                throw ValidationError(path + "[" + std::to_string(k) + "]: must be >= 0");
        }
        if (sc.distances[i][i] != 0.0) throw ValidationError(path + ": diagonal must be exactly 0");
    }

    std::set<int> island_ids;
    std::set<int> islanded_nodes;
    for (std::size_t l = 0; l < sc.islands.size(); ++l) {
        const Island& isl = sc.islands[l];
        std::string path = "islands[" + std::to_string(l) + "]";
        if (!island_ids.insert(isl.id).second)
            throw ValidationError(path + ".id: duplicate island id " + std::to_string(isl.id));
        if (isl.node_ids.empty()) throw ValidationError(path + ".nodes: must be nonempty");
        if (isl.repair_span != kNeverRepaired &&
            (isl.repair_span < 0 || isl.repair_span > sc.grid.num_spans))
            throw ValidationError(path + ".repair_span: must lie in [0, D] or be \"never\"");
        for (int nid : isl.node_ids) {
            if (!node_ids.contains(nid))
                throw ValidationError(path + ".nodes: unknown node id " + std::to_string(nid));
            if (!islanded_nodes.insert(nid).second)
                throw ValidationError(path + ".nodes: node " + std::to_string(nid) +
                                      " belongs to more than one island");
        }
    }
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
        const Node& nd = sc.nodes[i];
        bool listed = islanded_nodes.contains(nd.id);
        if (nd.island_id && !listed)
            throw ValidationError("nodes[" + std::to_string(i) +
                                  "].island: node not listed in islands[].nodes");
        if (!nd.island_id && listed)
            throw ValidationError("nodes[" + std::to_string(i) +
                                  "].island: missing for node listed in an island");
        if (nd.island_id && !island_ids.contains(*nd.island_id))
            throw ValidationError("nodes[" + std::to_string(i) + "].island: unknown island id " +
                                  std::to_string(*nd.island_id));
    }

    std::set<int> mer_ids;
    for (std::size_t j = 0; j < sc.fleet.size(); ++j) {
        const MerSpec& m = sc.fleet[j];
        std::string path = "fleet[" + std::to_string(j) + "]";
        if (!mer_ids.insert(m.id).second)
            throw ValidationError(path + ".id: duplicate MER id " + std::to_string(m.id));
        if (!node_ids.contains(m.initial_node))
            throw ValidationError(path + ".initial_node: unknown node id " +
                                  std::to_string(m.initial_node));
        if (m.travel_cost_kwh_per_span < 0.0)
            throw ValidationError(path + ".travel_cost_kwh_per_span: must be >= 0");
        if (!(m.speed > 0.0)) throw ValidationError(path + ".speed: must be > 0");
    }
}

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    return j.get<double>();
}

inline int require_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<int>();
}

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                         const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(path + "." + key + ": missing");
    return j.at(key);
}

}  // namespace detail

inline Scenario parse_scenario_json(const nlohmann::json& j) {
    using detail::require_int;
    using detail::require_key;
    using detail::require_number;

    Scenario sc;
    const auto& tg = require_key(j, "time_grid", "$");
    sc.grid.span_minutes = require_int(require_key(tg, "span_minutes", "time_grid"), "time_grid.span_minutes");
    sc.grid.num_spans = require_int(require_key(tg, "num_spans", "time_grid"), "time_grid.num_spans");

    if (j.contains("units")) sc.units = j.at("units").get<std::string>();

    const auto& nodes = require_key(j, "nodes", "$");
    if (!nodes.is_array()) throw ParseError("nodes: expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& nj = nodes[i];
        std::string path = "nodes[" + std::to_string(i) + "]";
        Node n;
        n.id = require_int(require_key(nj, "id", path), path + ".id");
        if (nj.contains("island") && !nj.at("island").is_null())
            n.island_id = require_int(nj.at("island"), path + ".island");
        if (nj.contains("load_kw")) n.load_kw = require_number(nj.at("load_kw"), path + ".load_kw");
        if (nj.contains("weight")) n.weight = require_number(nj.at("weight"), path + ".weight");
        sc.nodes.push_back(n);
    }

    const std::size_t n = sc.nodes.size();
    const auto& dist = require_key(j, "distances", "$");
    if (dist.contains("matrix")) {
        const auto& m = dist.at("matrix");
        if (!m.is_array()) throw ParseError("distances.matrix: expected an array of rows");
        for (std::size_t i = 0; i < m.size(); ++i) {
            std::vector<double> row;
            for (std::size_t k = 0; k < m[i].size(); ++k)
                row.push_back(require_number(m[i][k], "distances.matrix[" + std::to_string(i) + "][" +
                                                          std::to_string(k) + "]"));
            sc.distances.push_back(std::move(row));
        }
    } else if (dist.contains("edges")) {
        std::unordered_map<int, int> index_of;
        for (std::size_t i = 0; i < sc.nodes.size(); ++i) index_of[sc.nodes[i].id] = static_cast<int>(i);
        std::vector<std::tuple<int, int, double>> edges;
        const auto& ej = dist.at("edges");
        if (!ej.is_array()) throw ParseError("distances.edges: expected an array");
        for (std::size_t e = 0; e < ej.size(); ++e) {
            std::string path = "distances.edges[" + std::to_string(e) + "]";
            int a = require_int(require_key(ej[e], "from", path), path + ".from");
            int b = require_int(require_key(ej[e], "to", path), path + ".to");
            double len = require_number(require_key(ej[e], "length", path), path + ".length");
            if (!index_of.contains(a) || !index_of.contains(b))
                throw ParseError(path + ": unknown node id");
            if (!(len >= 0.0)) throw ParseError(path + ".length: must be >= 0");
            edges.emplace_back(index_of[a], index_of[b], len);
        }
        sc.distances = detail::shortest_path_matrix(n, edges);
    } else {
        throw ParseError("distances: expected either \"matrix\" or \"edges\"");
    }

    if (j.contains("islands")) {
        const auto& ij = j.at("islands");
        if (!ij.is_array()) throw ParseError("islands: expected an array");
        for (std::size_t l = 0; l < ij.size(); ++l) {
            std::string path = "islands[" + std::to_string(l) + "]";
            Island isl;
            isl.id = require_int(require_key(ij[l], "id", path), path + ".id");
            const auto& members = require_key(ij[l], "nodes", path);
            for (const auto& v : members) isl.node_ids.push_back(require_int(v, path + ".nodes[]"));
            const auto& rs = require_key(ij[l], "repair_span", path);
            if (rs.is_string() && rs.get<std::string>() == "never")
                isl.repair_span = kNeverRepaired;
            else
                isl.repair_span = require_int(rs, path + ".repair_span");
            sc.islands.push_back(std::move(isl));
        }
    }

    const auto& fleet = require_key(j, "fleet", "$");
    if (!fleet.is_array()) throw ParseError("fleet: expected an array");
    for (std::size_t m = 0; m < fleet.size(); ++m) {
        std::string path = "fleet[" + std::to_string(m) + "]";
        MerSpec spec;
        spec.id = require_int(require_key(fleet[m], "id", path), path + ".id");
        spec.initial_node =
            require_int(require_key(fleet[m], "initial_node", path), path + ".initial_node");
        if (fleet[m].contains("travel_cost_kwh_per_span"))
            spec.travel_cost_kwh_per_span =
                require_number(fleet[m].at("travel_cost_kwh_per_span"), path + ".travel_cost_kwh_per_span");
        if (fleet[m].contains("speed"))
            spec.speed = require_number(fleet[m].at("speed"), path + ".speed");
        sc.fleet.push_back(spec);
    }

    validate_scenario(sc);
    return sc;
}

/// Loads and fully validates a scenario file (JSON, schema in the README).
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return parse_scenario_json(j);
}

/// Travel-time matrix for one MER of the fleet.
inline SpanMatrix travel_times_for(const Scenario& sc, const MerSpec& mer) {
    return compute_travel_times(sc.distances, mer.speed, sc.grid);
}

/// Re-discretizes a scenario onto a new span length, keeping the horizon.
/// Repair times and travel times round up to whole spans; per-span travel
/// cost rescales proportionally so the cost per minute of travel is kept.
inline Scenario rescale_time_grid(const Scenario& sc, int new_span_minutes) {
    if (new_span_minutes < 1) throw ValidationError("span override: must be >= 1 minute");
    Scenario out = sc;
    const int horizon = sc.grid.horizon_minutes();
    out.grid.span_minutes = new_span_minutes;
    out.grid.num_spans = std::max(1, static_cast<int>(std::ceil(
                                          static_cast<double>(horizon) / new_span_minutes - 1e-9)));
    const double ratio = static_cast<double>(new_span_minutes) / sc.grid.span_minutes;
    for (Island& isl : out.islands) {
        if (isl.repair_span == kNeverRepaired) continue;
        int repair_minutes = isl.repair_span * sc.grid.span_minutes;
        isl.repair_span = std::min(
            out.grid.num_spans,
            static_cast<int>(std::ceil(static_cast<double>(repair_minutes) / new_span_minutes - 1e-9)));
    }
    for (MerSpec& m : out.fleet) m.travel_cost_kwh_per_span *= ratio;
    validate_scenario(out);
    return out;
}

}  // namespace merroute

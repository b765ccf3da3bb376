#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/itinerary.hpp"
#include "merroute/mobility.hpp"
#include "merroute/scenario.hpp"

namespace merroute {

/// Brute-force enumeration limits. Beyond these the joint itinerary space is
/// no longer practical to sweep exhaustively.
struct OracleSizeGuard {
    static constexpr int max_nodes = 6;
    static constexpr int max_spans = 14;
    static constexpr int max_mers = 2;
};

inline void check_oracle_size_guard(const Scenario& sc) {
    if (sc.num_nodes() > OracleSizeGuard::max_nodes)
        throw SizeGuardError("oracle size guard: N = " + std::to_string(sc.num_nodes()) +
                             " exceeds " + std::to_string(OracleSizeGuard::max_nodes));
    if (sc.grid.num_spans > OracleSizeGuard::max_spans)
        throw SizeGuardError("oracle size guard: D = " + std::to_string(sc.grid.num_spans) +
                             " exceeds " + std::to_string(OracleSizeGuard::max_spans));
    if (sc.num_mers() > OracleSizeGuard::max_mers)
        throw SizeGuardError("oracle size guard: M = " + std::to_string(sc.num_mers()) +
                             " exceeds " + std::to_string(OracleSizeGuard::max_mers));
}

/// Every feasible itinerary of one MER: at each decision span the MER either
/// keeps parking or departs toward another node; a departed leg runs exactly
/// its travel time, or is cut off by the horizon; one parking span separates
/// consecutive legs. Departures whose legs the horizon truncates are included
/// since the constraint set permits them.
inline std::vector<Itinerary> enumerate_mer_itineraries(const Scenario& sc, int mer_index) {
    check_oracle_size_guard(sc);
    const SpanMatrix travel_spans = travel_times_for(sc, sc.fleet[mer_index]);
    const int n = static_cast<int>(sc.num_nodes());
    const int d = sc.grid.num_spans;
    const int start = sc.node_index(sc.fleet[mer_index].initial_node);

    std::vector<Itinerary> result;
    std::vector<TravelLeg> legs;
    std::function<void(int, int)> explore = [&](int node, int next_span) {
        if (next_span > d) {
            result.push_back(Itinerary{mer_index, {}, legs});
            return;
        }
        explore(node, next_span + 1);  // keep parking through next_span
        for (int dest = 0; dest < n; ++dest) {
            if (dest == node) continue;
            const int full = travel_spans[node][dest];
            const int arrive = next_span + full - 1;
            legs.push_back(TravelLeg{node, dest, next_span, std::min(arrive, d)});
            if (arrive >= d)
                result.push_back(Itinerary{mer_index, {}, legs});
            else
                explore(dest, arrive + 2);  // arrive+1 is the forced parking span
            legs.pop_back();
        }
    };
    explore(start, 1);
    for (Itinerary& it : result)
        it.parks = parks_from_legs(it, start, d);
    return result;
}

/// Materialized cross product over the fleet, in deterministic order.
inline std::vector<JointItinerary> enumerate_itineraries(const Scenario& sc) {
    check_oracle_size_guard(sc);
    std::vector<std::vector<Itinerary>> per_mer;
    for (std::size_t j = 0; j < sc.num_mers(); ++j)
        per_mer.push_back(enumerate_mer_itineraries(sc, static_cast<int>(j)));
    std::vector<JointItinerary> joint;
    if (per_mer.size() == 1) {
        for (const Itinerary& a : per_mer[0]) joint.push_back({a});
    } else {
        for (const Itinerary& a : per_mer[0])
            for (const Itinerary& b : per_mer[1]) joint.push_back({a, b});
    }
    return joint;
}

namespace detail {

/// Restored-energy coefficient of island l at span t, in kWh.
inline double restored_coef(const Scenario& sc, const Island& island, int t) {
    if (!island.unrepaired_at(t)) return 0.0;
    double weighted_load = 0.0;
    for (int nid : island.node_ids) {
        const Node& node = sc.nodes[sc.node_index(nid)];
        weighted_load += node.weight * node.load_kw;
    }
    return weighted_load * sc.grid.span_hours();
}

/// Island index occupied per span (-1 while traveling or outside islands).
inline std::vector<int> island_per_span(const Scenario& sc, const Itinerary& it, int mer_index) {
    const int start = sc.node_index(sc.fleet[mer_index].initial_node);
    std::vector<int> parked = parked_node_per_span(it, start, sc.grid.num_spans);
    std::vector<int> islands(parked.size(), -1);
    for (std::size_t t = 0; t < parked.size(); ++t)
        if (parked[t] >= 0) islands[t] = sc.island_of(parked[t]);
    return islands;
}

}  // namespace detail

/// Objective of a joint itinerary: weighted interrupted load restored over
/// every span where some MER parks inside an unrepaired island, minus the
/// per-span travel cost of every traveling span.
inline double simulate_objective(const JointItinerary& joint, const Scenario& sc) {
    if (joint.size() != sc.num_mers())
        throw ValidationError("joint itinerary: expected one itinerary per MER");
    const int d = sc.grid.num_spans;
    std::vector<std::vector<int>> islands_at;
    for (std::size_t j = 0; j < joint.size(); ++j) {
        const SpanMatrix travel_spans = travel_times_for(sc, sc.fleet[j]);
        check_itinerary(joint[j], sc.node_index(sc.fleet[j].initial_node), travel_spans, d);
        islands_at.push_back(detail::island_per_span(sc, joint[j], static_cast<int>(j)));
    }

    double restored = 0.0;
    for (int t = 0; t <= d; ++t) {
        for (std::size_t l = 0; l < sc.islands.size(); ++l) {
            bool occupied = false;
            for (const auto& at : islands_at) occupied = occupied || at[t] == static_cast<int>(l);
            if (occupied) restored += detail::restored_coef(sc, sc.islands[l], t);
        }
    }
    double travel_cost = 0.0;
    for (std::size_t j = 0; j < joint.size(); ++j)
        travel_cost += sc.fleet[j].travel_cost_kwh_per_span * joint[j].total_travel_spans();
    return restored - travel_cost;
}

struct OracleResult {
    JointItinerary itinerary;
    double objective = 0.0;
};

namespace detail {

inline bool joint_legs_less(const JointItinerary& a, const JointItinerary& b) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j].legs != b[j].legs) return a[j].legs < b[j].legs;
    }
    return false;
}

inline int joint_travel_spans(const JointItinerary& joint) {
    int total = 0;
    for (const Itinerary& it : joint) total += it.total_travel_spans();
    return total;
}

}  // namespace detail

/// Exhaustive argmax of simulate_objective. Ties break toward fewer total
/// travel spans, then lexicographically smaller leg lists, so the result is
/// deterministic.
inline OracleResult best_itinerary(const Scenario& sc) {
    check_oracle_size_guard(sc);
    const int d = sc.grid.num_spans;
    const std::size_t m = sc.num_mers();

    std::vector<std::vector<Itinerary>> per_mer;
    std::vector<std::vector<std::vector<int>>> islands_at;  // [mer][it][t]
    std::vector<std::vector<int>> travel_spans_of;          // [mer][it]
    for (std::size_t j = 0; j < m; ++j) {
        per_mer.push_back(enumerate_mer_itineraries(sc, static_cast<int>(j)));
        std::vector<std::vector<int>> at;
        std::vector<int> spans;
        for (const Itinerary& it : per_mer[j]) {
            at.push_back(detail::island_per_span(sc, it, static_cast<int>(j)));
            spans.push_back(it.total_travel_spans());
        }
        islands_at.push_back(std::move(at));
        travel_spans_of.push_back(std::move(spans));
    }

    // Per-(island, span) coefficients.
    const int num_islands = static_cast<int>(sc.islands.size());
    std::vector<std::vector<double>> coef(num_islands, std::vector<double>(d + 1, 0.0));
    for (int l = 0; l < num_islands; ++l)
        for (int t = 0; t <= d; ++t) coef[l][t] = detail::restored_coef(sc, sc.islands[l], t);

    // Restored energy of one itinerary alone.
    auto solo_restored = [&](const std::vector<int>& at) {
        double total = 0.0;
        for (int t = 0; t <= d; ++t)
            if (at[t] >= 0) total += coef[at[t]][t];
        return total;
    };

    OracleResult best;
    bool have_best = false;
    auto consider = [&](JointItinerary joint, double objective) {
        int spans = detail::joint_travel_spans(joint);
        int best_spans = have_best ? detail::joint_travel_spans(best.itinerary) : 0;
        if (!have_best || objective > best.objective ||
            (objective == best.objective &&
             (spans < best_spans ||
              (spans == best_spans && detail::joint_legs_less(joint, best.itinerary))))) {
            best = OracleResult{std::move(joint), objective};
            have_best = true;
        }
    };

    if (m == 1) {
        for (std::size_t a = 0; a < per_mer[0].size(); ++a) {
            double objective = solo_restored(islands_at[0][a]) -
                               sc.fleet[0].travel_cost_kwh_per_span * travel_spans_of[0][a];
            consider({per_mer[0][a]}, objective);
        }
    } else {
        for (std::size_t a = 0; a < per_mer[0].size(); ++a) {
            const auto& at_a = islands_at[0][a];
            double cost_a = sc.fleet[0].travel_cost_kwh_per_span * travel_spans_of[0][a];
            for (std::size_t b = 0; b < per_mer[1].size(); ++b) {
                const auto& at_b = islands_at[1][b];
                double restored = 0.0;
                for (int t = 0; t <= d; ++t) {
                    if (at_a[t] >= 0) restored += coef[at_a[t]][t];
                    if (at_b[t] >= 0 && at_b[t] != at_a[t]) restored += coef[at_b[t]][t];
                }
                double objective = restored - cost_a -
                                   sc.fleet[1].travel_cost_kwh_per_span * travel_spans_of[1][b];
                consider({per_mer[0][a], per_mer[1][b]}, objective);
            }
        }
    }
    return best;
}

/// Full variable assignment induced by a joint itinerary: park/travel labels
/// straight from the legs, injected time equal to the full travel time at
/// each leg's first span, residual countdown, lock on consecutive traveling
/// spans, island indicators from the parking positions.
struct EncodedAssignment {
    AssignmentValues mobility;
    std::vector<std::vector<std::uint8_t>> island_restored;  // [island][t]
};

inline EncodedAssignment encode_itinerary(const JointItinerary& joint, const Scenario& sc) {
    if (joint.size() != sc.num_mers())
        throw ValidationError("joint itinerary: expected one itinerary per MER");
    const int n = static_cast<int>(sc.num_nodes());
    const int d = sc.grid.num_spans;
    EncodedAssignment encoded;
    encoded.island_restored.assign(sc.islands.size(), std::vector<std::uint8_t>(d + 1, 0));

    for (std::size_t j = 0; j < joint.size(); ++j) {
        const SpanMatrix travel_spans = travel_times_for(sc, sc.fleet[j]);
        const int start = sc.node_index(sc.fleet[j].initial_node);
        check_itinerary(joint[j], start, travel_spans, d);

        MerAssignment a = make_blank_assignment(n, d);
        std::vector<int> parked = parked_node_per_span(joint[j], start, d);
        for (int t = 0; t <= d; ++t)
            if (parked[t] >= 0) a.park[parked[t]][t] = 1;
        for (const TravelLeg& leg : joint[j].legs)
            for (int t = leg.depart_span; t <= leg.arrive_span; ++t) a.travel[leg.destination][t] = 1;
        recompute_fuel(a, travel_spans);
        a.lock = canonical_lock(a);

        for (int t = 0; t <= d; ++t) {
            if (parked[t] < 0) continue;
            int l = sc.island_of(parked[t]);
            if (l >= 0) encoded.island_restored[l][t] = 1;
        }
        encoded.mobility.mers.push_back(std::move(a));
    }
    return encoded;
}

}  // namespace merroute

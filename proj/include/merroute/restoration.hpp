#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/milp.hpp"
#include "merroute/mobility.hpp"
#include "merroute/oracle.hpp"
#include "merroute/scenario.hpp"

namespace merroute {

/// Service-restoration MILP: mobility blocks for the fleet, island-restored
/// indicators linked to parking labels, and the objective
///   max  sum_t sum_l y[l][t] * (weighted interrupted load of l at t) * dt
///      - sum_j cost_j * (total traveling spans of MER j).
struct RestorationModel {
    Scenario scenario;
    TransitionCoefficients coeffs;
    MilpModel model;
    std::vector<MobilityBlock> mobility;     // one single-MER block per MER
    std::vector<SpanMatrix> travel_spans;    // per MER
    std::vector<std::vector<VarRef>> island_restored;  // [island][t]

    const MerVarBlock& mer_vars(std::size_t j) const { return mobility[j].mers[0]; }
    int initial_node_index(std::size_t j) const { return mobility[j].initial_node_idx[0]; }
};

/// Restored-energy objective coefficient of island index l at span t (kWh).
inline double restoration_coefficient(const Scenario& sc, std::size_t l, int t) {
    return detail::restored_coef(sc, sc.islands[l], t);
}

inline RestorationModel build_restoration(const Scenario& sc,
                                          const TransitionCoefficients& coeffs =
                                              TransitionCoefficients::reference()) {
    validate_scenario(sc);
    RestorationModel rm;
    rm.scenario = sc;
    rm.coeffs = coeffs;
    const int d = sc.grid.num_spans;

    std::vector<int> node_ids;
    for (const Node& node : sc.nodes) node_ids.push_back(node.id);

    for (const MerSpec& mer : sc.fleet) {
        SpanMatrix travel_spans = travel_times_for(sc, mer);
        rm.mobility.push_back(
            build_mobility_block({mer}, travel_spans, sc.grid, coeffs, rm.model, node_ids));
        rm.travel_spans.push_back(std::move(travel_spans));
    }

    // Island indicators with both links of the big-M pair; the constant is
    // the fleet size since at most M parking labels can sit in one island.
    const double fleet_size = static_cast<double>(sc.num_mers());
    for (std::size_t l = 0; l < sc.islands.size(); ++l) {
        std::vector<VarRef> row;
        for (int t = 0; t <= d; ++t)
            row.push_back(rm.model.add_binary("y_l" + std::to_string(sc.islands[l].id) + "_t" +
                                              std::to_string(t)));
        rm.island_restored.push_back(std::move(row));
    }
    for (std::size_t l = 0; l < sc.islands.size(); ++l) {
        const Island& island = sc.islands[l];
        for (int t = 0; t <= d; ++t) {
            std::vector<LinTerm> lo{{-fleet_size, rm.island_restored[l][t]}};
            std::vector<LinTerm> up{{1.0, rm.island_restored[l][t]}};
            for (std::size_t j = 0; j < sc.num_mers(); ++j) {
                for (int nid : island.node_ids) {
                    VarRef x = rm.mer_vars(j).park[sc.node_index(nid)][t];
                    lo.push_back({1.0, x});
                    up.push_back({-1.0, x});
                }
            }
            std::string tag = "l" + std::to_string(island.id) + "_t" + std::to_string(t);
            rm.model.add_constraint("island_lo_" + tag, std::move(lo), ConstraintSense::LessEqual,
                                    0.0);
            rm.model.add_constraint("island_up_" + tag, std::move(up), ConstraintSense::LessEqual,
                                    0.0);
        }
    }

    std::vector<LinTerm> objective;
    for (std::size_t l = 0; l < sc.islands.size(); ++l)
        for (int t = 0; t <= d; ++t)
            objective.push_back({restoration_coefficient(sc, l, t), rm.island_restored[l][t]});
    for (std::size_t j = 0; j < sc.num_mers(); ++j) {
        const double cost = sc.fleet[j].travel_cost_kwh_per_span;
        for (int i = 0; i < static_cast<int>(sc.num_nodes()); ++i)
            for (int t = 0; t <= d; ++t)
                objective.push_back({-cost, rm.mer_vars(j).travel[i][t]});
    }
    rm.model.set_objective(ObjectiveSense::Maximize, std::move(objective));
    return rm;
}

struct ObjectiveBreakdown {
    double restored_kwh = 0.0;
    double travel_cost_kwh = 0.0;
};

/// Recomputes both objective terms from the solution values; their difference
/// must match the reported objective within 1e-6.
inline ObjectiveBreakdown objective_breakdown(const Solution& sol, const RestorationModel& rm) {
    const Scenario& sc = rm.scenario;
    ObjectiveBreakdown out;
    for (std::size_t l = 0; l < sc.islands.size(); ++l)
        for (int t = 0; t <= sc.grid.num_spans; ++t)
            out.restored_kwh += restoration_coefficient(sc, l, t) * sol.value(rm.island_restored[l][t]);
    for (std::size_t j = 0; j < sc.num_mers(); ++j) {
        double spans = 0.0;
        for (int i = 0; i < static_cast<int>(sc.num_nodes()); ++i)
            for (int t = 0; t <= sc.grid.num_spans; ++t)
                spans += sol.value(rm.mer_vars(j).travel[i][t]);
        out.travel_cost_kwh += sc.fleet[j].travel_cost_kwh_per_span * spans;
    }
    if (std::abs(out.restored_kwh - out.travel_cost_kwh - sol.objective_value) > 1e-6)
        throw ValidationError("inconsistent solution: objective decomposition differs by " +
                              std::to_string(out.restored_kwh - out.travel_cost_kwh -
                                             sol.objective_value));
    return out;
}

/// Decodes the per-MER parking intervals and travel legs of a solution.
/// Requires an optimal or gap-limit solution with integral binaries.
inline std::vector<Itinerary> decode_itineraries(const Solution& sol, const RestorationModel& rm) {
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::GapLimit)
        throw ModelError(std::string("cannot decode a solution with status ") + to_string(sol.status));
    std::vector<Itinerary> result;
    for (std::size_t j = 0; j < rm.mobility.size(); ++j) {
        AssignmentValues values = extract_assignment(rm.mobility[j], sol);
        Itinerary it = decode_mer_labels(values.mers[0]);
        it.mer_index = static_cast<int>(j);
        result.push_back(std::move(it));
    }
    return result;
}

/// Validates every MER of a solved restoration model and the island
/// indicator links.
inline ValidationReport validate_solution(const Solution& sol, const RestorationModel& rm) {
    ValidationReport merged;
    for (std::size_t j = 0; j < rm.mobility.size(); ++j) {
        AssignmentValues values = extract_assignment(rm.mobility[j], sol);
        ValidationReport r =
            validate_mer_assignment(values.mers[0], rm.travel_spans[j], rm.scenario.grid, rm.coeffs,
                                    rm.initial_node_index(j));
        for (std::string& s : r.violations)
            merged.fail("mer " + std::to_string(rm.scenario.fleet[j].id) + ": " + s);
        for (std::string& s : r.warnings)
            merged.warnings.push_back("mer " + std::to_string(rm.scenario.fleet[j].id) + ": " + s);
    }
    const Scenario& sc = rm.scenario;
    constexpr double tol = 1e-6;
    for (std::size_t l = 0; l < sc.islands.size(); ++l) {
        for (int t = 0; t <= sc.grid.num_spans; ++t) {
            double y = sol.value(rm.island_restored[l][t]);
            double parked = 0.0;
            for (std::size_t j = 0; j < sc.num_mers(); ++j)
                for (int nid : sc.islands[l].node_ids)
                    parked += sol.value(rm.mer_vars(j).park[sc.node_index(nid)][t]);
            if (y > parked + tol || parked > sc.num_mers() * y + tol)
                merged.fail("island_l" + std::to_string(sc.islands[l].id) + "_t" +
                            std::to_string(t) + ": indicator link violated");
        }
    }
    return merged;
}

}  // namespace merroute

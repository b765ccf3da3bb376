#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "merroute/itinerary.hpp"
#include "merroute/milp_io.hpp"
#include "merroute/restoration.hpp"
#include "merroute/sizing.hpp"
#include "merroute/solve.hpp"

namespace merroute {

/// Everything a solve run reports: scenario summary, objective with its
/// breakdown, per-MER itineraries, model size (measured and closed form),
/// wall time and the post-solve validation verdict.
struct RunReport {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    double restored_kwh = 0.0;
    double travel_cost_kwh = 0.0;
    double gap = 0.0;
    std::vector<Itinerary> itineraries;
    SizeReport mobility_formula;
    SizeReport mobility_measured;
    std::size_t indicator_vars = 0;
    std::size_t indicator_constraints = 0;
    double wall_seconds = 0.0;
    ValidationReport validation;
};

inline RunReport build_run_report(const RestorationModel& rm, const Solution& sol,
                                  double wall_seconds) {
    const Scenario& sc = rm.scenario;
    RunReport report;
    report.status = sol.status;
    report.objective = sol.objective_value;
    report.gap = sol.gap;
    report.wall_seconds = wall_seconds;
    report.mobility_formula = size_proposed(static_cast<long long>(sc.num_nodes()),
                                            static_cast<long long>(sc.num_mers()),
                                            sc.grid.num_spans);
    report.mobility_measured = report.mobility_formula;
    report.mobility_measured.model_name = "proposed-measured";
    long long bin = 0, cont = 0, cons = 0;
    for (const MobilityBlock& block : rm.mobility) {
        bin += static_cast<long long>(block.binaries_added);
        cont += static_cast<long long>(block.continuous_added);
        cons += static_cast<long long>(block.constraints_added);
    }
    report.mobility_measured.binary_vars = bin;
    report.mobility_measured.continuous_vars = cont;
    report.mobility_measured.constraints = cons;
    report.indicator_vars = sc.islands.size() * (sc.grid.num_spans + 1);
    report.indicator_constraints = 2 * report.indicator_vars;

    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapLimit) {
        ObjectiveBreakdown breakdown = objective_breakdown(sol, rm);
        report.restored_kwh = breakdown.restored_kwh;
        report.travel_cost_kwh = breakdown.travel_cost_kwh;
        report.itineraries = decode_itineraries(sol, rm);
        report.validation = validate_solution(sol, rm);
    }
    return report;
}

inline void write_report_txt(const RunReport& report, const RestorationModel& rm,
                             std::ostream& out) {
    const Scenario& sc = rm.scenario;
    out << "scenario: " << sc.num_nodes() << " nodes, " << sc.num_mers() << " MERs, "
        << sc.grid.num_spans << " spans of " << sc.grid.span_minutes << " min ("
        << sc.grid.horizon_minutes() << " min horizon), " << sc.islands.size() << " islands\n";
    out << "status: " << to_string(report.status) << " (gap " << detail::fmt_double(report.gap)
        << ")\n";
    out << std::fixed << std::setprecision(3);
    out << "objective: " << report.objective << " kWh = restored " << report.restored_kwh
        << " kWh - travel " << report.travel_cost_kwh << " kWh\n";
    out << "model size: " << report.mobility_measured.binary_vars << " binaries + "
        << report.mobility_measured.continuous_vars << " continuous, "
        << report.mobility_measured.constraints << " mobility constraints (formula "
        << report.mobility_formula.binary_vars << "/" << report.mobility_formula.continuous_vars
        << "/" << report.mobility_formula.constraints << "), plus " << report.indicator_vars
        << " island indicators and " << report.indicator_constraints << " links\n";
    for (std::size_t j = 0; j < report.itineraries.size(); ++j) {
        const Itinerary& it = report.itineraries[j];
        out << "mer " << sc.fleet[j].id << ":\n";
        std::size_t p = 0, l = 0;
        while (p < it.parks.size() || l < it.legs.size()) {
            bool take_park = p < it.parks.size() &&
                             (l >= it.legs.size() || it.parks[p].first_span < it.legs[l].depart_span);
            if (take_park) {
                out << "  park " << sc.nodes[it.parks[p].node].id << " spans "
                    << it.parks[p].first_span << ".." << it.parks[p].last_span << "\n";
                ++p;
            } else {
                const TravelLeg& leg = it.legs[l];
                out << "  travel " << sc.nodes[leg.origin].id << " -> "
                    << sc.nodes[leg.destination].id << " spans " << leg.depart_span << ".."
                    << leg.arrive_span;
                if (leg_truncated(leg, rm.travel_spans[j])) out << " (cut off by horizon)";
                out << "\n";
                ++l;
            }
        }
    }
    out << "validation: " << (report.validation.valid ? "PASS" : "FAIL");
    if (!report.validation.warnings.empty())
        out << " (" << report.validation.warnings.size() << " warnings)";
    out << "\n";
    for (const std::string& v : report.validation.violations) out << "  violation: " << v << "\n";
    for (const std::string& w : report.validation.warnings) out << "  warning: " << w << "\n";
    out << "wall time: " << std::setprecision(2) << report.wall_seconds << " s\n";
}

/// Machine itinerary rows: mer,kind,node,destination,start,end. Parking rows
/// leave `destination` empty; travel rows put the origin in `node`.
inline void write_itineraries_csv(const RunReport& report, const RestorationModel& rm,
                                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open itineraries csv for writing: " + path.string());
    const Scenario& sc = rm.scenario;
    out << "mer,kind,node,destination,start,end\n";
    for (std::size_t j = 0; j < report.itineraries.size(); ++j) {
        const Itinerary& it = report.itineraries[j];
        std::size_t p = 0, l = 0;
        while (p < it.parks.size() || l < it.legs.size()) {
            bool take_park = p < it.parks.size() &&
                             (l >= it.legs.size() || it.parks[p].first_span < it.legs[l].depart_span);
            if (take_park) {
                out << sc.fleet[j].id << ",park," << sc.nodes[it.parks[p].node].id << ",,"
                    << it.parks[p].first_span << "," << it.parks[p].last_span << "\n";
                ++p;
            } else {
                out << sc.fleet[j].id << ",travel," << sc.nodes[it.legs[l].origin].id << ","
                    << sc.nodes[it.legs[l].destination].id << "," << it.legs[l].depart_span << ","
                    << it.legs[l].arrive_span << "\n";
                ++l;
            }
        }
    }
}

}  // namespace merroute

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4, 6 and 7 exercise full solves; an external MILP solver
// is taken from $MER_SOLVER_CMD or, failing that, the bundled scipy wrapper.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exactness_helpers.hpp"
#include "merroute/milp_io.hpp"
#include "merroute/oracle.hpp"
#include "merroute/report.hpp"
#include "merroute/restoration.hpp"
#include "merroute/sizing.hpp"
#include "merroute/solve.hpp"

using namespace merroute;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string external_solver_command() {
    if (const char* env = std::getenv("MER_SOLVER_CMD")) return env;
    std::string wrapper = std::string(MERROUTE_TOOLS_DIR) + "/scipy_milp_solve.py";
    if (std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0)
        return "python3 " + wrapper + " {model} {solution} {gap} {timelimit}";
    return "";
}

// Travel legs collected from criteria 4 and 6 for the no-useless-travel sweep.
struct LegEvidence {
    int duration;
    int matrix_spans;
    bool truncated;
};
std::vector<LegEvidence> collected_legs;

void collect_legs(const Solution& sol, const RestorationModel& rm) {
    std::vector<Itinerary> its = decode_itineraries(sol, rm);
    for (std::size_t j = 0; j < its.size(); ++j)
        for (const TravelLeg& leg : its[j].legs)
            collected_legs.push_back(
                {leg.duration(), rm.travel_spans[j][leg.origin][leg.destination],
                 leg.arrive_span == rm.scenario.grid.num_spans &&
                     leg.duration() < rm.travel_spans[j][leg.origin][leg.destination]});
}

// ---------------------------------------------------------------------------

void criterion_1_coefficients() {
    auto start = Clock::now();
    std::ostringstream detail;
    bool pass = true;

    TransitionCoefficients reference = TransitionCoefficients::reference();
    double min_margin = 1e300;
    for (const CoefficientMargin& m : coefficient_margins(reference))
        min_margin = std::min(min_margin, m.margin);
    if (!check_coefficients(reference, 1e-9).ok || min_margin < -1e-9) pass = false;
    detail << "reference tuple min margin " << min_margin;

    TransitionCoefficients derived = derive_transition_coefficients();
    if (!check_coefficients(derived, 1e-9).ok) {
        pass = false;
        detail << "; derived tuple FAILS";
    } else {
        detail << "; derived tuple passes";
    }
    double elapsed = seconds_since(start);
    if (elapsed >= 1.0) pass = false;
    detail << "; " << elapsed << " s";
    report(1, "coefficient verification", pass, detail.str());
}

void criterion_2_table_replay() {
    auto start = Clock::now();
    bool pass = true;
    std::ostringstream detail;

    MilpModel model;
    SpanMatrix travel{{0, 3}, {3, 0}};
    TimeGrid grid{10, 6};
    std::vector<MerSpec> fleet{{1, 0, 0.3, 1000.0}};
    MobilityBlock block =
        build_mobility_block(fleet, travel, grid, TransitionCoefficients::reference(), model);

    auto point_for_leg = [&](int first, int last) {
        MerAssignment a = make_blank_assignment(2, grid.num_spans);
        for (int t = 0; t < first; ++t) a.park[0][t] = 1;
        for (int t = first; t <= last; ++t) a.travel[1][t] = 1;
        for (int t = last + 1; t <= grid.num_spans; ++t) a.park[1][t] = 1;
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        std::vector<double> values(model.num_vars(), 0.0);
        write_assignment_values(block, AssignmentValues{{a}}, values);
        return values;
    };
    auto count_violations = [&](const std::vector<double>& values) {
        int violated = 0;
        for (const LinConstraint& c : model.constraints())
            if (constraint_violation(c, values) > 1e-9) ++violated;
        return violated;
    };

    std::vector<double> reference = point_for_leg(2, 4);
    const MerVarBlock& vars = block.mers[0];
    const double expected_injected[] = {0, 0, 3, 0, 0, 0, 0};
    const double expected_residual[] = {0, 0, 3, 2, 1, 0, 0};
    for (int t = 0; t <= 6; ++t) {
        if (reference[vars.injected[t].index] != expected_injected[t]) pass = false;
        if (reference[vars.residual[t].index] != expected_residual[t]) pass = false;
    }
    int ok_violations = count_violations(reference);
    int early_violations = count_violations(point_for_leg(2, 3));
    int late_violations = count_violations(point_for_leg(2, 5));
    if (ok_violations != 0 || early_violations == 0 || late_violations == 0) pass = false;
    detail << "reference point violates " << ok_violations << ", early " << early_violations
           << ", late " << late_violations;

    double elapsed = seconds_since(start);
    if (elapsed >= 1.0) pass = false;
    detail << "; " << elapsed << " s";
    report(2, "travel-segment replay", pass, detail.str());
}

void criterion_3_exactness() {
    auto start = Clock::now();
    bool pass = true;
    std::ostringstream detail;

    struct CatalogEntry {
        SpanMatrix travel;
        int num_spans;
        int initial_node;
    };
    const std::vector<CatalogEntry> catalog = {
        {{{0}}, 6, 0},
        {{{0, 1}, {1, 0}}, 6, 0},
        {{{0, 2}, {2, 0}}, 6, 0},
        {{{0, 3}, {3, 0}}, 6, 1},
        {{{0, 1}, {3, 0}}, 5, 0},
        {{{0, 2}, {1, 0}}, 6, 1},
        {{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, 5, 0},
        {{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}, 6, 0},
        {{{0, 3, 1}, {1, 0, 2}, {2, 3, 0}}, 6, 1},
        {{{0, 2, 2}, {2, 0, 2}, {2, 2, 0}}, 6, 2},
        {{{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}, 6, 0},
        {{{0, 3, 3}, {3, 0, 3}, {3, 3, 0}}, 4, 0},
    };

    std::size_t checked = 0;
    for (const TransitionCoefficients& coeffs :
         {TransitionCoefficients::reference(), derive_transition_coefficients()}) {
        for (std::size_t entry = 0; entry < catalog.size(); ++entry) {
            const CatalogEntry& cat = catalog[entry];
            auto feasible = testing::feasible_label_set(cat.travel, cat.num_spans,
                                                        cat.initial_node, coeffs);
            Scenario sc = testing::scenario_with_travel_times(cat.travel, cat.num_spans,
                                                              cat.initial_node);
            auto induced = testing::itinerary_label_set(sc, 0);
            ++checked;
            if (feasible != induced) {
                pass = false;
                detail << "entry " << entry << ": constraint-feasible " << feasible.size()
                       << " vs itinerary-induced " << induced.size() << "; ";
                break;
            }
        }
        if (!pass) break;
    }
    detail << checked << " (matrix, tuple) pairs with zero symmetric difference";

    double elapsed = seconds_since(start);
    if (elapsed >= 300.0) pass = false;
    detail << "; " << elapsed << " s";
    report(3, "exactness by exhaustion", pass, detail.str());
}

Scenario random_guarded_scenario(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> n_pick(2, 4);
    std::uniform_int_distribution<int> d_pick(4, 8);
    std::uniform_int_distribution<int> m_pick(1, 2);
    std::uniform_int_distribution<int> t_pick(1, 3);
    std::uniform_real_distribution<double> load_pick(50.0, 150.0);
    std::uniform_real_distribution<double> weight_pick(0.5, 2.0);
    std::uniform_real_distribution<double> cost_pick(0.1, 0.5);
    std::uniform_int_distribution<int> coin(0, 5);

    const int n = n_pick(rng);
    const int d = d_pick(rng);
    const int m = m_pick(rng);

    Scenario sc;
    sc.grid = TimeGrid{10, d};
    SpanMatrix travel(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (i != k) travel[i][k] = t_pick(rng);
    sc.distances.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) sc.distances[i][k] = travel[i][k] * 10000.0;

    // 1..2 islands over distinct nodes; remaining nodes stay energized.
    std::uniform_int_distribution<int> island_count_pick(1, std::min(2, n));
    int num_islands = island_count_pick(rng);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t cursor = 0;
    for (int l = 0; l < num_islands; ++l) {
        std::uniform_int_distribution<int> members_pick(1, std::max(1, (n - static_cast<int>(cursor)) / 2));
        int members = std::min<int>(members_pick(rng), n - static_cast<int>(cursor));
        Island island;
        island.id = 100 + l;
        island.repair_span = coin(rng) == 0 ? kNeverRepaired
                                            : std::uniform_int_distribution<int>(1, d)(rng);
        for (int k = 0; k < members; ++k) island.node_ids.push_back(order[cursor++]);
        sc.islands.push_back(island);
    }
    for (int i = 0; i < n; ++i) sc.nodes.push_back(Node{i, std::nullopt, 0.0, 1.0});
    for (const Island& island : sc.islands)
        for (int nid : island.node_ids) {
            sc.nodes[nid].island_id = island.id;
            sc.nodes[nid].load_kw = load_pick(rng);
            sc.nodes[nid].weight = weight_pick(rng);
        }
    for (int j = 0; j < m; ++j) {
        std::uniform_int_distribution<int> node_pick(0, n - 1);
        sc.fleet.push_back(MerSpec{j + 1, node_pick(rng), cost_pick(rng), 1000.0});
    }
    validate_scenario(sc);
    return sc;
}

void criterion_4_oracle_vs_milp(const std::string& solver_cmd) {
    auto start = Clock::now();
    bool pass = true;
    std::ostringstream detail;
    constexpr int kScenarios = 20;
    int external_checked = 0;
    double worst_diff = 0.0;

    for (unsigned seed = 1; seed <= kScenarios; ++seed) {
        Scenario sc = random_guarded_scenario(seed);
        OracleResult oracle = best_itinerary(sc);
        RestorationModel rm = build_restoration(sc);

        SolveConfig exact;
        exact.backend = SolverBackend::ExactEnumeration;
        Solution sol = solve(rm, exact);
        double diff = std::abs(sol.objective_value - oracle.objective);
        worst_diff = std::max(worst_diff, diff);
        if (diff > 1e-6 || sol.status != SolveStatus::Optimal) {
            pass = false;
            detail << "seed " << seed << " exact-enumeration diff " << diff << "; ";
        }
        if (!validate_solution(sol, rm).valid) {
            pass = false;
            detail << "seed " << seed << " failed validation; ";
        }
        collect_legs(sol, rm);

        if (!solver_cmd.empty()) {
            SolveConfig external;
            external.backend = SolverBackend::External;
            external.solver_command = solver_cmd;
            Solution ext = solve(rm, external);
            double ext_diff = std::abs(ext.objective_value - oracle.objective);
            worst_diff = std::max(worst_diff, ext_diff);
            if (ext_diff > 1e-6) {
                pass = false;
                detail << "seed " << seed << " external diff " << ext_diff << "; ";
            }
            if (!validate_solution(ext, rm).valid) {
                pass = false;
                detail << "seed " << seed << " external solution failed validation; ";
            }
            // Indicator correctness at the optimum: restored exactly when
            // some MER parks in the island while its load is interrupted.
            for (std::size_t l = 0; l < sc.islands.size(); ++l)
                for (int t = 0; t <= sc.grid.num_spans; ++t) {
                    if (restoration_coefficient(sc, l, t) <= 0.0) continue;
                    double parked = 0.0;
                    for (std::size_t j = 0; j < sc.num_mers(); ++j)
                        for (int nid : sc.islands[l].node_ids)
                            parked += ext.value(rm.mer_vars(j).park[sc.node_index(nid)][t]);
                    bool restored = ext.value(rm.island_restored[l][t]) > 0.5;
                    if (restored != (parked > 0.5)) {
                        pass = false;
                        detail << "seed " << seed << " indicator mismatch at island " << l
                               << " span " << t << "; ";
                    }
                }
            collect_legs(ext, rm);
            ++external_checked;
        }
    }
    detail << kScenarios << " seeded scenarios, max |milp - oracle| = " << worst_diff << ", "
           << external_checked << " also solved externally";

    double elapsed = seconds_since(start);
    if (elapsed >= 600.0) pass = false;
    detail << "; " << elapsed << " s";
    report(4, "oracle-vs-MILP optimality", pass, detail.str());
}

void criterion_5_sizes() {
    bool pass = true;
    std::ostringstream detail;

    for (int n = 1; n <= 4 && pass; ++n)
        for (int m = 1; m <= 2 && pass; ++m)
            for (int d = 1; d <= 6 && pass; ++d) {
                SizeReport formula = size_proposed(n, m, d);
                SizeReport measured = measure_proposed(n, m, d);
                if (formula.binary_vars != measured.binary_vars ||
                    formula.continuous_vars != measured.continuous_vars ||
                    formula.constraints != measured.constraints) {
                    pass = false;
                    detail << "mismatch at N=" << n << " M=" << m << " D=" << d << "; ";
                }
            }
    detail << "48 grid points measured";

    SizeReport reference = size_proposed(37, 2, 36);
    if (reference.binary_vars != 5550 || reference.continuous_vars != 148 ||
        reference.constraints != 13766) {
        pass = false;
        detail << "; 37-node formula values wrong";
    } else {
        detail << "; 37-node values 5550/148/13766";
    }

    bool footnote_ok = true;
    for (auto [n, m, d] : {std::tuple<long long, long long, long long>{2, 1, 3},
                           {4, 2, 6},
                           {37, 2, 36}}) {
        SizeReport swbm = size_swbm(n, m, d, uniform_travel_matrix(n, 1));
        if (swbm.constraints != m * (d * (n * n - n) + 2 * d + 2)) footnote_ok = false;
    }
    if (!footnote_ok) pass = false;
    detail << "; unit-travel reduction " << (footnote_ok ? "verified at 3 points" : "FAILED");

    report(5, "size-formula exactness", pass, detail.str());
}

void criterion_6_feeder_regression(const std::string& solver_cmd) {
    bool pass = true;
    std::ostringstream detail;
    if (solver_cmd.empty()) {
        report(6, "37-node scenario regression", false, "no external MILP solver available");
        return;
    }
    const std::string path = std::string(MERROUTE_DATA_DIR) + "/feeder37.json";
    Scenario base = load_scenario(path);
    const double reference_targets[] = {7580.0, 6700.0, 6220.0};  // not gated
    std::vector<double> objectives;
    double worst_wall = 0.0;

    for (int span : {10, 20, 30}) {
        Scenario sc = span == base.grid.span_minutes ? base : rescale_time_grid(base, span);
        RestorationModel rm = build_restoration(sc);
        SolveConfig config;
        config.backend = SolverBackend::External;
        config.solver_command = solver_cmd;
        auto started = Clock::now();
        Solution sol = solve(rm, config);
        double wall = seconds_since(started);
        worst_wall = std::max(worst_wall, wall);
        if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::GapLimit) {
            pass = false;
            detail << "span " << span << " returned " << to_string(sol.status) << "; ";
            continue;
        }
        objectives.push_back(sol.objective_value);
        ValidationReport validation = validate_solution(sol, rm);
        if (!validation.valid) {
            pass = false;
            detail << "span " << span << " failed validation (" << validation.violations.front()
                   << "); ";
        }
        collect_legs(sol, rm);

        // No MER may be traveling once no unrepaired positive-load island can
        // still be occupied.
        for (std::size_t j = 0; j < sc.num_mers(); ++j) {
            AssignmentValues values = extract_assignment(rm.mobility[j], sol);
            for (int t = 0; t <= sc.grid.num_spans; ++t) {
                if (values.mers[0].travel_dest(t) < 0) continue;
                bool restorable_later = false;
                if (t + 1 <= sc.grid.num_spans) {
                    for (std::size_t l = 0; l < sc.islands.size(); ++l)
                        restorable_later = restorable_later ||
                                           restoration_coefficient(sc, l, t + 1) > 0.0;
                }
                if (!restorable_later) {
                    pass = false;
                    detail << "span " << span << ": MER " << sc.fleet[j].id
                           << " travels at span " << t << " with nothing left to restore; ";
                }
            }
        }
        if (wall >= 60.0) {
            pass = false;
            detail << "span " << span << " took " << wall << " s; ";
        }
    }
    if (objectives.size() == 3) {
        if (!(objectives[0] >= objectives[1] - 1e-9 && objectives[1] >= objectives[2] - 1e-9)) {
            pass = false;
            detail << "objectives not monotone; ";
        }
        detail << "objectives " << objectives[0] << " / " << objectives[1] << " / "
               << objectives[2] << " kWh (reference targets " << reference_targets[0] << " / "
               << reference_targets[1] << " / " << reference_targets[2]
               << ", not gated: feeder loads are documented assumptions)";
    }
    detail << "; max solve wall " << worst_wall << " s";
    report(6, "37-node scenario regression", pass, detail.str());
}

void criterion_7_no_useless_travel() {
    bool pass = true;
    std::ostringstream detail;
    std::size_t complete = 0, truncated = 0;
    for (const LegEvidence& leg : collected_legs) {
        if (leg.truncated) {
            ++truncated;
            continue;
        }
        ++complete;
        if (leg.duration != leg.matrix_spans) pass = false;
    }
    detail << complete << " complete legs all exact, " << truncated
           << " horizon-truncated legs (from criteria 4 and 6 solutions)";
    if (collected_legs.empty()) {
        pass = false;
        detail << "; no legs collected";
    }
    report(7, "no-useless-travel tightness", pass, detail.str());
}

}  // namespace

int main() {
    const std::string solver_cmd = external_solver_command();
    if (solver_cmd.empty())
        std::cout << "note: no external MILP solver found (set MER_SOLVER_CMD); criterion 6 will fail"
                  << std::endl;

    criterion_1_coefficients();
    criterion_2_table_replay();
    criterion_3_exactness();
    criterion_4_oracle_vs_milp(solver_cmd);
    criterion_5_sizes();
    criterion_6_feeder_regression(solver_cmd);
    criterion_7_no_useless_travel();

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <map>

#include "exactness_helpers.hpp"
#include "merroute/milp_io.hpp"
#include "merroute/restoration.hpp"
#include "merroute/solve.hpp"

using namespace merroute;

namespace {

/// The scipy-backed solver wrapper shipped under tools/, if usable here.
std::string external_solver_command() {
    static const std::string cmd = [] {
        if (const char* env = std::getenv("MER_SOLVER_CMD")) return std::string(env);
        std::string wrapper = std::string(MERROUTE_TOOLS_DIR) + "/scipy_milp_solve.py";
        std::string probe = "python3 -c 'import scipy.optimize' >/dev/null 2>&1";
        if (std::system(probe.c_str()) == 0)
            return "python3 " + wrapper + " {model} {solution} {gap} {timelimit}";
        return std::string();
    }();
    return cmd;
}

Scenario two_island_scenario() {
    Scenario sc;
    sc.grid = TimeGrid{10, 8};
    sc.nodes = {Node{0, 100, 100.0, 1.0}, Node{1, std::nullopt, 0.0, 1.0},
                Node{2, 200, 80.0, 1.0}};
    sc.distances.assign(3, std::vector<double>(3, 0.0));
    auto set = [&](int a, int b, int spans) {
        sc.distances[a][b] = sc.distances[b][a] = spans * 10000.0;
    };
    set(0, 1, 1);
    set(1, 2, 2);
    set(0, 2, 2);
    sc.islands = {Island{100, {0}, 3}, Island{200, {2}, 8}};
    sc.fleet = {MerSpec{1, 0, 0.1, 1000.0}};
    validate_scenario(sc);
    return sc;
}

}  // namespace

TEST_CASE("exact-enumeration backend rejects oversized models") {
    Scenario sc = two_island_scenario();
    sc.grid.num_spans = 15;
    sc.islands[0].repair_span = 3;
    validate_scenario(sc);
    RestorationModel rm = build_restoration(sc);
    SolveConfig config;
    config.backend = SolverBackend::ExactEnumeration;
    CHECK_THROWS_AS(solve(rm, config), SizeGuardError);
}

TEST_CASE("external backend requires a configured command") {
    Scenario sc = two_island_scenario();
    RestorationModel rm = build_restoration(sc);
    SolveConfig config;
    config.backend = SolverBackend::External;
    config.solver_command = "";
    if (std::getenv("MER_SOLVER_CMD") == nullptr)
        CHECK_THROWS_AS(solve(rm, config), SolverError);
}

TEST_CASE("external solver agrees with exact enumeration") {
    std::string cmd = external_solver_command();
    if (cmd.empty()) {
        WARN("no external MILP solver available; skipping");
        return;
    }
    Scenario sc = two_island_scenario();
    RestorationModel rm = build_restoration(sc);

    SolveConfig exact;
    exact.backend = SolverBackend::ExactEnumeration;
    Solution reference = solve(rm, exact);

    for (ModelFormat format : {ModelFormat::Mps}) {
        SolveConfig config;
        config.backend = SolverBackend::External;
        config.solver_command = cmd;
        config.format = format;
        Solution sol = solve(rm, config);
        REQUIRE((sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapLimit));
        CHECK(sol.objective_value == Catch::Approx(reference.objective_value).margin(1e-6));
        CHECK(validate_solution(sol, rm).valid);
        ObjectiveBreakdown breakdown = objective_breakdown(sol, rm);
        CHECK(breakdown.restored_kwh - breakdown.travel_cost_kwh ==
              Catch::Approx(sol.objective_value).margin(1e-6));
    }
}

TEST_CASE("an infeasible model reports infeasible through the external backend") {
    std::string cmd = external_solver_command();
    if (cmd.empty()) {
        WARN("no external MILP solver available; skipping");
        return;
    }
    MilpModel model;
    VarRef x = model.add_binary("pick");
    model.add_constraint("low", {{1.0, x}}, ConstraintSense::GreaterEqual, 0.75);
    model.add_constraint("high", {{1.0, x}}, ConstraintSense::LessEqual, 0.25);
    model.set_objective(ObjectiveSense::Maximize, {{1.0, x}});
    SolveConfig config;
    config.solver_command = cmd;
    Solution sol = solve_external(model, config);
    CHECK(sol.status == SolveStatus::Infeasible);
}

namespace {

/// Name-keyed view of a constraint; the reader may register variables in a
/// different index order than the writer, so positions are not comparable.
std::map<std::string, double> terms_by_name(const MilpModel& model, const LinConstraint& c) {
    std::map<std::string, double> out;
    for (const LinTerm& t : c.terms) out[model.var(t.var).name] = t.coeff;
    return out;
}

}  // namespace

TEST_CASE("emitted restoration models survive an emit/read round trip") {
    Scenario sc = two_island_scenario();
    RestorationModel rm = build_restoration(sc);
    auto dir = std::filesystem::temp_directory_path();
    for (ModelFormat format : {ModelFormat::Lp, ModelFormat::Mps}) {
        auto path = dir / (std::string("merroute_roundtrip.") + format_extension(format));
        emit_model(rm.model, format, path);
        MilpModel back = read_model(path);
        REQUIRE(back.num_vars() == rm.model.num_vars());
        REQUIRE(back.num_constraints() == rm.model.num_constraints());
        for (std::size_t i = 0; i < rm.model.num_vars(); ++i) {
            const VarInfo& original = rm.model.vars()[i];
            VarRef ref = back.find_var(original.name);
            REQUIRE(ref.valid());
            CHECK(back.var(ref).kind == original.kind);
            CHECK(back.var(ref).lower == original.lower);
            CHECK(back.var(ref).upper == original.upper);
        }
        for (std::size_t c = 0; c < back.num_constraints(); ++c) {
            const LinConstraint& ca = rm.model.constraints()[c];
            const LinConstraint& cb = back.constraints()[c];
            CAPTURE(ca.name);
            CHECK(ca.name == cb.name);
            CHECK(ca.sense == cb.sense);
            CHECK(ca.rhs == cb.rhs);
            CHECK(terms_by_name(rm.model, ca) == terms_by_name(back, cb));
        }
        CHECK(terms_by_name(rm.model, LinConstraint{"obj", rm.model.objective().terms,
                                                    ConstraintSense::Equal, 0.0}) ==
              terms_by_name(back, LinConstraint{"obj", back.objective().terms,
                                                ConstraintSense::Equal, 0.0}));
        std::filesystem::remove(path);
    }
}

TEST_CASE("solution csv written by the library reads back losslessly") {
    Scenario sc = two_island_scenario();
    RestorationModel rm = build_restoration(sc);
    SolveConfig exact;
    exact.backend = SolverBackend::ExactEnumeration;
    Solution sol = solve(rm, exact);
    auto path = std::filesystem::temp_directory_path() / "merroute_solution.csv";
    write_solution_csv(sol, rm.model, path);
    Solution back = read_solution_any(path, rm.model);
    REQUIRE(back.values.size() == sol.values.size());
    for (std::size_t i = 0; i < sol.values.size(); ++i) CHECK(back.values[i] == sol.values[i]);
    CHECK(back.objective_value == Catch::Approx(sol.objective_value));
    std::filesystem::remove(path);
}

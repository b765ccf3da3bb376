// Command-line front end: solve restoration scenarios, run the brute-force
// oracle, print model-size comparisons, inspect transition coefficients and
// validate solution files.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "merroute/milp_io.hpp"
#include "merroute/oracle.hpp"
#include "merroute/report.hpp"
#include "merroute/restoration.hpp"
#include "merroute/sizing.hpp"
#include "merroute/solve.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitSolverError = 2;
constexpr int kExitValidationError = 3;
constexpr int kExitSizeGuard = 4;

using namespace merroute;

Scenario load_with_span(const std::string& path, int span_override) {
    Scenario sc = load_scenario(path);
    if (span_override > 0 && span_override != sc.grid.span_minutes)
        sc = rescale_time_grid(sc, span_override);
    return sc;
}

struct SolveArgs {
    std::string scenario_path;
    int span_minutes = 0;
    double mip_gap = 1e-5;
    double time_limit_s = 0.0;
    std::string backend = "external";
    std::string solver_cmd;
    std::string format = "mps";
    std::string out_dir;
};

int cmd_solve(const SolveArgs& args) {
    Scenario sc;
    try {
        sc = load_with_span(args.scenario_path, args.span_minutes);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    RestorationModel rm = build_restoration(sc);
    SolveConfig config;
    config.mip_gap = args.mip_gap;
    config.time_limit_s = args.time_limit_s;
    config.backend = args.backend == "exact-enumeration" ? SolverBackend::ExactEnumeration
                                                         : SolverBackend::External;
    config.solver_command = args.solver_cmd;
    config.format = args.format == "lp" ? ModelFormat::Lp : ModelFormat::Mps;
    if (!args.out_dir.empty()) config.work_dir = std::filesystem::path(args.out_dir) / "solver";

    Solution sol;
    auto started = std::chrono::steady_clock::now();
    try {
        sol = solve(rm, config);
    } catch (const SizeGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeGuard;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverError;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::TimeLimit) {
        std::cerr << "solver finished without a usable solution: " << to_string(sol.status) << "\n";
        return kExitSolverError;
    }

    RunReport report = build_run_report(rm, sol, wall);
    write_report_txt(report, rm, std::cout);
    if (!args.out_dir.empty()) {
        std::filesystem::path dir(args.out_dir);
        std::filesystem::create_directories(dir);
        std::ofstream txt(dir / "report.txt");
        write_report_txt(report, rm, txt);
        write_solution_csv(sol, rm.model, dir / "solution.csv");
        write_itineraries_csv(report, rm, dir / "itineraries.csv");
        std::ofstream sizes(dir / "sizes.csv");
        sizes << size_csv_header() << "\n";
        SpanMatrix travel = travel_times_for(sc, sc.fleet.front());
        for (const SizeReport& r :
             size_all(static_cast<long long>(sc.num_nodes()), static_cast<long long>(sc.num_mers()),
                      sc.grid.num_spans, travel))
            sizes << to_csv_row(r) << "\n";
    }
    if (!report.validation.valid) {
        std::cerr << "post-solve validation failed\n";
        return kExitValidationError;
    }
    return kExitOk;
}

int cmd_oracle(const std::string& scenario_path, int span_minutes) {
    Scenario sc;
    try {
        sc = load_with_span(scenario_path, span_minutes);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    OracleResult best;
    try {
        best = best_itinerary(sc);
    } catch (const SizeGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeGuard;
    }
    std::cout << "objective: " << detail::fmt_double(best.objective) << " kWh\n";
    for (std::size_t j = 0; j < best.itinerary.size(); ++j) {
        const Itinerary& it = best.itinerary[j];
        std::cout << "mer " << sc.fleet[j].id << ":";
        if (it.legs.empty()) {
            std::cout << " stay at " << sc.nodes[sc.node_index(sc.fleet[j].initial_node)].id
                      << "\n";
            continue;
        }
        std::cout << "\n";
        for (const TravelLeg& leg : it.legs)
            std::cout << "  depart span " << leg.depart_span << ": " << sc.nodes[leg.origin].id
                      << " -> " << sc.nodes[leg.destination].id << " (arrive span "
                      << leg.arrive_span << ")\n";
    }
    return kExitOk;
}

int cmd_sizes(long long n, long long m, long long d, const std::string& scenario_path,
              const std::string& out_dir) {
    SpanMatrix travel;
    try {
        if (!scenario_path.empty()) {
            Scenario sc = load_scenario(scenario_path);
            n = static_cast<long long>(sc.num_nodes());
            m = static_cast<long long>(sc.num_mers());
            d = sc.grid.num_spans;
            travel = travel_times_for(sc, sc.fleet.front());
        } else {
            travel = uniform_travel_matrix(n);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    std::cout << size_csv_header() << "\n";
    for (const SizeReport& r : size_all(n, m, d, travel)) std::cout << to_csv_row(r) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "sizes.csv");
        out << size_csv_header() << "\n";
        for (const SizeReport& r : size_all(n, m, d, travel)) out << to_csv_row(r) << "\n";
    }
    return kExitOk;
}

void print_coefficients(const char* label, const TransitionCoefficients& c) {
    std::cout << label << ": [a1 b1 c1] = [" << detail::fmt_double(c.a1) << " "
              << detail::fmt_double(c.b1) << " " << detail::fmt_double(c.c1) << "], [a2 b2 c2] = ["
              << detail::fmt_double(c.a2) << " " << detail::fmt_double(c.b2) << " "
              << detail::fmt_double(c.c2) << "]\n";
    CoefficientCheck check = check_coefficients(c);
    std::cout << "  check: " << (check.ok ? "pass" : "FAIL") << "\n";
    for (const CoefficientMargin& m : coefficient_margins(c))
        std::cout << "    " << m.name << "  margin " << detail::fmt_double(m.margin) << "\n";
}

int cmd_coeffs() {
    print_coefficients("reference", TransitionCoefficients::reference());
    print_coefficients("derived", derive_transition_coefficients());
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path, const std::string& solution_path,
                 int span_minutes) {
    Scenario sc;
    try {
        sc = load_with_span(scenario_path, span_minutes);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    RestorationModel rm = build_restoration(sc);
    Solution sol;
    try {
        sol = read_solution_any(solution_path, rm.model);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::GapLimit) {
        std::cerr << "solution status is " << to_string(sol.status) << "; nothing to validate\n";
        return kExitInputError;
    }
    try {
        snap_binaries(sol, rm.model);
    } catch (const Error& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kExitValidationError;
    }
    ValidationReport report = validate_solution(sol, rm);
    for (const std::string& v : report.violations) std::cout << "violation: " << v << "\n";
    for (const std::string& w : report.warnings) std::cout << "warning: " << w << "\n";
    std::cout << (report.valid ? "valid" : "invalid") << "\n";
    return report.valid ? kExitOk : kExitValidationError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobile energy resource routing: build, solve and check restoration schedules"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Build and solve a restoration scenario");
    solve->add_option("scenario", solve_args.scenario_path, "Scenario JSON file")->required();
    solve->add_option("--span", solve_args.span_minutes, "Override the span length (minutes)");
    solve->add_option("--mip-gap", solve_args.mip_gap, "Relative MIP gap (default 1e-5)");
    solve->add_option("--time-limit", solve_args.time_limit_s, "Solver time limit (seconds)");
    solve->add_option("--backend", solve_args.backend, "external | exact-enumeration")
        ->check(CLI::IsMember({"external", "exact-enumeration"}));
    solve->add_option("--solver-cmd", solve_args.solver_cmd,
                      "External solver command (default: $MER_SOLVER_CMD)");
    solve->add_option("--format", solve_args.format, "Model file format: mps | lp")
        ->check(CLI::IsMember({"mps", "lp"}));
    solve->add_option("--out", solve_args.out_dir, "Directory for report/solution/itinerary files");

    std::string oracle_path;
    int oracle_span = 0;
    CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive best itinerary (small instances)");
    oracle->add_option("scenario", oracle_path, "Scenario JSON file")->required();
    oracle->add_option("--span", oracle_span, "Override the span length (minutes)");

    long long size_n = 1, size_m = 1, size_d = 1;
    std::string sizes_scenario, sizes_out;
    CLI::App* sizes = app.add_subcommand("sizes", "Model-size comparison of the four formulations");
    sizes->add_option("--nodes", size_n, "Number of parkable nodes");
    sizes->add_option("--mers", size_m, "Number of MERs");
    sizes->add_option("--spans", size_d, "Number of time spans");
    sizes->add_option("--scenario", sizes_scenario, "Take N, M, D and travel times from a scenario");
    sizes->add_option("--out", sizes_out, "Directory for sizes.csv");

    CLI::App* coeffs = app.add_subcommand("coeffs", "Print and check transition coefficients");

    std::string validate_scenario_path, validate_solution_path;
    int validate_span = 0;
    CLI::App* validate = app.add_subcommand("validate", "Check a solution file against a scenario");
    validate->add_option("scenario", validate_scenario_path, "Scenario JSON file")->required();
    validate->add_option("solution", validate_solution_path, "Solution file (.sol or solution.csv)")
        ->required();
    validate->add_option("--span", validate_span, "Override the span length (minutes)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (oracle->parsed()) return cmd_oracle(oracle_path, oracle_span);
        if (sizes->parsed()) return cmd_sizes(size_n, size_m, size_d, sizes_scenario, sizes_out);
        if (coeffs->parsed()) return cmd_coeffs();
        if (validate->parsed())
            return cmd_validate(validate_scenario_path, validate_solution_path, validate_span);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/milp.hpp"
#include "merroute/milp_io.hpp"
#include "merroute/oracle.hpp"
#include "merroute/restoration.hpp"

namespace merroute {

enum class SolverBackend { External, ExactEnumeration };

inline const char* to_string(SolverBackend b) {
    return b == SolverBackend::External ? "external" : "exact-enumeration";
}

struct SolveConfig {
    double mip_gap = 1e-5;  // relative MIP gap passed to the backend
    double time_limit_s = 0.0;  // 0 = no limit
    SolverBackend backend = SolverBackend::External;
    std::string solver_command;  // empty: use $MER_SOLVER_CMD
    std::filesystem::path work_dir;  // empty: temporary directory, removed after
    ModelFormat format = ModelFormat::Mps;
};

namespace detail {

inline std::string substitute_placeholder(std::string s, const std::string& key,
                                          const std::string& value) {
    std::string token = "{" + key + "}";
    std::size_t pos;
    while ((pos = s.find(token)) != std::string::npos) s.replace(pos, token.size(), value);
    return s;
}

/// Builds the external solver command line. The template may use {model},
/// {solution}, {gap} and {timelimit}; without placeholders those four are
/// appended as positional arguments.
inline std::string build_solver_command(const std::string& templ, const std::string& model_path,
                                        const std::string& solution_path, double gap,
                                        double time_limit) {
    std::string cmd = templ;
    if (cmd.find("{model}") != std::string::npos) {
        cmd = substitute_placeholder(cmd, "model", model_path);
        cmd = substitute_placeholder(cmd, "solution", solution_path);
        cmd = substitute_placeholder(cmd, "gap", fmt_double(gap));
        cmd = substitute_placeholder(cmd, "timelimit", fmt_double(time_limit));
    } else {
        cmd += " " + model_path + " " + solution_path + " " + fmt_double(gap) + " " +
               fmt_double(time_limit);
    }
    return cmd;
}

}  // namespace detail

/// Solves by emitting a model file, invoking the configured external solver
/// executable and parsing its solution file.
inline Solution solve_external(const MilpModel& model, const SolveConfig& config) {
    std::string templ = config.solver_command;
    if (templ.empty()) {
        const char* env = std::getenv("MER_SOLVER_CMD");
        if (env) templ = env;
    }
    if (templ.empty())
        throw SolverError(
            "external solver backend unavailable: set MER_SOLVER_CMD or pass --solver-cmd");

    namespace fs = std::filesystem;
    fs::path dir = config.work_dir;
    bool temporary = dir.empty();
    if (temporary) {
        dir = fs::temp_directory_path() /
              ("merroute-" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(dir);
    } else {
        fs::create_directories(dir);
    }
    fs::path model_path = dir / (std::string("model.") + format_extension(config.format));
    fs::path solution_path = dir / "model.sol";
    emit_model(model, config.format, model_path);
    std::error_code ec;
    fs::remove(solution_path, ec);

    std::string cmd = detail::build_solver_command(templ, model_path.string(),
                                                   solution_path.string(), config.mip_gap,
                                                   config.time_limit_s);
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
        if (temporary) fs::remove_all(dir, ec);
        throw SolverError("external solver failed with exit code " + std::to_string(rc) + ": " +
                          cmd);
    }
    Solution sol;
    try {
        sol = read_solution_file(solution_path, model);
    } catch (...) {
        if (temporary) fs::remove_all(dir, ec);
        throw;
    }
    if (temporary) fs::remove_all(dir, ec);
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapLimit)
        snap_binaries(sol, model);
    if (sol.status == SolveStatus::Optimal && sol.gap > config.mip_gap + 1e-12)
        sol.status = SolveStatus::GapLimit;
    return sol;
}

/// Exact solve of a restoration model by exhaustive itinerary enumeration.
/// Only restoration-builder models within the oracle size guard are accepted.
/// The winning itinerary's encoding is checked against every model constraint
/// and the model objective before it is returned, so the reported optimum is
/// a genuine feasible point of the MILP.
inline Solution solve_exact_enumeration(const RestorationModel& rm, const SolveConfig& config) {
    (void)config;
    check_oracle_size_guard(rm.scenario);
    OracleResult best = best_itinerary(rm.scenario);
    EncodedAssignment encoded = encode_itinerary(best.itinerary, rm.scenario);

    Solution sol;
    sol.status = SolveStatus::Optimal;
    sol.gap = 0.0;
    sol.values.assign(rm.model.num_vars(), 0.0);
    for (std::size_t j = 0; j < rm.mobility.size(); ++j) {
        AssignmentValues one{{encoded.mobility.mers[j]}};
        write_assignment_values(rm.mobility[j], one, sol.values);
    }
    for (std::size_t l = 0; l < rm.island_restored.size(); ++l)
        for (std::size_t t = 0; t < rm.island_restored[l].size(); ++t)
            sol.values[rm.island_restored[l][t].index] = encoded.island_restored[l][t];

    for (const LinConstraint& c : rm.model.constraints()) {
        if (constraint_violation(c, sol.values) > 1e-9)
            throw SolverError("exact-enumeration produced an infeasible point at constraint " +
                              c.name);
    }
    sol.objective_value = evaluate_objective(rm.model.objective(), sol.values);
    if (std::abs(sol.objective_value - best.objective) > 1e-7)
        throw SolverError("exact-enumeration objective mismatch: model says " +
                          std::to_string(sol.objective_value) + ", simulation says " +
                          std::to_string(best.objective));
    return sol;
}

inline Solution solve(const RestorationModel& rm, const SolveConfig& config) {
    if (config.backend == SolverBackend::ExactEnumeration)
        return solve_exact_enumeration(rm, config);
    return solve_external(rm.model, config);
}

}  // namespace merroute

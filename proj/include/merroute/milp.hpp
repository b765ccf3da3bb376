#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "merroute/errors.hpp"

namespace merroute {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tolerance within which a relaxed binary value is accepted as 0 or 1.
constexpr double kIntegralityTol = 1e-6;

enum class VarKind { Binary, Continuous };

/// Opaque handle into a MilpModel's variable registry.
struct VarRef {
    std::uint32_t index = UINT32_MAX;

    bool valid() const { return index != UINT32_MAX; }
    friend bool operator==(VarRef a, VarRef b) { return a.index == b.index; }
    friend auto operator<=>(VarRef a, VarRef b) { return a.index <=> b.index; }
};

struct VarInfo {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInfinity;
};

enum class ConstraintSense { LessEqual, GreaterEqual, Equal };

struct LinTerm {
    double coeff = 0.0;
    VarRef var;
};

struct LinConstraint {
    std::string name;
    std::vector<LinTerm> terms;  // merged per variable, sorted by var index
    ConstraintSense sense = ConstraintSense::LessEqual;
    double rhs = 0.0;
};

enum class ObjectiveSense { Minimize, Maximize };

struct Objective {
    ObjectiveSense sense = ObjectiveSense::Minimize;
    std::vector<LinTerm> terms;
};

/// In-memory MILP: variable registry, linear constraints, linear objective.
/// Variable and constraint counts are exact (one entry per add_* call).
class MilpModel {
  public:
    VarRef add_var(std::string name, VarKind kind, double lower, double upper) {
        if (name.empty()) throw ModelError("variable name must not be empty");
        if (by_name_.contains(name)) throw ModelError("duplicate variable name: " + name);
        if (kind == VarKind::Binary && (lower != 0.0 || upper != 1.0))
            throw ModelError("binary variable must have bounds [0,1]: " + name);
        if (!(lower <= upper)) throw ModelError("lower bound above upper bound: " + name);
        VarRef ref{static_cast<std::uint32_t>(vars_.size())};
        by_name_.emplace(name, ref.index);
        vars_.push_back(VarInfo{std::move(name), kind, lower, upper});
        if (kind == VarKind::Binary)
            ++num_binary_;
        else
            ++num_continuous_;
        return ref;
    }

    VarRef add_binary(std::string name) { return add_var(std::move(name), VarKind::Binary, 0.0, 1.0); }

    VarRef add_continuous(std::string name, double lower, double upper) {
        return add_var(std::move(name), VarKind::Continuous, lower, upper);
    }

    /// Adds a constraint; duplicate variables are merged and exact-zero
    /// coefficients dropped so that emitted files have one entry per column.
    void add_constraint(std::string name, std::vector<LinTerm> terms, ConstraintSense sense, double rhs) {
        if (!std::isfinite(rhs)) throw ModelError("constraint rhs must be finite: " + name);
        std::vector<LinTerm> merged = merge_terms(std::move(terms), name);
        if (merged.empty()) throw ModelError("constraint has no terms: " + name);
        constraints_.push_back(LinConstraint{std::move(name), std::move(merged), sense, rhs});
    }

    void set_objective(ObjectiveSense sense, std::vector<LinTerm> terms) {
        objective_.sense = sense;
        objective_.terms = merge_terms(std::move(terms), "objective");
    }

    const std::vector<VarInfo>& vars() const { return vars_; }
    const std::vector<LinConstraint>& constraints() const { return constraints_; }
    const Objective& objective() const { return objective_; }

    const VarInfo& var(VarRef ref) const {
        if (!ref.valid() || ref.index >= vars_.size()) throw ModelError("invalid variable reference");
        return vars_[ref.index];
    }

    VarRef find_var(const std::string& name) const {
        auto it = by_name_.find(name);
        return it == by_name_.end() ? VarRef{} : VarRef{it->second};
    }

    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_binary_vars() const { return num_binary_; }
    std::size_t num_continuous_vars() const { return num_continuous_; }
    std::size_t num_constraints() const { return constraints_.size(); }
    bool empty() const { return vars_.empty() && constraints_.empty(); }

  private:
    std::vector<LinTerm> merge_terms(std::vector<LinTerm> terms, const std::string& where) const {
        for (const LinTerm& t : terms) {
            if (!t.var.valid() || t.var.index >= vars_.size())
                throw ModelError("term references an unregistered variable in " + where);
            if (!std::isfinite(t.coeff)) throw ModelError("non-finite coefficient in " + where);
        }
        std::sort(terms.begin(), terms.end(),
                  [](const LinTerm& a, const LinTerm& b) { return a.var.index < b.var.index; });
        std::vector<LinTerm> merged;
        merged.reserve(terms.size());
        for (const LinTerm& t : terms) {
            if (!merged.empty() && merged.back().var == t.var)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(t);
        }
        std::erase_if(merged, [](const LinTerm& t) { return t.coeff == 0.0; });
        return merged;
    }

    std::vector<VarInfo> vars_;
    std::unordered_map<std::string, std::uint32_t> by_name_;
    std::vector<LinConstraint> constraints_;
    Objective objective_;
    std::size_t num_binary_ = 0;
    std::size_t num_continuous_ = 0;
};

enum class SolveStatus { Optimal, Infeasible, GapLimit, TimeLimit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::GapLimit: return "gap-limit";
        case SolveStatus::TimeLimit: return "time-limit";
    }
    return "unknown";
}

/// Immutable solver result; `values` is indexed by variable registry order.
struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective_value = 0.0;
    std::vector<double> values;
    double gap = 0.0;

    double value(VarRef ref) const {
        return ref.valid() && ref.index < values.size() ? values[ref.index] : 0.0;
    }
};

inline bool is_integral(double v, double tol = kIntegralityTol) {
    return std::abs(v - std::round(v)) <= tol;
}

/// Snaps relaxed binaries to exact {0,1}; throws if any lies off by > tol.
inline void snap_binaries(Solution& sol, const MilpModel& model, double tol = kIntegralityTol) {
    for (std::size_t i = 0; i < model.vars().size() && i < sol.values.size(); ++i) {
        if (model.vars()[i].kind != VarKind::Binary) continue;
        double v = sol.values[i];
        if (std::abs(v) <= tol)
            sol.values[i] = 0.0;
        else if (std::abs(v - 1.0) <= tol)
            sol.values[i] = 1.0;
        else
            throw SolverError("non-integral binary value for " + model.vars()[i].name + ": " +
                              std::to_string(v));
    }
}

/// Evaluates one constraint at a point; returns the signed violation
/// (positive = violated by that much, within no tolerance).
inline double constraint_violation(const LinConstraint& c, const std::vector<double>& values) {
    double lhs = 0.0;
    for (const LinTerm& t : c.terms) lhs += t.coeff * values[t.var.index];
    switch (c.sense) {
        case ConstraintSense::LessEqual: return lhs - c.rhs;
        case ConstraintSense::GreaterEqual: return c.rhs - lhs;
        case ConstraintSense::Equal: return std::abs(lhs - c.rhs);
    }
    return 0.0;
}

inline double evaluate_objective(const Objective& obj, const std::vector<double>& values) {
    double total = 0.0;
    for (const LinTerm& t : obj.terms) total += t.coeff * values[t.var.index];
    return total;
}

}  // namespace merroute

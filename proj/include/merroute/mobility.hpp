#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/itinerary.hpp"
#include "merroute/milp.hpp"
#include "merroute/scenario.hpp"

namespace merroute {

// ---------------------------------------------------------------------------
// Transition coefficients
//
// The parking-state transition window [x_t - D, x_t + U] is parameterized by
// six reals via D = a1*d1 + b1*d2 + c1 and U = a2*d1 + b2*d2 + c2, where d1
// is the per-node traveling-state change and d2 the total traveling-state
// change between consecutive spans. Feasible parameters are those meeting
// the interval requirements of every admissible transition class.
// ---------------------------------------------------------------------------

struct TransitionCoefficients {
    double a1 = 0.0, b1 = 0.0, c1 = 0.0;
    double a2 = 0.0, b2 = 0.0, c2 = 0.0;

    /// Reference solution of the feasibility system.
    static TransitionCoefficients reference() { return {-1.2, -0.4, 0.8, 1.0, -0.5, 0.7}; }

    double window_down(double d1, double d2) const { return a1 * d1 + b1 * d2 + c1; }
    double window_up(double d1, double d2) const { return a2 * d1 + b2 * d2 + c2; }
};

/// One inequality of the coefficient feasibility system, with its margin at a
/// given point (margin >= 0 means satisfied).
struct CoefficientMargin {
    std::string name;
    double margin = 0.0;
};

inline std::vector<CoefficientMargin> coefficient_margins(const TransitionCoefficients& c) {
    return {
        {"-b1+c1 >= 1.2", -c.b1 + c.c1 - 1.2},
        {"-a1-b1+c1 >= 0.2", -c.a1 - c.b1 + c.c1 - 0.2},
        {"-0.8 <= a1+b1+c1", c.a1 + c.b1 + c.c1 + 0.8},
        {"a1+b1+c1 <= -0.2", -0.2 - (c.a1 + c.b1 + c.c1)},
        {"b1+c1 >= 0.2", c.b1 + c.c1 - 0.2},
        {"0.2 <= c1", c.c1 - 0.2},
        {"c1 <= 0.8", 0.8 - c.c1},
        {"-b2+c2 >= 0.2", -c.b2 + c.c2 - 0.2},
        {"-a2-b2+c2 >= 0.2", -c.a2 - c.b2 + c.c2 - 0.2},
        {"a2+b2+c2 >= 1.2", c.a2 + c.b2 + c.c2 - 1.2},
        {"0.2 <= b2+c2", c.b2 + c.c2 - 0.2},
        {"b2+c2 <= 0.8", 0.8 - (c.b2 + c.c2)},
        {"0.2 <= c2", c.c2 - 0.2},
        {"c2 <= 0.8", 0.8 - c.c2},
    };
}

struct CoefficientCheck {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Evaluates the feasibility system with strict bounds treated as closed.
inline CoefficientCheck check_coefficients(const TransitionCoefficients& c, double tol = 1e-9) {
    CoefficientCheck result;
    for (const CoefficientMargin& m : coefficient_margins(c)) {
        if (m.margin < -tol) {
            result.ok = false;
            result.violations.push_back(m.name);
        }
    }
    return result;
}

namespace detail {

struct HalfSpace {  // g . x >= h over (a, b, c)
    std::array<double, 3> g;
    double h;
};

inline std::optional<std::array<double, 3>> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        if (std::abs(m[pivot][col]) < 1e-12) return std::nullopt;
        std::swap(m[col], m[pivot]);
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            double f = m[row][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
        }
    }
    return std::array<double, 3>{m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

/// Minimizes obj . x over a bounded polytope of >= half-spaces by enumerating
/// basic points (three variables, a handful of rows, so this is exact).
inline std::array<double, 3> solve_tiny_lp(const std::vector<HalfSpace>& rows,
                                           const std::array<double, 3>& obj) {
    std::optional<std::array<double, 3>> best;
    double best_value = 0.0;
    auto lex_less = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        for (int k = 0; k < 3; ++k) {
            if (a[k] < b[k] - 1e-12) return true;
            if (a[k] > b[k] + 1e-12) return false;
        }
        return false;
    };
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                std::array<std::array<double, 4>, 3> sys{};
                const HalfSpace* picked[3] = {&rows[i], &rows[j], &rows[k]};
                for (int r = 0; r < 3; ++r) {
                    sys[r] = {picked[r]->g[0], picked[r]->g[1], picked[r]->g[2], picked[r]->h};
                }
                auto pt = solve3(sys);
                if (!pt) continue;
                bool feasible = true;
                for (const HalfSpace& row : rows) {
                    double lhs = row.g[0] * (*pt)[0] + row.g[1] * (*pt)[1] + row.g[2] * (*pt)[2];
                    if (lhs < row.h - 1e-9) {
                        feasible = false;
                        break;
                    }
                }
                if (!feasible) continue;
                double value = obj[0] * (*pt)[0] + obj[1] * (*pt)[1] + obj[2] * (*pt)[2];
                if (!best || value < best_value - 1e-12 ||
                    (value < best_value + 1e-12 && lex_less(*pt, *best))) {
                    best = pt;
                    best_value = value;
                }
            }
    if (!best) throw ModelError("coefficient LP is infeasible");
    return *best;
}

}  // namespace detail

/// Optional linear objectives (coefficients over a, b, c) for the two
/// coefficient LPs; defaults to minimizing a+b+c on both, the published choice.
struct CoefficientObjective {
    std::array<double, 3> down = {1.0, 1.0, 1.0};
    std::array<double, 3> up = {1.0, 1.0, 1.0};
};

/// Solves the two three-variable LPs over the closed feasibility system.
/// Any optimum works; ties break to the lexicographically smallest vertex
/// so the result is deterministic.
inline TransitionCoefficients derive_transition_coefficients(
    const CoefficientObjective& objective = {}) {
    using detail::HalfSpace;
    const std::vector<HalfSpace> down_rows = {
        {{0, -1, 1}, 1.2},   // -b1 + c1 >= 1.2
        {{-1, -1, 1}, 0.2},  // -a1 - b1 + c1 >= 0.2
        {{1, 1, 1}, -0.8},   // a1 + b1 + c1 >= -0.8
        {{-1, -1, -1}, 0.2}, // a1 + b1 + c1 <= -0.2
        {{0, 1, 1}, 0.2},    // b1 + c1 >= 0.2
        {{0, 0, 1}, 0.2},    // c1 >= 0.2
        {{0, 0, -1}, -0.8},  // c1 <= 0.8
    };
    const std::vector<HalfSpace> up_rows = {
        {{0, -1, 1}, 0.2},   // -b2 + c2 >= 0.2
        {{-1, -1, 1}, 0.2},  // -a2 - b2 + c2 >= 0.2
        {{1, 1, 1}, 1.2},    // a2 + b2 + c2 >= 1.2
        {{0, 1, 1}, 0.2},    // b2 + c2 >= 0.2
        {{0, -1, -1}, -0.8}, // b2 + c2 <= 0.8
        {{0, 0, 1}, 0.2},    // c2 >= 0.2
        {{0, 0, -1}, -0.8},  // c2 <= 0.8
    };
    auto down = detail::solve_tiny_lp(down_rows, objective.down);
    auto up = detail::solve_tiny_lp(up_rows, objective.up);
    TransitionCoefficients c{down[0], down[1], down[2], up[0], up[1], up[2]};
    CoefficientCheck check = check_coefficients(c);
    if (!check.ok) throw ModelError("derived coefficients fail the feasibility check");
    return c;
}

// ---------------------------------------------------------------------------
// Mobility constraint block
// ---------------------------------------------------------------------------

/// Variable handles for one MER: park/travel labels per (node, span), plus
/// the injected travel time (S), residual travel time (R) and direction lock
/// (w) per span.
struct MerVarBlock {
    std::vector<std::vector<VarRef>> park;    // [node][t]
    std::vector<std::vector<VarRef>> travel;  // [node][t]
    std::vector<VarRef> injected;             // [t]
    std::vector<VarRef> residual;             // [t]
    std::vector<VarRef> lock;                 // [t]
};

struct MobilityBlock {
    std::vector<MerVarBlock> mers;  // fleet order
    double big_m = 0.0;
    double epsilon = 1.0;
    std::size_t binaries_added = 0;
    std::size_t continuous_added = 0;
    std::size_t constraints_added = 0;
    std::vector<int> node_ids;          // naming only
    std::vector<int> initial_node_idx;  // per mer
};

namespace detail {

inline void check_travel_matrix(const SpanMatrix& t) {
    const std::size_t n = t.size();
    if (n == 0) throw ValidationError("travel-time matrix: empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (t[i].size() != n) throw ValidationError("travel-time matrix: not square");
        if (t[i][i] != 0) throw ValidationError("travel-time matrix: nonzero diagonal");
        for (std::size_t k = 0; k < n; ++k)
            if (i != k && t[i][k] < 1)
                throw ValidationError("travel-time matrix: off-diagonal entries must be >= 1");
    }
}

inline std::string span_tag(int j, int t) { return "j" + std::to_string(j) + "_t" + std::to_string(t); }

inline std::string node_tag(int j, int i, int t) {
    return "j" + std::to_string(j) + "_i" + std::to_string(i) + "_t" + std::to_string(t);
}

}  // namespace detail

/// Registers the full mobility constraint set for `fleet` over a shared
/// travel-time matrix: one-state rows, transition windows, travel-time
/// injection bounds, residual balance, travel linking, direction lock and
/// initial conditions. Counts per fleet of size M over N nodes and D spans:
/// M(D+1)(2N+1) binaries, 2M(D+1) continuous, MD(5N+6)+7M constraints.
inline MobilityBlock build_mobility_block(const std::vector<MerSpec>& fleet,
                                          const SpanMatrix& travel_spans, const TimeGrid& grid,
                                          const TransitionCoefficients& coeffs, MilpModel& model,
                                          std::vector<int> node_ids = {}) {
    detail::check_travel_matrix(travel_spans);
    const int n = static_cast<int>(travel_spans.size());
    const int d = grid.num_spans;
    if (fleet.empty()) throw ValidationError("fleet: empty");
    if (!node_ids.empty() && node_ids.size() != static_cast<std::size_t>(n))
        throw ValidationError("node ids do not match the travel-time matrix dimension");
    if (node_ids.empty()) {
        node_ids.resize(n);
        for (int i = 0; i < n; ++i) node_ids[i] = i;
    }
    CoefficientCheck check = check_coefficients(coeffs);
    if (!check.ok) throw ValidationError("transition coefficients fail the feasibility check");

    MobilityBlock block;
    block.node_ids = node_ids;
    block.big_m = max_travel_time(travel_spans) + 1.0;
    block.epsilon = 1.0;

    const std::size_t vars_before = model.num_vars();
    const std::size_t bin_before = model.num_binary_vars();
    const std::size_t cont_before = model.num_continuous_vars();
    const std::size_t cons_before = model.num_constraints();

    for (const MerSpec& mer : fleet) {
        int init_idx = -1;
        for (int i = 0; i < n; ++i)
            if (node_ids[i] == mer.initial_node) init_idx = i;
        if (init_idx < 0)
            throw ValidationError("fleet: initial node " + std::to_string(mer.initial_node) +
                                  " not present in the node set");
        block.initial_node_idx.push_back(init_idx);

        MerVarBlock vars;
        vars.park.assign(n, std::vector<VarRef>(d + 1));
        vars.travel.assign(n, std::vector<VarRef>(d + 1));
        vars.injected.resize(d + 1);
        vars.residual.resize(d + 1);
        vars.lock.resize(d + 1);
        for (int t = 0; t <= d; ++t) {
            for (int i = 0; i < n; ++i)
                vars.park[i][t] = model.add_binary("x_" + detail::node_tag(mer.id, node_ids[i], t));
            for (int i = 0; i < n; ++i)
                vars.travel[i][t] = model.add_binary("v_" + detail::node_tag(mer.id, node_ids[i], t));
            vars.lock[t] = model.add_binary("w_" + detail::span_tag(mer.id, t));
            vars.injected[t] = model.add_continuous("S_" + detail::span_tag(mer.id, t), 0.0, kInfinity);
            vars.residual[t] = model.add_continuous("R_" + detail::span_tag(mer.id, t), 0.0, kInfinity);
        }

        // Exactly one park or travel label per span.
        for (int t = 0; t <= d; ++t) {
            std::vector<LinTerm> terms;
            for (int i = 0; i < n; ++i) {
                terms.push_back({1.0, vars.park[i][t]});
                terms.push_back({1.0, vars.travel[i][t]});
            }
            model.add_constraint("state_" + detail::span_tag(mer.id, t), std::move(terms),
                                 ConstraintSense::Equal, 1.0);
        }

        // Transition window per (span, node):
        //   x[i][t+1] >= x[i][t] - (a1*d1 + b1*d2 + c1)   (lower)
        //   x[i][t+1] <= x[i][t] + (a2*d1 + b2*d2 + c2)   (upper)
        // with d1 = v[i][t] - v[i][t+1], d2 = sum_k v[k][t] - sum_k v[k][t+1].
        for (int t = 0; t < d; ++t) {
            for (int i = 0; i < n; ++i) {
                std::vector<LinTerm> lo{{1.0, vars.park[i][t + 1]}, {-1.0, vars.park[i][t]},
                                        {coeffs.a1, vars.travel[i][t]}, {-coeffs.a1, vars.travel[i][t + 1]}};
                std::vector<LinTerm> up{{1.0, vars.park[i][t + 1]}, {-1.0, vars.park[i][t]},
                                        {-coeffs.a2, vars.travel[i][t]}, {coeffs.a2, vars.travel[i][t + 1]}};
                for (int k = 0; k < n; ++k) {
                    lo.push_back({coeffs.b1, vars.travel[k][t]});
                    lo.push_back({-coeffs.b1, vars.travel[k][t + 1]});
                    up.push_back({-coeffs.b2, vars.travel[k][t]});
                    up.push_back({coeffs.b2, vars.travel[k][t + 1]});
                }
                model.add_constraint("trans_lo_" + detail::node_tag(mer.id, node_ids[i], t),
                                     std::move(lo), ConstraintSense::GreaterEqual, -coeffs.c1);
                model.add_constraint("trans_up_" + detail::node_tag(mer.id, node_ids[i], t),
                                     std::move(up), ConstraintSense::LessEqual, coeffs.c2);
            }
        }

        // Travel-time injection: S[t] >= row bound per candidate origin, and
        // S[t] >= 0. The bound is rowsum_i * x[i][t-1] + sum_k T[i][k]*v[k][t]
        // - rowsum_i, which reaches T[i][dest] exactly when a leg starts.
        for (int t = 1; t <= d; ++t) {
            for (int i = 0; i < n; ++i) {
                double rowsum = 0.0;
                for (int k = 0; k < n; ++k) rowsum += travel_spans[i][k];
                std::vector<LinTerm> terms{{1.0, vars.injected[t]}, {-rowsum, vars.park[i][t - 1]}};
                for (int k = 0; k < n; ++k)
                    terms.push_back({-static_cast<double>(travel_spans[i][k]), vars.travel[k][t]});
                model.add_constraint("inject_" + detail::node_tag(mer.id, node_ids[i], t),
                                     std::move(terms), ConstraintSense::GreaterEqual, -rowsum);
            }
            model.add_constraint("inject_floor_" + detail::span_tag(mer.id, t),
                                 {{1.0, vars.injected[t]}}, ConstraintSense::GreaterEqual, 0.0);
        }

        // Residual balance: R[t] = R[t-1] + S[t] - sum_i v[i][t-1].
        for (int t = 1; t <= d; ++t) {
            std::vector<LinTerm> terms{{1.0, vars.residual[t]}, {-1.0, vars.residual[t - 1]},
                                       {-1.0, vars.injected[t]}};
            for (int i = 0; i < n; ++i) terms.push_back({1.0, vars.travel[i][t - 1]});
            model.add_constraint("fuel_" + detail::span_tag(mer.id, t), std::move(terms),
                                 ConstraintSense::Equal, 0.0);
        }

        // Keep traveling while residual time remains: R/M <= sum_i v <= R.
        for (int t = 0; t <= d; ++t) {
            std::vector<LinTerm> lo{{-1.0 / block.big_m, vars.residual[t]}};
            std::vector<LinTerm> up{{-1.0, vars.residual[t]}};
            for (int i = 0; i < n; ++i) {
                lo.push_back({1.0, vars.travel[i][t]});
                up.push_back({1.0, vars.travel[i][t]});
            }
            model.add_constraint("travel_lo_" + detail::span_tag(mer.id, t), std::move(lo),
                                 ConstraintSense::GreaterEqual, 0.0);
            model.add_constraint("travel_up_" + detail::span_tag(mer.id, t), std::move(up),
                                 ConstraintSense::LessEqual, 0.0);
        }

        // Direction lock: w[t] = 1 on consecutive traveling spans, freezing
        // the destination label.
        for (int t = 1; t <= d; ++t) {
            std::vector<LinTerm> lock_terms{{1.0, vars.lock[t]}};
            for (int i = 0; i < n; ++i) {
                lock_terms.push_back({-1.0, vars.travel[i][t - 1]});
                lock_terms.push_back({-1.0, vars.travel[i][t]});
            }
            model.add_constraint("lock_" + detail::span_tag(mer.id, t), std::move(lock_terms),
                                 ConstraintSense::GreaterEqual, block.epsilon - 2.0);
            for (int i = 0; i < n; ++i) {
                model.add_constraint("dir_up_" + detail::node_tag(mer.id, node_ids[i], t),
                                     {{1.0, vars.travel[i][t]}, {-1.0, vars.travel[i][t - 1]},
                                      {1.0, vars.lock[t]}},
                                     ConstraintSense::LessEqual, 1.0);
                model.add_constraint("dir_lo_" + detail::node_tag(mer.id, node_ids[i], t),
                                     {{1.0, vars.travel[i][t]}, {-1.0, vars.travel[i][t - 1]},
                                      {-1.0, vars.lock[t]}},
                                     ConstraintSense::GreaterEqual, -1.0);
            }
        }

        // Initial conditions.
        model.add_constraint("init_x_j" + std::to_string(mer.id),
                             {{1.0, vars.park[init_idx][0]}}, ConstraintSense::Equal, 1.0);
        model.add_constraint("init_S_j" + std::to_string(mer.id), {{1.0, vars.injected[0]}},
                             ConstraintSense::Equal, 0.0);
        model.add_constraint("init_R_j" + std::to_string(mer.id), {{1.0, vars.residual[0]}},
                             ConstraintSense::Equal, 0.0);
        model.add_constraint("init_w_j" + std::to_string(mer.id), {{1.0, vars.lock[0]}},
                             ConstraintSense::Equal, 0.0);

        block.mers.push_back(std::move(vars));
    }

    block.binaries_added = model.num_binary_vars() - bin_before;
    block.continuous_added = model.num_continuous_vars() - cont_before;
    block.constraints_added = model.num_constraints() - cons_before;
    (void)vars_before;
    return block;
}

// ---------------------------------------------------------------------------
// Assignments: integral points of the mobility block
// ---------------------------------------------------------------------------

/// Values for one MER's mobility variables. Labels are 0/1; injected and
/// residual are the continuous travel-time bookkeeping values.
struct MerAssignment {
    std::vector<std::vector<std::uint8_t>> park;    // [node][t]
    std::vector<std::vector<std::uint8_t>> travel;  // [node][t]
    std::vector<double> injected;                   // [t]
    std::vector<double> residual;                   // [t]
    std::vector<std::uint8_t> lock;                 // [t]

    int num_nodes() const { return static_cast<int>(park.size()); }
    int num_points() const { return park.empty() ? 0 : static_cast<int>(park[0].size()); }

    /// Node index parked at during t, or -1.
    int parked_node(int t) const {
        for (int i = 0; i < num_nodes(); ++i)
            if (park[i][t]) return i;
        return -1;
    }

    /// Destination index traveled toward during t, or -1.
    int travel_dest(int t) const {
        for (int i = 0; i < num_nodes(); ++i)
            if (travel[i][t]) return i;
        return -1;
    }
};

struct AssignmentValues {
    std::vector<MerAssignment> mers;
};

inline MerAssignment make_blank_assignment(int num_nodes, int num_spans) {
    MerAssignment a;
    a.park.assign(num_nodes, std::vector<std::uint8_t>(num_spans + 1, 0));
    a.travel.assign(num_nodes, std::vector<std::uint8_t>(num_spans + 1, 0));
    a.injected.assign(num_spans + 1, 0.0);
    a.residual.assign(num_spans + 1, 0.0);
    a.lock.assign(num_spans + 1, 0);
    return a;
}

/// Injected travel time at span t by the exact max-row-sum rule: the maximum
/// of 0 and rowsum_i*x[i][t-1] + sum_k T[i][k]*v[k][t] - rowsum_i over i.
inline double exact_injected_time(const MerAssignment& a, const SpanMatrix& travel_spans, int t) {
    const int n = a.num_nodes();
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int k = 0; k < n; ++k) rowsum += travel_spans[i][k];
        double bound = a.park[i][t - 1] ? rowsum : 0.0;
        for (int k = 0; k < n; ++k)
            if (a.travel[k][t]) bound += travel_spans[i][k];
        bound -= rowsum;
        best = std::max(best, bound);
    }
    return best;
}

/// Rewrites injected/residual with the exact values implied by the labels.
inline void recompute_fuel(MerAssignment& a, const SpanMatrix& travel_spans) {
    const int points = a.num_points();
    a.injected.assign(points, 0.0);
    a.residual.assign(points, 0.0);
    for (int t = 1; t < points; ++t) {
        a.injected[t] = exact_injected_time(a, travel_spans, t);
        double traveled = a.travel_dest(t - 1) >= 0 ? 1.0 : 0.0;
        a.residual[t] = a.residual[t - 1] + a.injected[t] - traveled;
    }
}

/// Lock values implied by the labels: 1 exactly on spans traveling at both
/// t-1 and t.
inline std::vector<std::uint8_t> canonical_lock(const MerAssignment& a) {
    const int points = a.num_points();
    std::vector<std::uint8_t> lock(points, 0);
    for (int t = 1; t < points; ++t)
        lock[t] = (a.travel_dest(t - 1) >= 0 && a.travel_dest(t) >= 0) ? 1 : 0;
    return lock;
}

/// Decodes park/travel labels into parking intervals and travel legs. Throws
/// on spans without exactly one label or a traveling label at span 0.
inline Itinerary decode_mer_labels(const MerAssignment& a) {
    const int points = a.num_points();
    Itinerary it;
    int current_park = -1;
    int park_start = 0;
    int leg_dest = -1;
    int leg_start = 0;
    int leg_origin = -1;
    for (int t = 0; t < points; ++t) {
        int labels = 0;
        for (int i = 0; i < a.num_nodes(); ++i) labels += a.park[i][t] + a.travel[i][t];
        if (labels != 1)
            throw ModelError("span " + std::to_string(t) + ": expected exactly one state label, got " +
                             std::to_string(labels));
        int p = a.parked_node(t);
        int dest = a.travel_dest(t);
        if (t == 0 && p < 0) throw ModelError("span 0: MER must start parked");
        if (p >= 0) {
            if (leg_dest >= 0) {  // leg ended at t-1
                it.legs.push_back(TravelLeg{leg_origin, leg_dest, leg_start, t - 1});
                leg_dest = -1;
            }
            if (current_park != p) {
                if (current_park >= 0)
                    it.parks.push_back(ParkInterval{current_park, park_start, t - 1});
                current_park = p;
                park_start = t;
            }
        } else {
            if (current_park >= 0) {
                it.parks.push_back(ParkInterval{current_park, park_start, t - 1});
                leg_origin = current_park;
                current_park = -1;
                leg_dest = dest;
                leg_start = t;
            } else if (dest != leg_dest) {  // destination switched mid-travel
                it.legs.push_back(TravelLeg{leg_origin, leg_dest, leg_start, t - 1});
                leg_origin = leg_dest;
                leg_dest = dest;
                leg_start = t;
            }
        }
    }
    if (current_park >= 0) it.parks.push_back(ParkInterval{current_park, park_start, points - 1});
    if (leg_dest >= 0) it.legs.push_back(TravelLeg{leg_origin, leg_dest, leg_start, points - 1});
    return it;
}

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    void fail(std::string what) {
        valid = false;
        violations.push_back(std::move(what));
    }
};

/// Validates one MER's assignment against the mobility rules: one-state rows,
/// transition windows, residual bookkeeping recomputed exactly, travel
/// linking, direction lock, initial conditions and exact leg durations.
/// Horizon-truncated final legs are legal and reported as warnings.
inline ValidationReport validate_mer_assignment(const MerAssignment& given,
                                                const SpanMatrix& travel_spans, const TimeGrid& grid,
                                                const TransitionCoefficients& coeffs =
                                                    TransitionCoefficients::reference(),
                                                int initial_node_index = -1) {
    constexpr double tol = 1e-9;
    ValidationReport report;
    const int n = static_cast<int>(travel_spans.size());
    const int d = grid.num_spans;
    if (given.num_nodes() != n || given.num_points() != d + 1) {
        report.fail("assignment dimensions do not match the travel-time matrix and grid");
        return report;
    }

    for (int t = 0; t <= d; ++t) {
        int labels = 0;
        for (int i = 0; i < n; ++i) {
            if (given.park[i][t] > 1 || given.travel[i][t] > 1) report.fail("non-binary label");
            labels += given.park[i][t] + given.travel[i][t];
        }
        if (labels != 1)
            report.fail("state_t" + std::to_string(t) + ": " + std::to_string(labels) +
                        " labels set, expected 1");
    }
    if (!report.valid) return report;

    // Transition windows.
    for (int t = 0; t < d; ++t) {
        double total_t = given.travel_dest(t) >= 0 ? 1.0 : 0.0;
        double total_t1 = given.travel_dest(t + 1) >= 0 ? 1.0 : 0.0;
        double d2 = total_t - total_t1;
        for (int i = 0; i < n; ++i) {
            double d1 = static_cast<double>(given.travel[i][t]) - given.travel[i][t + 1];
            double down = coeffs.window_down(d1, d2);
            double up = coeffs.window_up(d1, d2);
            double x_now = given.park[i][t];
            double x_next = given.park[i][t + 1];
            if (x_next < x_now - down - tol)
                report.fail("trans_lo_t" + std::to_string(t) + "_i" + std::to_string(i));
            if (x_next > x_now + up + tol)
                report.fail("trans_up_t" + std::to_string(t) + "_i" + std::to_string(i));
        }
    }

    // Residual bookkeeping, recomputed exactly from the labels.
    MerAssignment canon = given;
    recompute_fuel(canon, travel_spans);
    const double big_m = max_travel_time(travel_spans) + 1.0;
    for (int t = 0; t <= d; ++t) {
        double traveling = canon.travel_dest(t) >= 0 ? 1.0 : 0.0;
        if (canon.residual[t] < -tol)
            report.fail("fuel_t" + std::to_string(t) + ": residual below zero");
        if (canon.residual[t] / big_m > traveling + tol)
            report.fail("travel_lo_t" + std::to_string(t) + ": residual left but not traveling");
        if (traveling > canon.residual[t] + tol)
            report.fail("travel_up_t" + std::to_string(t) + ": traveling without residual time");
    }

    // Direction lock on the given lock values.
    if (!given.lock.empty()) {
        if (given.lock[0] != 0) report.fail("init_w: lock must be 0 at span 0");
        for (int t = 1; t <= d; ++t) {
            double sum_prev = given.travel_dest(t - 1) >= 0 ? 1.0 : 0.0;
            double sum_now = given.travel_dest(t) >= 0 ? 1.0 : 0.0;
            if (given.lock[t] < sum_prev + sum_now - 2.0 + 1.0 - tol)
                report.fail("lock_t" + std::to_string(t));
            for (int i = 0; i < n; ++i) {
                double delta = static_cast<double>(given.travel[i][t]) - given.travel[i][t - 1];
                if (std::abs(delta) > 1.0 - given.lock[t] + tol)
                    report.fail("dir_t" + std::to_string(t) + "_i" + std::to_string(i));
            }
        }
    }

    // Initial conditions.
    if (initial_node_index >= 0 && !given.park[initial_node_index][0])
        report.fail("init_x: not parked at the initial node at span 0");
    if (!given.injected.empty() && std::abs(given.injected[0]) > tol)
        report.fail("init_S: injected time must be 0 at span 0");
    if (!given.residual.empty() && std::abs(given.residual[0]) > tol)
        report.fail("init_R: residual time must be 0 at span 0");

    // Leg durations must match the travel-time matrix exactly; a final leg
    // cut off by the horizon is legal but worth flagging.
    if (report.valid) {
        Itinerary it = decode_mer_labels(given);
        for (const TravelLeg& leg : it.legs) {
            int full = travel_spans[leg.origin][leg.destination];
            if (leg.arrive_span == d && leg.duration() < full) {
                report.warnings.push_back("leg " + std::to_string(leg.origin) + "->" +
                                          std::to_string(leg.destination) + " departing at span " +
                                          std::to_string(leg.depart_span) +
                                          " is truncated by the horizon");
            } else if (leg.duration() != full) {
                report.fail("leg " + std::to_string(leg.origin) + "->" +
                            std::to_string(leg.destination) + " departing at span " +
                            std::to_string(leg.depart_span) + " lasts " +
                            std::to_string(leg.duration()) + " spans, expected " +
                            std::to_string(full));
            }
        }
    }
    return report;
}

/// Fleet-level validation with a shared travel-time matrix.
inline ValidationReport validate_assignment(const AssignmentValues& values,
                                            const SpanMatrix& travel_spans, const TimeGrid& grid,
                                            const TransitionCoefficients& coeffs =
                                                TransitionCoefficients::reference(),
                                            const std::vector<int>& initial_node_index = {}) {
    ValidationReport merged;
    for (std::size_t j = 0; j < values.mers.size(); ++j) {
        int init = j < initial_node_index.size() ? initial_node_index[j] : -1;
        ValidationReport r =
            validate_mer_assignment(values.mers[j], travel_spans, grid, coeffs, init);
        for (std::string& s : r.violations) merged.fail("mer " + std::to_string(j) + ": " + s);
        for (std::string& s : r.warnings)
            merged.warnings.push_back("mer " + std::to_string(j) + ": " + s);
    }
    return merged;
}

/// Copies an assignment into a model-sized value vector via the block handles.
inline void write_assignment_values(const MobilityBlock& block, const AssignmentValues& values,
                                    std::vector<double>& out) {
    for (std::size_t j = 0; j < block.mers.size(); ++j) {
        const MerVarBlock& vars = block.mers[j];
        const MerAssignment& a = values.mers[j];
        const int n = a.num_nodes();
        const int points = a.num_points();
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < points; ++t) {
                out[vars.park[i][t].index] = a.park[i][t];
                out[vars.travel[i][t].index] = a.travel[i][t];
            }
        for (int t = 0; t < points; ++t) {
            out[vars.injected[t].index] = a.injected[t];
            out[vars.residual[t].index] = a.residual[t];
            out[vars.lock[t].index] = a.lock[t];
        }
    }
}

/// Reads a solution back into per-MER assignments via the block handles,
/// snapping binaries within the integrality tolerance.
inline AssignmentValues extract_assignment(const MobilityBlock& block, const Solution& sol) {
    AssignmentValues values;
    for (const MerVarBlock& vars : block.mers) {
        const int n = static_cast<int>(vars.park.size());
        const int points = static_cast<int>(vars.injected.size());
        MerAssignment a = make_blank_assignment(n, points - 1);
        auto snap = [](double v, const char* what) {
            if (std::abs(v) <= kIntegralityTol) return std::uint8_t{0};
            if (std::abs(v - 1.0) <= kIntegralityTol) return std::uint8_t{1};
            throw SolverError(std::string("non-integral ") + what + " label: " + std::to_string(v));
        };
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < points; ++t) {
                a.park[i][t] = snap(sol.value(vars.park[i][t]), "park");
                a.travel[i][t] = snap(sol.value(vars.travel[i][t]), "travel");
            }
        for (int t = 0; t < points; ++t) {
            a.injected[t] = sol.value(vars.injected[t]);
            a.residual[t] = sol.value(vars.residual[t]);
            a.lock[t] = snap(sol.value(vars.lock[t]), "lock");
        }
        values.mers.push_back(std::move(a));
    }
    return values;
}

}  // namespace merroute

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "exactness_helpers.hpp"
#include "merroute/milp_io.hpp"
#include "merroute/mobility.hpp"

using namespace merroute;

namespace {

struct ReplayFixture {
    MilpModel model;
    MobilityBlock block;
    SpanMatrix travel{{0, 3}, {3, 0}};
    TimeGrid grid{10, 6};

    ReplayFixture() {
        std::vector<MerSpec> fleet{{1, 0, 0.3, 1000.0}};
        block = build_mobility_block(fleet, travel, grid, TransitionCoefficients::reference(), model);
    }

    /// Point with a single leg 0 -> 1 occupying travel spans [first, last].
    std::vector<double> point_for_leg(int first, int last) {
        MerAssignment a = make_blank_assignment(2, grid.num_spans);
        for (int t = 0; t < first; ++t) a.park[0][t] = 1;
        for (int t = first; t <= last; ++t) a.travel[1][t] = 1;
        for (int t = last + 1; t <= grid.num_spans; ++t) a.park[1][t] = 1;
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        std::vector<double> values(model.num_vars(), 0.0);
        write_assignment_values(block, AssignmentValues{{a}}, values);
        return values;
    }

    int count_violations(const std::vector<double>& values) {
        int violated = 0;
        for (const LinConstraint& c : model.constraints())
            if (constraint_violation(c, values) > 1e-9) ++violated;
        return violated;
    }
};

}  // namespace

TEST_CASE("the reference travel segment satisfies every generated constraint") {
    ReplayFixture fx;
    // Parked at node 0 for spans 0..1, traveling to node 1 over spans 2..4,
    // parked at node 1 from span 5: S = (0,0,3,0,0,0,0), R = (0,0,3,2,1,0,0).
    std::vector<double> values = fx.point_for_leg(2, 4);

    const MerVarBlock& vars = fx.block.mers[0];
    CHECK(values[vars.injected[2].index] == 3.0);
    CHECK(values[vars.residual[2].index] == 3.0);
    CHECK(values[vars.residual[3].index] == 2.0);
    CHECK(values[vars.residual[4].index] == 1.0);
    CHECK(values[vars.residual[5].index] == 0.0);
    CHECK(values[vars.lock[3].index] == 1.0);
    CHECK(values[vars.lock[4].index] == 1.0);

    CHECK(fx.count_violations(values) == 0);
}

TEST_CASE("arriving one span early or late violates a constraint") {
    ReplayFixture fx;
    CHECK(fx.count_violations(fx.point_for_leg(2, 3)) > 0);  // 2 spans instead of 3
    CHECK(fx.count_violations(fx.point_for_leg(2, 5)) > 0);  // 4 spans instead of 3
}

TEST_CASE("transition rows carry the published coefficient pattern") {
    // With the reference tuple the lower/upper windows must come out as
    //   x[i][t+1] - x[i][t] - 1.2 v[i][t] + 1.2 v[i][t+1]
    //                       - 0.4 sum(v[t]) + 0.4 sum(v[t+1]) >= -0.8
    //   x[i][t+1] - x[i][t] -     v[i][t] +     v[i][t+1]
    //                       + 0.5 sum(v[t]) - 0.5 sum(v[t+1]) <=  0.7
    MilpModel model;
    std::vector<MerSpec> fleet{{1, 0, 0.0, 1.0}};
    SpanMatrix travel{{0, 2, 2}, {2, 0, 2}, {2, 2, 0}};
    TimeGrid grid{10, 2};
    MobilityBlock block =
        build_mobility_block(fleet, travel, grid, TransitionCoefficients::reference(), model);

    auto coeff_of = [&](const LinConstraint& c, VarRef ref) {
        for (const LinTerm& t : c.terms)
            if (t.var == ref) return t.coeff;
        return 0.0;
    };
    const MerVarBlock& vars = block.mers[0];
    const int i = 1, t = 0;
    const LinConstraint* lo_row = nullptr;
    const LinConstraint* up_row = nullptr;
    for (const LinConstraint& c : model.constraints()) {
        if (c.name == "trans_lo_j1_i1_t0") lo_row = &c;
        if (c.name == "trans_up_j1_i1_t0") up_row = &c;
    }
    REQUIRE(lo_row);
    REQUIRE(up_row);

    CHECK(lo_row->sense == ConstraintSense::GreaterEqual);
    CHECK(lo_row->rhs == -0.8);
    CHECK(coeff_of(*lo_row, vars.park[i][t + 1]) == 1.0);
    CHECK(coeff_of(*lo_row, vars.park[i][t]) == -1.0);
    CHECK(coeff_of(*lo_row, vars.travel[i][t]) == Catch::Approx(-1.2 - 0.4));
    CHECK(coeff_of(*lo_row, vars.travel[i][t + 1]) == Catch::Approx(1.2 + 0.4));
    CHECK(coeff_of(*lo_row, vars.travel[0][t]) == Catch::Approx(-0.4));
    CHECK(coeff_of(*lo_row, vars.travel[0][t + 1]) == Catch::Approx(0.4));

    CHECK(up_row->sense == ConstraintSense::LessEqual);
    CHECK(up_row->rhs == 0.7);
    CHECK(coeff_of(*up_row, vars.park[i][t + 1]) == 1.0);
    CHECK(coeff_of(*up_row, vars.park[i][t]) == -1.0);
    CHECK(coeff_of(*up_row, vars.travel[i][t]) == Catch::Approx(-1.0 + 0.5));
    CHECK(coeff_of(*up_row, vars.travel[i][t + 1]) == Catch::Approx(1.0 - 0.5));
    CHECK(coeff_of(*up_row, vars.travel[0][t]) == Catch::Approx(0.5));
    CHECK(coeff_of(*up_row, vars.travel[0][t + 1]) == Catch::Approx(-0.5));
}

TEST_CASE("generated counts match the closed forms over the whole grid") {
    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m <= 2; ++m)
            for (int d = 1; d <= 6; ++d) {
                CAPTURE(n, m, d);
                MilpModel model;
                std::vector<MerSpec> fleet;
                for (int j = 0; j < m; ++j) fleet.push_back({j, 0, 0.0, 1.0});
                SpanMatrix travel(n, std::vector<int>(n, 2));
                for (int i = 0; i < n; ++i) travel[i][i] = 0;
                TimeGrid grid{10, d};
                MobilityBlock block = build_mobility_block(fleet, travel, grid,
                                                           TransitionCoefficients::reference(), model);
                CHECK(block.binaries_added ==
                      static_cast<std::size_t>(m * (d + 1) * (2 * n + 1)));
                CHECK(block.continuous_added == static_cast<std::size_t>(2 * m * (d + 1)));
                CHECK(block.constraints_added ==
                      static_cast<std::size_t>(m * d * (5 * n + 6) + 7 * m));
            }
}

TEST_CASE("coefficients failing the check are rejected") {
    MilpModel model;
    std::vector<MerSpec> fleet{{0, 0, 0.0, 1.0}};
    SpanMatrix travel{{0}};
    TimeGrid grid{10, 2};
    CHECK_THROWS_AS(
        build_mobility_block(fleet, travel, grid, TransitionCoefficients{}, model),
        ValidationError);
}

TEST_CASE("dimension mismatches are rejected") {
    MilpModel model;
    std::vector<MerSpec> fleet{{0, 5, 0.0, 1.0}};  // initial node 5 does not exist
    SpanMatrix travel{{0, 1}, {1, 0}};
    TimeGrid grid{10, 2};
    CHECK_THROWS_AS(
        build_mobility_block(fleet, travel, grid, TransitionCoefficients::reference(), model),
        ValidationError);
    SpanMatrix ragged{{0, 1}};
    std::vector<MerSpec> fleet2{{0, 0, 0.0, 1.0}};
    CHECK_THROWS_AS(
        build_mobility_block(fleet2, ragged, grid, TransitionCoefficients::reference(), model),
        ValidationError);
}

TEST_CASE("a single node admits only the stay-forever labels") {
    SpanMatrix travel{{0}};
    auto feasible = testing::feasible_label_set(travel, 4, 0, TransitionCoefficients::reference());
    REQUIRE(feasible.size() == 1);
    CHECK(*feasible.begin() == "AAAAA");
}

TEST_CASE("zero-duration self-travel is infeasible") {
    SpanMatrix travel{{0, 2}, {2, 0}};
    auto feasible = testing::feasible_label_set(travel, 3, 0, TransitionCoefficients::reference());
    for (const std::string& key : feasible) {
        // No label may travel toward the node the MER just parked at.
        for (std::size_t t = 1; t < key.size(); ++t) {
            bool parked_prev = key[t - 1] == 'A' || key[t - 1] == 'B';
            if (parked_prev && key[t] >= 'a')
                CHECK(key[t] - 'a' != key[t - 1] - 'A');
        }
    }
}

TEST_CASE("validation flags teleports, bad durations and direction switches") {
    SpanMatrix travel{{0, 2, 2}, {2, 0, 2}, {2, 2, 0}};
    TimeGrid grid{10, 5};

    SECTION("teleporting parking label") {
        MerAssignment a = make_blank_assignment(3, 5);
        for (int t = 0; t <= 2; ++t) a.park[0][t] = 1;
        for (int t = 3; t <= 5; ++t) a.park[2][t] = 1;  // jumps with no travel
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        ValidationReport r = validate_mer_assignment(a, travel, grid);
        CHECK_FALSE(r.valid);
    }

    SECTION("early arrival") {
        MerAssignment a = make_blank_assignment(3, 5);
        a.park[0][0] = 1;
        a.travel[1][1] = 1;  // only one traveling span, travel time is 2
        for (int t = 2; t <= 5; ++t) a.park[1][t] = 1;
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        ValidationReport r = validate_mer_assignment(a, travel, grid);
        CHECK_FALSE(r.valid);
    }

    SECTION("direction switch mid-travel") {
        MerAssignment a = make_blank_assignment(3, 5);
        a.park[0][0] = 1;
        a.travel[1][1] = 1;
        a.travel[2][2] = 1;  // destination flips while airborne
        for (int t = 3; t <= 5; ++t) a.park[2][t] = 1;
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        ValidationReport r = validate_mer_assignment(a, travel, grid);
        CHECK_FALSE(r.valid);
    }

    SECTION("wrong initial node") {
        MerAssignment a = make_blank_assignment(3, 5);
        for (int t = 0; t <= 5; ++t) a.park[1][t] = 1;
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        ValidationReport r = validate_mer_assignment(a, travel, grid,
                                                     TransitionCoefficients::reference(), 0);
        CHECK_FALSE(r.valid);
        CHECK(validate_mer_assignment(a, travel, grid, TransitionCoefficients::reference(), 1).valid);
    }

    SECTION("truncated final leg is valid with a warning") {
        MerAssignment a = make_blank_assignment(3, 5);
        for (int t = 0; t <= 4; ++t) a.park[0][t] = 1;
        a.travel[1][5] = 1;  // departs at the last span
        recompute_fuel(a, travel);
        a.lock = canonical_lock(a);
        ValidationReport r = validate_mer_assignment(a, travel, grid,
                                                     TransitionCoefficients::reference(), 0);
        CHECK(r.valid);
        REQUIRE_FALSE(r.warnings.empty());
        CHECK(r.warnings.front().find("truncated") != std::string::npos);
    }
}

TEST_CASE("decode rejects spans with zero or two state labels") {
    MerAssignment a = make_blank_assignment(2, 3);
    a.park[0][0] = 1;
    a.park[0][1] = 1;
    a.park[1][1] = 1;  // two parking labels at span 1
    a.park[0][2] = 1;
    a.park[0][3] = 1;
    CHECK_THROWS_AS(decode_mer_labels(a), ModelError);
    a.park[1][1] = 0;
    CHECK_NOTHROW(decode_mer_labels(a));
    a.park[0][2] = 0;  // no label at span 2
    CHECK_THROWS_AS(decode_mer_labels(a), ModelError);
}

TEST_CASE("building the block twice yields identical constraint lists") {
    auto dump = []() {
        MilpModel model;
        std::vector<MerSpec> fleet{{1, 0, 0.3, 1000.0}, {2, 1, 0.3, 1000.0}};
        SpanMatrix travel{{0, 2, 1}, {2, 0, 3}, {1, 3, 0}};
        TimeGrid grid{10, 4};
        build_mobility_block(fleet, travel, grid, TransitionCoefficients::reference(), model);
        std::stringstream out;
        write_model_lp(model, out);
        return out.str();
    };
    CHECK(dump() == dump());
}

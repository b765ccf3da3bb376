#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/milp.hpp"
#include "merroute/mobility.hpp"
#include "merroute/scenario.hpp"

namespace merroute {

/// Closed-form model size for one mobility formulation at parameters
/// (N nodes, M MERs, D spans). All arithmetic is exact integers.
struct SizeReport {
    std::string model_name;
    long long binary_vars = 0;
    long long continuous_vars = 0;
    long long constraints = 0;
    long long n = 0, m = 0, d = 0;
};

inline std::string size_csv_header() { return "model,N,M,D,binary,continuous,constraints"; }

inline std::string to_csv_row(const SizeReport& r) {
    return r.model_name + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
           std::to_string(r.d) + "," + std::to_string(r.binary_vars) + "," +
           std::to_string(r.continuous_vars) + "," + std::to_string(r.constraints);
}

namespace detail {

inline void check_size_params(long long n, long long m, long long d) {
    if (n < 1 || m < 1 || d < 1) throw ValidationError("size formulas require N, M, D >= 1");
}

inline long long sum_all_travel_times(const SpanMatrix& t) {
    long long total = 0;
    for (const auto& row : t)
        for (int v : row) total += v;
    return total;
}

inline long long sum_squared_travel_times(const SpanMatrix& t) {
    long long total = 0;
    for (const auto& row : t)
        for (int v : row) total += static_cast<long long>(v) * v;
    return total;
}

inline long long sum_upper_triangle(const SpanMatrix& t) {
    long long total = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t k = i + 1; k < t.size(); ++k) total += t[i][k];
    return total;
}

}  // namespace detail

/// Proposed mobility model: M(D+1)(2N+1) binaries, 2M(D+1) continuous,
/// MD(5N+6)+7M constraints.
inline SizeReport size_proposed(long long n, long long m, long long d) {
    detail::check_size_params(n, m, d);
    SizeReport r{"proposed", 0, 0, 0, n, m, d};
    r.binary_vars = m * (d + 1) * (2 * n + 1);
    r.continuous_vars = 2 * m * (d + 1);
    r.constraints = m * d * (5 * n + 6) + 7 * m;
    return r;
}

/// Time-space network baseline. Virtual nodes arise from multi-span travel:
/// N_v = sum of strictly-upper-triangle travel times minus N(N-1)/2.
inline SizeReport size_tsn(long long n, long long m, long long d, const SpanMatrix& travel) {
    detail::check_size_params(n, m, d);
    long long virtual_nodes = detail::sum_upper_triangle(travel) - n * (n - 1) / 2;
    SizeReport r{"tsn", 0, 0, 0, n, m, d};
    r.binary_vars = d * m * (n * n + 2 * virtual_nodes);
    r.constraints =
        d * m * (n * n + 3 * virtual_nodes + 1) - m * (n * n - n + 2 * virtual_nodes);
    return r;
}

/// Modified time-space network baseline.
inline SizeReport size_modified_tsn(long long n, long long m, long long d,
                                    const SpanMatrix& travel) {
    detail::check_size_params(n, m, d);
    SizeReport r{"modified-tsn", 0, 0, 0, n, m, d};
    r.binary_vars = m * (n * n * (d + 1) - detail::sum_all_travel_times(travel) - n);
    r.constraints = m * d * (n + 1);
    return r;
}

/// Sliding window-based baseline.
inline SizeReport size_swbm(long long n, long long m, long long d, const SpanMatrix& travel) {
    detail::check_size_params(n, m, d);
    long long sum_t = detail::sum_all_travel_times(travel);
    long long sum_t2 = detail::sum_squared_travel_times(travel);
    SizeReport r{"swbm", 0, 0, 0, n, m, d};
    r.binary_vars = m * (d + 1) * (n + 1);
    long long numerator = (2 * d + 1) * sum_t - sum_t2 + 4 * d + 4;
    r.constraints = m * numerator / 2;  // numerator is always even
    return r;
}

/// Travel-time matrix with every off-diagonal entry equal to `value`;
/// the default used when no scenario supplies one.
inline SpanMatrix uniform_travel_matrix(long long n, int value = 1) {
    SpanMatrix t(n, std::vector<int>(n, value));
    for (long long i = 0; i < n; ++i) t[i][i] = 0;
    return t;
}

/// Builds a throwaway mobility block and reports its measured counts; the
/// counts do not depend on the travel-time values.
inline SizeReport measure_proposed(long long n, long long m, long long d) {
    detail::check_size_params(n, m, d);
    MilpModel model;
    std::vector<MerSpec> fleet;
    for (long long j = 0; j < m; ++j) fleet.push_back(MerSpec{static_cast<int>(j), 0, 0.0, 1.0});
    TimeGrid grid{1, static_cast<int>(d)};
    MobilityBlock block = build_mobility_block(fleet, uniform_travel_matrix(n), grid,
                                               TransitionCoefficients::reference(), model);
    SizeReport r{"proposed-measured", 0, 0, 0, n, m, d};
    r.binary_vars = static_cast<long long>(block.binaries_added);
    r.continuous_vars = static_cast<long long>(block.continuous_added);
    r.constraints = static_cast<long long>(block.constraints_added);
    return r;
}

/// All four closed forms plus the measured proposed-model row.
inline std::vector<SizeReport> size_all(long long n, long long m, long long d,
                                        const SpanMatrix& travel) {
    return {size_proposed(n, m, d), measure_proposed(n, m, d), size_tsn(n, m, d, travel),
            size_modified_tsn(n, m, d, travel), size_swbm(n, m, d, travel)};
}

}  // namespace merroute

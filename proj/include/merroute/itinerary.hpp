#pragma once

#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/scenario.hpp"

namespace merroute {

/// One travel leg. Spans are the traveling spans themselves: the MER travels
/// during depart_span..arrive_span and is parked at `destination` from
/// arrive_span + 1 on. A complete leg satisfies
/// arrive_span - depart_span + 1 == T[origin][destination]; a shorter final
/// leg cut off by the horizon is truncated. All node fields are indices.
struct TravelLeg {
    int origin = 0;
    int destination = 0;
    int depart_span = 0;
    int arrive_span = 0;

    int duration() const { return arrive_span - depart_span + 1; }
    friend bool operator==(const TravelLeg&, const TravelLeg&) = default;
    friend auto operator<=>(const TravelLeg&, const TravelLeg&) = default;
};

struct ParkInterval {
    int node = 0;
    int first_span = 0;
    int last_span = 0;

    friend bool operator==(const ParkInterval&, const ParkInterval&) = default;
};

/// Per-MER schedule: alternating parking intervals and travel legs covering
/// every span 0..D exactly once. `legs` alone determines the itinerary given
/// the MER's initial node.
struct Itinerary {
    int mer_index = 0;
    std::vector<ParkInterval> parks;
    std::vector<TravelLeg> legs;

    int total_travel_spans() const {
        int total = 0;
        for (const TravelLeg& l : legs) total += l.duration();
        return total;
    }

    friend bool operator==(const Itinerary&, const Itinerary&) = default;
};

/// One itinerary per MER, in fleet order.
using JointItinerary = std::vector<Itinerary>;

inline bool leg_truncated(const TravelLeg& leg, const SpanMatrix& travel_spans) {
    return leg.duration() < travel_spans[leg.origin][leg.destination];
}

/// Node index the MER is parked at during `span`, or -1 while traveling.
/// Derived purely from the leg list and the initial node.
inline std::vector<int> parked_node_per_span(const Itinerary& it, int initial_node_index,
                                             int num_spans) {
    std::vector<int> parked(num_spans + 1, initial_node_index);
    int node = initial_node_index;
    for (const TravelLeg& leg : it.legs) {
        for (int t = leg.depart_span; t <= leg.arrive_span; ++t) parked[t] = -1;
        node = leg.destination;
        for (int t = leg.arrive_span + 1; t <= num_spans; ++t) parked[t] = node;
    }
    return parked;
}

/// Rebuilds the parking intervals implied by the legs.
inline std::vector<ParkInterval> parks_from_legs(const Itinerary& it, int initial_node_index,
                                                 int num_spans) {
    std::vector<ParkInterval> parks;
    std::vector<int> parked = parked_node_per_span(it, initial_node_index, num_spans);
    int t = 0;
    while (t <= num_spans) {
        if (parked[t] < 0) {
            ++t;
            continue;
        }
        int start = t;
        while (t + 1 <= num_spans && parked[t + 1] == parked[start]) ++t;
        parks.push_back(ParkInterval{parked[start], start, t});
        ++t;
    }
    return parks;
}

/// Checks the structural itinerary invariants against a scenario-derived
/// travel-time matrix; throws ValidationError on the first failure.
inline void check_itinerary(const Itinerary& it, int initial_node_index,
                            const SpanMatrix& travel_spans, int num_spans) {
    int node = initial_node_index;
    int next_free_span = 1;  // span 0 is always parked at the initial node
    for (std::size_t k = 0; k < it.legs.size(); ++k) {
        const TravelLeg& leg = it.legs[k];
        std::string where = "legs[" + std::to_string(k) + "]";
        if (leg.origin != node) throw ValidationError(where + ": origin does not continue the route");
        if (leg.destination == leg.origin) throw ValidationError(where + ": self-travel");
        if (leg.depart_span < next_free_span)
            throw ValidationError(where + ": departs before the previous leg settled");
        if (leg.arrive_span > num_spans) throw ValidationError(where + ": arrives past the horizon");
        const int full = travel_spans[leg.origin][leg.destination];
        if (leg.arrive_span == num_spans) {
            if (leg.duration() > full) throw ValidationError(where + ": leg longer than travel time");
        } else if (leg.duration() != full) {
            throw ValidationError(where + ": leg duration differs from the travel-time matrix");
        }
        node = leg.destination;
        // One parking span after arrival before the next departure.
        next_free_span = leg.arrive_span + 2;
    }
}

}  // namespace merroute

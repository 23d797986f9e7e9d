#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/csv.hpp"
#include "leanopt/model.hpp"

namespace leanopt {

struct SblpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A market segment: customers interested in one origin-destination pair.
struct Segment {
    std::string origin;
    std::string destination;
    double lambda = 0.0;  // aggregate demand (Avg Pax)
    double v0 = 1.0;      // no-purchase attraction

    std::string id() const { return origin + "-" + destination; }
};

// One sellable product: a flight departure plus a fare type.
struct ProductOption {
    std::string segment;    // Segment::id()
    std::string departure;  // e.g. "11:20"
    std::string fare;       // e.g. "Eco-lite"
    double price = 0.0;
    double v = 0.0;  // attraction, > 0
    double w = 0.0;  // shadow attraction, in [0, v]
    double A = 1.0;  // capacity consumption, > 0

    std::string flight_key() const { return segment + "@" + departure; }
};

struct GamInstance {
    std::vector<Segment> segments;
    std::vector<ProductOption> options;
    std::map<std::string, double> capacity;  // flight_key -> seats

    const Segment* find_segment(const std::string& id) const;
    std::vector<size_t> segment_options(const std::string& id) const;
    std::vector<std::string> airports() const;  // sorted unique
};

// Choice probabilities when the subset S (indices into `all`) is offered.
// pi aligns with S; pi0 is computed from its own closed form so that
// pi0 + sum(pi) = 1 is a real consistency check.
struct GamProbabilities {
    std::vector<double> pi;
    double pi0 = 1.0;
};
GamProbabilities gam_probabilities(const Segment& segment,
                                   const std::vector<ProductOption>& all,
                                   const std::vector<size_t>& offered);

// Sales-volume LP: revenue objective, per-flight capacity rows, per-segment
// balance rows, per-option scale rows.
LinearModel build_sblp(const GamInstance& instance, const std::vector<size_t>& selected);

// SBLP plus binary flight-selection variables: x <= M y linking rows, a
// cardinality row sum(y) <= Z, and per-airport flow conservation.
// big_m maps flight_key to its bound; flights absent from the map use
// choose_big_m of their owning segment.
LinearModel build_network_planning(const GamInstance& instance,
                                   const std::vector<std::string>& candidate_flights, long Z,
                                   const std::map<std::string, double>& big_m = {});

// Valid deactivation bound for a segment's sales: Lambda * max(1, v_max /
// v_tilde_min) over the segment's options. Errors when some option has
// w = v (v_tilde_min = 0); callers must then supply M themselves.
double choose_big_m(const Segment& segment, const std::vector<ProductOption>& options);

enum class ShadowMode { Absolute, Ratio };  // v2 holds w, or w/v ratios

// Loads the four-table instance: flights (OD, departure, fare, price,
// capacity, capacity coefficient), OD demand (OD, Avg Pax), attraction
// values v1 (OD rows x fare-window columns + No Purchase), shadow values v2
// (same layout). Fare-window headers look like "Eco-lite (8am-12pm)"; each
// departure time is matched to its window.
GamInstance load_gam_instance(const CsvTable& flights, const CsvTable& od_demand,
                              const CsvTable& v1, const CsvTable& v2, ShadowMode mode);

}  // namespace leanopt

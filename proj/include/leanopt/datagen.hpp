#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leanopt/csv.hpp"

namespace leanopt {

struct DatagenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named, documented PRNG: identical specs reproduce identical streams.
// stream(label) derives an independent substream from the seed and label.
struct RngSpec {
    uint64_t seed = 42;
    std::string algorithm = "mt19937-64";  // the only supported id

    std::mt19937_64 stream(const std::string& label = "") const;
};

struct SalesRow {
    std::string product;
    long units_sold = 0;
    double unit_price = 0.0;
};

struct NrmRow {
    std::string product;
    double revenue = 0.0;
    long demand = 0;
    long initial_inventory = 0;
};

// Demand = ceil(units_sold * k) with k ~ U(1.2, 1.5); inventory is ten times
// units sold, rounded up to a multiple of ten; revenue is the unit price.
std::vector<NrmRow> gen_nrm(const std::vector<SalesRow>& rows, const RngSpec& rng);
CsvTable nrm_to_csv(const std::vector<NrmRow>& rows);

long round_up_to_multiple_of_10(long x);

// Great-circle distance on a sphere of radius 3958.7613 miles.
double haversine_miles(double lat1, double lon1, double lat2, double lon2);

struct Location {
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
};

struct TpCosts {
    std::vector<Location> suppliers;  // shuffled first half
    std::vector<Location> customers;  // shuffled second half
    std::vector<std::vector<double>> cost;  // suppliers x customers
};

// Shuffles the locations, splits them in half (suppliers first), and prices
// each lane at its great-circle distance times a unit cost drawn uniformly
// from cost_per_mile.
TpCosts gen_tp_costs(const std::vector<Location>& locations,
                     const std::vector<double>& cost_per_mile, const RngSpec& rng);

// n independent uniform integer setup costs in [range.first, range.second].
std::vector<long> gen_flp_setup_costs(long n, std::pair<long, long> range, const RngSpec& rng);

}  // namespace leanopt

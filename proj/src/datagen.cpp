#include "leanopt/datagen.hpp"

#include <algorithm>
#include <cmath>

namespace leanopt {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr double kEarthRadiusMiles = 3958.7613;
constexpr double kPi = 3.14159265358979323846;

}  // namespace

std::mt19937_64 RngSpec::stream(const std::string& label) const {
    if (algorithm != "mt19937-64")
        throw DatagenError("unknown RNG algorithm '" + algorithm + "'");
    uint64_t s = splitmix64(seed);
    for (unsigned char c : label) s = splitmix64(s ^ c);
    return std::mt19937_64(s);
}

long round_up_to_multiple_of_10(long x) { return (x + 9) / 10 * 10; }

std::vector<NrmRow> gen_nrm(const std::vector<SalesRow>& rows, const RngSpec& rng) {
    auto engine = rng.stream("nrm");
    std::uniform_real_distribution<double> k(1.2, 1.5);
    std::vector<NrmRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.units_sold < 0)
            throw DatagenError("negative units sold for '" + row.product + "'");
        NrmRow r;
        r.product = row.product;
        r.revenue = row.unit_price;
        r.demand = (long)std::ceil((double)row.units_sold * k(engine));
        r.initial_inventory = round_up_to_multiple_of_10(row.units_sold * 10);
        out.push_back(std::move(r));
    }
    return out;
}

CsvTable nrm_to_csv(const std::vector<NrmRow>& rows) {
    CsvTable table;
    table.name = "nrm";
    table.header = {"Product Name", "Revenue", "Demand", "Initial Inventory"};
    for (const auto& r : rows) {
        char revenue[64];
        snprintf(revenue, sizeof revenue, "%.17g", r.revenue);
        table.rows.push_back({r.product, revenue, std::to_string(r.demand),
                              std::to_string(r.initial_inventory)});
    }
    return table;
}

double haversine_miles(double lat1, double lon1, double lat2, double lon2) {
    if (std::fabs(lat1) > 90 || std::fabs(lat2) > 90 || std::fabs(lon1) > 180 ||
        std::fabs(lon2) > 180)
        throw DatagenError("coordinates out of range");
    auto rad = [](double deg) { return deg * kPi / 180.0; };
    double dlat = rad(lat2 - lat1), dlon = rad(lon2 - lon1);
    double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
               std::cos(rad(lat1)) * std::cos(rad(lat2)) * std::sin(dlon / 2) *
                   std::sin(dlon / 2);
    return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(a)));
}

TpCosts gen_tp_costs(const std::vector<Location>& locations,
                     const std::vector<double>& cost_per_mile, const RngSpec& rng) {
    if (locations.size() < 2) throw DatagenError("need at least two locations");
    if (cost_per_mile.empty()) throw DatagenError("cost_per_mile is empty");
    auto engine = rng.stream("tp");
    std::vector<Location> shuffled = locations;
    std::shuffle(shuffled.begin(), shuffled.end(), engine);
    size_t half = shuffled.size() / 2;
    TpCosts out;
    out.suppliers.assign(shuffled.begin(), shuffled.begin() + half);
    out.customers.assign(shuffled.begin() + half, shuffled.end());
    std::uniform_int_distribution<size_t> pick(0, cost_per_mile.size() - 1);
    out.cost.assign(out.suppliers.size(), std::vector<double>(out.customers.size(), 0.0));
    for (size_t i = 0; i < out.suppliers.size(); ++i)
        for (size_t j = 0; j < out.customers.size(); ++j) {
            double miles = haversine_miles(out.suppliers[i].lat, out.suppliers[i].lon,
                                           out.customers[j].lat, out.customers[j].lon);
            out.cost[i][j] = miles * cost_per_mile[pick(engine)];
        }
    return out;
}

std::vector<long> gen_flp_setup_costs(long n, std::pair<long, long> range, const RngSpec& rng) {
    if (n < 0) throw DatagenError("negative count");
    if (range.first > range.second) throw DatagenError("inverted cost range");
    auto engine = rng.stream("flp");
    std::uniform_int_distribution<long> cost(range.first, range.second);
    std::vector<long> out;
    out.reserve((size_t)n);
    for (long i = 0; i < n; ++i) out.push_back(cost(engine));
    return out;
}

}  // namespace leanopt

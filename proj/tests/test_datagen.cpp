#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "leanopt/datagen.hpp"

using namespace leanopt;

TEST_CASE("identical rng specs reproduce identical streams") {
    RngSpec a{7, "mt19937-64"}, b{7, "mt19937-64"};
    auto ea = a.stream("x"), eb = b.stream("x");
    for (int i = 0; i < 100; ++i) CHECK(ea() == eb());
    // different labels give independent substreams
    auto ec = a.stream("y");
    CHECK(a.stream("x")() != ec());
    RngSpec bad{7, "xorshift"};
    CHECK_THROWS_AS(bad.stream(), DatagenError);
}

TEST_CASE("nrm demand stays within its ceiling bounds for all unit counts") {
    std::vector<SalesRow> rows;
    for (long u = 0; u <= 10000; u += (u < 100 ? 1 : 97))
        rows.push_back({"p" + std::to_string(u), u, 9.5});
    auto out = gen_nrm(rows, RngSpec{123});
    REQUIRE(out.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        long u = rows[i].units_sold;
        CHECK(out[i].demand >= (long)std::ceil(1.2 * u));
        CHECK(out[i].demand <= (long)std::ceil(1.5 * u));
        CHECK(out[i].initial_inventory % 10 == 0);
        CHECK(out[i].initial_inventory >= 10 * u);
        CHECK(out[i].revenue == 9.5);
    }
}

TEST_CASE("nrm edge cases") {
    auto zero = gen_nrm({{"none", 0, 3.0}}, RngSpec{});
    CHECK(zero[0].demand == 0);
    CHECK(zero[0].initial_inventory == 0);
    auto ten = gen_nrm({{"ten", 10, 3.0}}, RngSpec{});
    CHECK(ten[0].demand >= 12);
    CHECK(ten[0].demand <= 15);
    CHECK(ten[0].initial_inventory == 100);
    CHECK_THROWS_AS(gen_nrm({{"neg", -1, 3.0}}, RngSpec{}), DatagenError);
}

TEST_CASE("identical seeds reproduce byte-identical nrm csv output") {
    std::vector<SalesRow> rows = {{"a", 11, 2.5}, {"b", 37, 8.0}, {"c", 250, 1.75}};
    std::string first = write_csv(nrm_to_csv(gen_nrm(rows, RngSpec{42})));
    std::string second = write_csv(nrm_to_csv(gen_nrm(rows, RngSpec{42})));
    CHECK(first == second);
    std::string other = write_csv(nrm_to_csv(gen_nrm(rows, RngSpec{43})));
    CHECK(first != other);
    CHECK(first.rfind("Product Name,Revenue,Demand,Initial Inventory\n", 0) == 0);
}

TEST_CASE("round up to multiple of ten") {
    CHECK(round_up_to_multiple_of_10(0) == 0);
    CHECK(round_up_to_multiple_of_10(1) == 10);
    CHECK(round_up_to_multiple_of_10(10) == 10);
    CHECK(round_up_to_multiple_of_10(101) == 110);
}

TEST_CASE("haversine basics") {
    CHECK(haversine_miles(1.25, 103.8, 1.25, 103.8) == 0.0);
    // antipodal poles: half the circumference
    CHECK(haversine_miles(90, 0, -90, 0) ==
          doctest::Approx(3958.7613 * 3.14159265358979).epsilon(1e-9));
    CHECK(haversine_miles(40.7, -74.0, 51.5, -0.1) ==
          doctest::Approx(haversine_miles(51.5, -0.1, 40.7, -74.0)));
    // London to New York is about 3,459 statute miles
    CHECK(haversine_miles(51.5074, -0.1278, 40.7128, -74.0060) ==
          doctest::Approx(3459.0).epsilon(0.01));
    CHECK_THROWS_AS(haversine_miles(91, 0, 0, 0), DatagenError);
    CHECK_THROWS_AS(haversine_miles(0, 181, 0, 0), DatagenError);
}

TEST_CASE("tp cost generation splits, shuffles and prices by distance") {
    std::vector<Location> locs = {
        {"A", 0, 0}, {"B", 0, 10}, {"C", 10, 0}, {"D", 10, 10}, {"E", 5, 5},
    };
    auto out = gen_tp_costs(locs, {2.0}, RngSpec{5});
    CHECK(out.suppliers.size() == 2);  // floor(5 / 2)
    CHECK(out.customers.size() == 3);
    REQUIRE(out.cost.size() == 2);
    REQUIRE(out.cost[0].size() == 3);
    // single-element cost list: every entry equals distance * 2.0
    for (size_t i = 0; i < out.suppliers.size(); ++i)
        for (size_t j = 0; j < out.customers.size(); ++j) {
            double miles = haversine_miles(out.suppliers[i].lat, out.suppliers[i].lon,
                                           out.customers[j].lat, out.customers[j].lon);
            CHECK(out.cost[i][j] == doctest::Approx(2.0 * miles));
        }
    // determinism
    auto again = gen_tp_costs(locs, {2.0}, RngSpec{5});
    CHECK(again.cost == out.cost);
    CHECK(again.suppliers[0].name == out.suppliers[0].name);
}

TEST_CASE("tp cost generation edge cases") {
    std::vector<Location> two = {{"X", 3, 4}, {"Y", 3, 4}};
    auto out = gen_tp_costs(two, {1.5, 2.5}, RngSpec{});
    REQUIRE(out.cost.size() == 1);
    CHECK(out.cost[0][0] == 0.0);  // identical coordinates
    CHECK_THROWS_AS(gen_tp_costs({{"only", 0, 0}}, {1.0}, RngSpec{}), DatagenError);
    CHECK_THROWS_AS(gen_tp_costs(two, {}, RngSpec{}), DatagenError);
}

TEST_CASE("flp setup costs are uniform integers in range") {
    auto fixed = gen_flp_setup_costs(7, {5, 5}, RngSpec{});
    CHECK(fixed == std::vector<long>(7, 5));
    auto costs = gen_flp_setup_costs(10000, {10000, 50000}, RngSpec{99});
    CHECK(costs.size() == 10000);
    long lo = costs[0], hi = costs[0];
    for (long c : costs) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK(lo >= 10000);
    CHECK(hi <= 50000);
    CHECK(hi - lo > 30000);  // spread sanity for a uniform draw
    CHECK(gen_flp_setup_costs(0, {1, 2}, RngSpec{}).empty());
    CHECK_THROWS_AS(gen_flp_setup_costs(-1, {1, 2}, RngSpec{}), DatagenError);
    CHECK_THROWS_AS(gen_flp_setup_costs(3, {5, 1}, RngSpec{}), DatagenError);
}

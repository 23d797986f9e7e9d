#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "leanopt/csv.hpp"
#include "leanopt/retrieval.hpp"

using namespace leanopt;

namespace {

const char* kProductsCsv =
    "Product,Value,SpaceRequirement\n"
    "Sony Alpha Refrigerator,1818,400\n"
    "Sony Bravia XR,1609,200\n"
    "Sony HT-A7000 Soundbar,509,40\n"
    "Sony PlayStation 5,1808,60\n"
    "Sony PlayStation Soundbar,528,50\n"
    "Apple iPad Pro,999,30\n"
    "Apple MacBook Air,1199,35\n";

const char* kCapacityCsv =
    "PlatformID,Capacity\n"
    "1,1200\n2,1374\n3,800\n4,2042\n5,1000\n6,1800\n";

}  // namespace

TEST_CASE("csv parser handles quoting, CRLF and escapes") {
    CsvTable t = parse_csv("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\nplain,2\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,1");
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(t.rows[1][0] == "plain");
    CHECK(t.column_index("b") == 1);
    CHECK(t.column_index("zz") == -1);
}

TEST_CASE("csv parser round-trips through the writer") {
    CsvTable t = parse_csv("name,note\n\"a,b\",\"line\nbreak\"\nc,\"quote\"\"d\"\n");
    CsvTable again = parse_csv(write_csv(t));
    CHECK(again.header == t.header);
    CHECK(again.rows == t.rows);
}

TEST_CASE("csv rejects ragged rows and empty input") {
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), CsvError);
    CHECK_THROWS_AS(parse_csv(""), CsvError);
    CHECK_THROWS_AS(parse_csv("a,b\n\"unterminated\n"), CsvError);
}

TEST_CASE("embedding is unit-norm and deterministic") {
    auto v = embed("Sony TV");
    CHECK(v.size() == kEmbedDim);
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cosine(v, embed("Sony TV")) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(embed("  ,  "), RetrievalError);
}

TEST_CASE("lexical similarity orders related text above unrelated text") {
    double related = cosine(embed("Sony TV"), embed("Sony television set"));
    double unrelated = cosine(embed("Sony TV"), embed("flight demand"));
    CHECK(related > unrelated);
}

TEST_CASE("top_k matches the exhaustive cosine ranking") {
    VectorIndex index;
    std::vector<std::string> texts = {
        "allocate retail shelf space for Sony products",
        "transport goods from suppliers to customers at minimal cost",
        "assign workers to tasks minimizing total cost",
        "network revenue management for airline seats",
        "place facilities to serve regional demand",
    };
    for (size_t i = 0; i < texts.size(); ++i)
        index.add({"doc" + std::to_string(i), texts[i], ""});
    std::string query = "Sony shelf allocation";
    auto ranked = index.top_k(query, texts.size());
    REQUIRE(ranked.size() == texts.size());
    // oracle: brute-force cosine over all records
    auto q = embed(query);
    for (size_t i = 0; i + 1 < ranked.size(); ++i)
        CHECK(ranked[i].second >= ranked[i + 1].second);
    for (const auto& [rec, score] : ranked)
        CHECK(score == doctest::Approx(cosine(q, embed(rec.text))).epsilon(1e-9));
    CHECK(ranked[0].first.id == "doc0");
}

TEST_CASE("top_k: exact stored text ranks first with score 1") {
    VectorIndex index;
    index.add({"a", "exact phrase to find", ""});
    index.add({"b", "something else entirely different", ""});
    auto ranked = index.top_k("exact phrase to find", 10);
    REQUIRE(ranked.size() == 2);  // k larger than corpus returns the corpus
    CHECK(ranked[0].first.id == "a");
    CHECK(ranked[0].second == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("top_k ties break by record id and duplicates are rejected") {
    VectorIndex index;
    index.add({"z", "identical text", ""});
    index.add({"a", "identical text", ""});
    auto ranked = index.top_k("identical text", 2);
    CHECK(ranked[0].first.id == "a");
    CHECK_THROWS_AS(index.add({"a", "other", ""}), RetrievalError);
    VectorIndex empty;
    CHECK(empty.top_k("anything", 3).empty());
}

TEST_CASE("file_qa returns up to five (description, type) pairs") {
    VectorIndex index;
    index.add({"e1", "maximize revenue selling laptops with limited inventory", "NRM"});
    index.add({"e2", "ship products between warehouses", "TP"});
    index.add({"e3", "assign machines to jobs", "AP"});
    auto out = file_qa(index, "laptop inventory revenue");
    REQUIRE(out.size() == 3);
    CHECK(out[0].second == "NRM");
    VectorIndex empty;
    CHECK_THROWS_AS(file_qa(empty, "x"), RetrievalError);
}

TEST_CASE("csv_qa keyword match returns Sony rows and excludes Apple") {
    std::vector<CsvTable> tables = {parse_csv(kProductsCsv, "products")};
    std::string out = csv_qa(tables, std::vector<std::string>{"Sony"});
    CHECK(out.find("Sony Alpha Refrigerator") != std::string::npos);
    CHECK(out.find("Sony PlayStation 5") != std::string::npos);
    CHECK(out.find("Apple") == std::string::npos);
    // five Sony rows, one line each
    size_t lines = 0;
    for (char c : out)
        if (c == '\n') ++lines;
    CHECK(lines == 5);
    CHECK(out.find("Product: Sony Bravia XR, Value: 1609, SpaceRequirement: 200") !=
          std::string::npos);
}

TEST_CASE("csv_qa without keywords returns every row in source order") {
    std::vector<CsvTable> tables = {parse_csv(kCapacityCsv, "capacity")};
    std::string out = csv_qa(tables, std::vector<std::string>{});
    size_t lines = 0;
    for (char c : out)
        if (c == '\n') ++lines;
    CHECK(lines == 6);
    CHECK(out.find("PlatformID: 1, Capacity: 1200") < out.find("PlatformID: 2, Capacity: 1374"));
    CHECK(out.find("PlatformID: 6, Capacity: 1800") != std::string::npos);
}

TEST_CASE("csv_qa fuzzy matching tolerates one edit") {
    std::vector<CsvTable> tables = {parse_csv(kProductsCsv, "products")};
    std::string misspelled = csv_qa(tables, std::vector<std::string>{"Sonny"});
    std::string exact = csv_qa(tables, std::vector<std::string>{"Sony"});
    CHECK(misspelled == exact);
    CHECK(fuzzy_match("Sony Bravia XR", "sony"));
    CHECK(fuzzy_match("Sony Bravia XR", "Sonny"));
    CHECK_FALSE(fuzzy_match("Sony Bravia XR", "Apple"));
}

TEST_CASE("keyword extraction keeps entities and drops boilerplate") {
    auto kws = extract_keywords("Retrieve all the product data related to Sony");
    REQUIRE(kws.size() == 1);
    CHECK(kws[0] == "Sony");
    CHECK(extract_keywords("retrieve all the data instead").empty());
    auto quoted = extract_keywords("find rows for \"PlayStation 5\" please");
    REQUIRE(quoted.size() == 1);
    CHECK(quoted[0] == "PlayStation 5");
}

TEST_CASE("csv_qa free-text request routes through keyword extraction") {
    std::vector<CsvTable> tables = {parse_csv(kProductsCsv, "products"),
                                    parse_csv(kCapacityCsv, "capacity")};
    std::string sony = csv_qa(tables, std::string("Retrieve all the product data related to Sony"));
    size_t lines = 0;
    for (char c : sony)
        if (c == '\n') ++lines;
    CHECK(lines == 5);
    std::string all = csv_qa(tables, std::string("retrieve all the data instead"));
    lines = 0;
    for (char c : all)
        if (c == '\n') ++lines;
    CHECK(lines == 7 + 6);
}

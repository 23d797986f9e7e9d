#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanopt/csv.hpp"

namespace leanopt {

struct RetrievalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DocRecord {
    std::string id;
    std::string text;
    std::string payload;  // opaque reference (entry id, row serialization, ...)
};

// Deterministic offline embedding: hashed term frequency over lowercased
// alphanumeric tokens, dimension 2^15, unit-normalized. Throws on empty text.
std::vector<float> embed(const std::string& text);
constexpr size_t kEmbedDim = 1u << 15;

double cosine(const std::vector<float>& a, const std::vector<float>& b);

class VectorIndex {
public:
    void add(DocRecord record);  // throws on duplicate id
    size_t size() const { return records_.size(); }
    const DocRecord& record(size_t i) const { return records_[i]; }

    // Descending cosine score, ties broken by record id; length min(k, size).
    std::vector<std::pair<DocRecord, double>> top_k(const std::string& query, size_t k) const;

private:
    std::vector<DocRecord> records_;
    std::vector<std::vector<float>> vectors_;
};

// Top-5 reference instances by similarity of the query against stored
// problem descriptions; payload carries the problem type.
std::vector<std::pair<std::string, std::string>> file_qa(const VectorIndex& index,
                                                         const std::string& query);

// Fuzzy row retrieval: a row matches when any cell matches any keyword by
// case-insensitive substring or token edit-distance <= 1. With no keywords,
// every row is returned. Rows render as "Column: value, ..." in source order.
std::string csv_qa(const std::vector<CsvTable>& datasets,
                   const std::vector<std::string>& keywords);
std::string csv_qa(const std::vector<CsvTable>& datasets, const std::string& request);

// Splits a free-text tool request into entity keywords: quoted phrases plus
// capitalized words that are not request boilerplate ("Retrieve", "Data", ...).
std::vector<std::string> extract_keywords(const std::string& request);

bool fuzzy_match(const std::string& cell, const std::string& keyword);

}  // namespace leanopt

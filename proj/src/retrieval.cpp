#include "leanopt/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace leanopt {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += (char)std::tolower(c);
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

// FNV-1a 64-bit
uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<float> embed(const std::string& text) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw RetrievalError("empty text");
    std::vector<float> v(kEmbedDim, 0.0f);
    for (const auto& t : tokens) v[fnv1a(t) & (kEmbedDim - 1)] += 1.0f;
    double norm = 0.0;
    for (float x : v) norm += (double)x * x;
    norm = std::sqrt(norm);
    for (float& x : v) x = (float)(x / norm);
    return v;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (size_t i = 0; i < a.size(); ++i) dot += (double)a[i] * b[i];
    return dot;
}

void VectorIndex::add(DocRecord record) {
    for (const auto& r : records_)
        if (r.id == record.id) throw RetrievalError("duplicate record id '" + record.id + "'");
    vectors_.push_back(embed(record.text));
    records_.push_back(std::move(record));
}

std::vector<std::pair<DocRecord, double>> VectorIndex::top_k(const std::string& query,
                                                             size_t k) const {
    if (k < 1) throw RetrievalError("k must be at least 1");
    if (records_.empty()) return {};
    auto q = embed(query);
    std::vector<size_t> order(records_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> score(records_.size());
    for (size_t i = 0; i < records_.size(); ++i) score[i] = cosine(q, vectors_[i]);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return records_[a].id < records_[b].id;
    });
    std::vector<std::pair<DocRecord, double>> out;
    for (size_t i = 0; i < std::min(k, order.size()); ++i)
        out.push_back({records_[order[i]], score[order[i]]});
    return out;
}

std::vector<std::pair<std::string, std::string>> file_qa(const VectorIndex& index,
                                                         const std::string& query) {
    if (index.size() == 0) throw RetrievalError("empty reference store");
    auto ranked = index.top_k(query, 5);
    std::vector<std::pair<std::string, std::string>> out;
    for (auto& [rec, score] : ranked) out.push_back({rec.text, rec.payload});
    return out;
}

namespace {

size_t edit_distance_capped(const std::string& a, const std::string& b, size_t cap) {
    if (a.size() > b.size() + cap || b.size() > a.size() + cap) return cap + 1;
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = (char)std::tolower((unsigned char)c);
    return out;
}

}  // namespace

bool fuzzy_match(const std::string& cell, const std::string& keyword) {
    if (keyword.empty()) return false;
    std::string c = lower(cell), k = lower(keyword);
    if (c.find(k) != std::string::npos) return true;
    for (const auto& token : tokenize(cell))
        if (edit_distance_capped(token, k, 1) <= 1) return true;
    return false;
}

std::string csv_qa(const std::vector<CsvTable>& datasets,
                   const std::vector<std::string>& keywords) {
    std::string out;
    for (const auto& table : datasets) {
        for (const auto& row : table.rows) {
            bool match = keywords.empty();
            for (size_t j = 0; !match && j < row.size(); ++j)
                for (const auto& k : keywords)
                    if (fuzzy_match(row[j], k)) {
                        match = true;
                        break;
                    }
            if (!match) continue;
            std::string line;
            for (size_t j = 0; j < row.size(); ++j) {
                if (j) line += ", ";
                line += table.header[j] + ": " + row[j];
            }
            out += line + "\n";
        }
    }
    return out;
}

std::vector<std::string> extract_keywords(const std::string& request) {
    static const std::set<std::string> boilerplate = {
        "retrieve", "retrieval", "get",     "fetch",   "find",   "search", "all",
        "the",      "a",         "an",      "of",      "for",    "to",     "related",
        "data",     "dataset",   "datasets","rows",    "row",    "table",  "tables",
        "product",  "products",  "please",  "and",     "with",   "about",  "information",
        "instead",  "every",     "columns", "column",  "file",   "files",  "csv",
        "relevant", "records",   "record",  "entries", "entry",  "list",   "show"};
    std::vector<std::string> keywords;
    auto push = [&](const std::string& k) {
        if (k.empty()) return;
        for (const auto& existing : keywords)
            if (lower(existing) == lower(k)) return;
        keywords.push_back(k);
    };
    // quoted phrases
    size_t pos = 0;
    std::string stripped;
    while (pos < request.size()) {
        if (request[pos] == '"' || request[pos] == '\'') {
            char quote = request[pos];
            size_t end = request.find(quote, pos + 1);
            if (end != std::string::npos) {
                push(request.substr(pos + 1, end - pos - 1));
                pos = end + 1;
                continue;
            }
        }
        stripped += request[pos++];
    }
    // capitalized words outside boilerplate
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && std::isupper((unsigned char)cur[0]) && !boilerplate.count(lower(cur)))
            push(cur);
        cur.clear();
    };
    for (unsigned char c : stripped) {
        if (std::isalnum(c)) cur += (char)c;
        else flush();
    }
    flush();
    return keywords;
}

std::string csv_qa(const std::vector<CsvTable>& datasets, const std::string& request) {
    return csv_qa(datasets, extract_keywords(request));
}

}  // namespace leanopt

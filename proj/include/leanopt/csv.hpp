#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace leanopt {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One parsed CSV file: first record is the header, all records share its width.
struct CsvTable {
    std::string name;  // file stem or logical name
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& column) const;  // -1 when absent
    size_t width() const { return header.size(); }
};

// RFC-4180: quoted fields, doubled quotes, CRLF or LF record ends; UTF-8
// passthrough. Rows whose field count differs from the header are an error.
CsvTable parse_csv(const std::string& text, const std::string& name = "");
CsvTable read_csv_file(const std::string& path);
std::string write_csv(const CsvTable& table);

}  // namespace leanopt

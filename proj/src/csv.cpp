#include "leanopt/csv.hpp"

#include <fstream>
#include <sstream>

namespace leanopt {

int CsvTable::column_index(const std::string& column) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) return (int)i;
    return -1;
}

CsvTable parse_csv(const std::string& text, const std::string& name) {
    CsvTable table;
    table.name = name;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false, field_started = false, record_started = false;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        if (!record_started) return;
        end_field();
        if (table.header.empty()) table.header = std::move(record);
        else if (record.size() != table.header.size())
            throw CsvError(name + ": row " + std::to_string(table.rows.size() + 2) +
                           " has " + std::to_string(record.size()) + " fields, expected " +
                           std::to_string(table.header.size()));
        else table.rows.push_back(std::move(record));
        record.clear();
        record_started = false;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw CsvError(name + ": quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                record_started = true;
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field += c;
                field_started = true;
                record_started = true;
        }
    }
    if (in_quotes) throw CsvError(name + ": unterminated quoted field");
    end_record();
    if (table.header.empty()) throw CsvError(name + ": empty input");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_csv(buf.str(), stem);
}

static void write_field(std::string& out, const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

std::string write_csv(const CsvTable& table) {
    std::string out;
    auto write_record = [&](const std::vector<std::string>& rec) {
        for (size_t i = 0; i < rec.size(); ++i) {
            if (i) out += ',';
            write_field(out, rec[i]);
        }
        out += '\n';
    };
    write_record(table.header);
    for (const auto& row : table.rows) write_record(row);
    return out;
}

}  // namespace leanopt

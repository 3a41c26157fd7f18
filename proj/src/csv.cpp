#include "dtebell/csv.hpp"

#include <fmt/format.h>
#include <stdexcept>

namespace dtebell::csv {

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double v) const { return fmt::format("{:.15g}", v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, cell);
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

Writer::Writer(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("csv::Writer: empty header");
    write_record(header_);
}

void Writer::row(const std::vector<Cell>& cells) {
    if (cells.size() != header_.size()) {
        throw std::invalid_argument("csv::Writer: row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(header_.size()));
    }
    std::vector<std::string> fields;
    fields.reserve(cells.size());
    for (const auto& c : cells) fields.push_back(format_cell(c));
    write_record(fields);
}

void Writer::write_record(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote(fields[i]);
    }
    out_ << "\r\n";
}

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    Record record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field_started) throw std::runtime_error("csv: stray quote inside field");
                quoted = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                records.push_back(std::move(record));
                record.clear();
                break;
            default:
                field += ch;
                field_started = true;
        }
    }
    if (quoted) throw std::runtime_error("csv: unterminated quoted field");
    if (field_started || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace dtebell::csv

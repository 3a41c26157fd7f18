#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dtebell::csv {

// Empty cells are std::monostate.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t, std::uint64_t, bool>;

// Doubles use 15 significant digits and '.' as decimal separator.
std::string format_cell(const Cell& cell);
// Quotes fields containing comma, quote, CR or LF; quotes are doubled.
std::string quote(std::string_view field);

// RFC-4180 writer with CRLF record terminators. The header is written on
// construction and every row must match its width.
class Writer {
public:
    Writer(std::ostream& out, std::vector<std::string> header);

    void row(const std::vector<Cell>& cells);
    std::size_t width() const noexcept { return header_.size(); }

private:
    void write_record(const std::vector<std::string>& fields);

    std::ostream& out_;
    std::vector<std::string> header_;
};

using Record = std::vector<std::string>;

// Parses a whole document; accepts CRLF or LF terminators.
std::vector<Record> parse(std::string_view text);

}  // namespace dtebell::csv

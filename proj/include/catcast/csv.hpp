#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catcast {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::string> cells;  // row-major, n_rows × header.size()

    std::size_t n_cols() const { return header.size(); }
    std::size_t n_rows() const { return header.empty() ? 0 : cells.size() / header.size(); }
    std::string& at(std::size_t row, std::size_t col) { return cells[row * header.size() + col]; }
    const std::string& at(std::size_t row, std::size_t col) const {
        return cells[row * header.size() + col];
    }
    std::size_t col(const std::string& name) const;  // npos if absent
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// UTF-8, comma separated, RFC-style double-quote escaping. Quoted fields
// may contain commas, doubled quotes and newlines. Ragged rows are
// rejected with their 1-based row number.
RawTable parse_csv(std::istream& in);
RawTable parse_csv_file(const std::string& path);

void write_csv(std::ostream& out, const RawTable& table);
void write_csv_file(const std::string& path, const RawTable& table);

} // namespace catcast

#include "catcast/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "catcast/errors.hpp"

namespace catcast {

std::size_t RawTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return npos;
}

namespace {

// One record; returns false on clean EOF before any character.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;

    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    for (;;) {
        if (c == EOF) {
            fields.push_back(std::move(field));
            return true;
        }
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                const int peek = in.peek();
                if (peek == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !saw_any) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            saw_any = false;
            c = in.get();
            continue;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
            saw_any = true;
        }
        if (ch == '"' && !in_quotes) saw_any = true;
        c = in.get();
    }
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quoting(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"') out << "\"\"";
        else out << ch;
    }
    out << '"';
}

} // namespace

RawTable parse_csv(std::istream& in) {
    RawTable table;
    std::vector<std::string> fields;
    if (!read_record(in, fields) || (fields.size() == 1 && fields[0].empty()))
        throw FormatError("missing CSV header row");
    table.header = fields;

    std::size_t row = 1;  // header was row 1
    while (read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != table.header.size())
            throw FormatError("ragged CSV row " + std::to_string(row) + ": expected " +
                              std::to_string(table.header.size()) + " cells, got " +
                              std::to_string(fields.size()));
        for (auto& f : fields) table.cells.push_back(std::move(f));
    }
    return table;
}

RawTable parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open CSV file '" + path + "'");
    return parse_csv(in);
}

void write_csv(std::ostream& out, const RawTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        write_field(out, table.header[i]);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            if (c) out << ',';
            write_field(out, table.at(r, c));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const RawTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write CSV file '" + path + "'");
    write_csv(out, table);
}

} // namespace catcast

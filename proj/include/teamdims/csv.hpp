#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "teamdims/error.hpp"

namespace teamdims {

// RFC-4180 reader. Quoted fields may contain commas, doubled quotes and
// newlines. As a leniency for hand-written files, whitespace between a comma
// and an opening quote is skipped and unquoted fields are trimmed; the writer
// below always quotes such fields, so round-trips are exact.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads one record. Returns false at end of input. line() reports the
    // 1-based line the record started on.
    bool next(std::vector<std::string>& row) {
        row.clear();
        int c = in_.get();
        if (c == EOF) return false;
        record_line_ = line_;
        std::string field;
        bool quoted = false;
        bool field_was_quoted = false;
        bool at_field_start = true;
        auto finish_field = [&] {
            if (!field_was_quoted) trim(field);
            row.push_back(field);
            field.clear();
            quoted = field_was_quoted = false;
            at_field_start = true;
        };
        while (true) {
            if (c == EOF) {
                finish_field();
                return true;
            }
            char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    int peek = in_.peek();
                    if (peek == '"') {
                        field.push_back('"');
                        in_.get();
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
            } else {
                if (ch == ',') {
                    finish_field();
                } else if (ch == '\n') {
                    ++line_;
                    if (!field.empty() && field.back() == '\r') field.pop_back();
                    finish_field();
                    return true;
                } else if (ch == '"' && at_field_start) {
                    quoted = true;
                    field_was_quoted = true;
                    at_field_start = false;
                } else if ((ch == ' ' || ch == '\t') && at_field_start && !field_was_quoted) {
                    // skipped; trim handles the symmetric trailing case
                } else {
                    if (field_was_quoted && ch != '\r')
                        throw parse_error("line " + std::to_string(line_) +
                                          ": text after closing quote in CSV field");
                    field.push_back(ch);
                    at_field_start = false;
                }
            }
            c = in_.get();
        }
    }

    std::size_t line() const { return record_line_; }

private:
    static void trim(std::string& s) {
        std::size_t b = s.find_first_not_of(" \t");
        std::size_t e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }

    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

inline void write_csv_field(std::ostream& out, const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos ||
                        (!field.empty() && (field.front() == ' ' || field.back() == ' ' ||
                                            field.front() == '\t' || field.back() == '\t'));
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << "\"\"";
        else out << c;
    }
    out << '"';
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        write_csv_field(out, row[i]);
    }
    out << '\n';
}

} // namespace teamdims

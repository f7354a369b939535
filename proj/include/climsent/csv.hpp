#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "climsent/error.hpp"

namespace climsent::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based physical line where the record starts
};

/// RFC-4180 reader: comma separated, `"` quoting with `""` escapes, quoted
/// fields may span lines, LF or CRLF record terminators. A UTF-8 BOM at the
/// start is skipped. Blank lines between records are ignored.
inline std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    std::size_t pos = 0;
    std::size_t line = 1;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

    while (pos < text.size()) {
        if (text[pos] == '\n') {
            ++pos;
            ++line;
            continue;
        }
        if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
            pos += 2;
            ++line;
            continue;
        }

        Record rec;
        rec.line = line;
        std::string field;
        bool done = false;
        while (!done) {
            if (pos < text.size() && text[pos] == '"') {
                ++pos;
                for (;;) {
                    if (pos >= text.size()) {
                        throw Error("csv: unterminated quoted field starting on line " +
                                    std::to_string(rec.line));
                    }
                    char c = text[pos++];
                    if (c == '"') {
                        if (pos < text.size() && text[pos] == '"') {
                            field += '"';
                            ++pos;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line;
                        field += c;
                    }
                }
                if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' &&
                    !(text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
                    throw Error("csv: unexpected character after closing quote on line " +
                                std::to_string(line));
                }
            } else {
                while (pos < text.size() && text[pos] != ',' && text[pos] != '\n') {
                    if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') break;
                    if (text[pos] == '"') {
                        throw Error("csv: stray quote in unquoted field on line " +
                                    std::to_string(line));
                    }
                    field += text[pos++];
                }
            }

            rec.fields.push_back(std::move(field));
            field.clear();
            if (pos >= text.size()) {
                done = true;
            } else if (text[pos] == ',') {
                ++pos;
            } else if (text[pos] == '\n') {
                ++pos;
                ++line;
                done = true;
            } else {  // CRLF
                pos += 2;
                ++line;
                done = true;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::string escape_field(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                              (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace climsent::csv

#pragma once

#include "ioflow/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ioflow {

/// Split one CSV line on commas. No quoting; fields must not contain commas.
/// A trailing '\r' on the line is stripped before splitting.
std::vector<std::string> split_csv(std::string_view line);

/// Report formatting: up to 10 significant digits, trailing zeros trimmed.
/// Negative zero is normalized to "0".
std::string format_sig10(double value);

/// Shortest decimal that parses back to the same double bit pattern.
std::string format_roundtrip(double value);

/// Parse a finite double; throws ParseError on garbage or trailing junk.
double parse_double(std::string_view field, long line_number);

/// FNV-1a 64-bit over a byte string, rendered as 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// Write `content` to `path` via a temp file in the same directory plus an
/// atomic rename, so interrupted runs never leave partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// A rectangular string table rendered as CSV (one header row) or as a JSON
/// array of objects keyed by the header. Both renderings are byte-stable.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_csv() const;
    std::string to_json() const;
};

}  // namespace ioflow

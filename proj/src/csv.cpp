#include "ioflow/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace ioflow {

std::vector<std::string> split_csv(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string format_sig10(double value) {
    if (value == 0.0) return "0";  // also folds -0
    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%.10g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_roundtrip(double value) {
    if (value == 0.0) return "0";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, long line_number) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("bad numeric value '" + std::string(field) + "'", line_number);
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite value '" + std::string(field) + "'", line_number);
    }
    return value;
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf, 16);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw Error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

std::string Table::to_json() const {
    std::string out = "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out += r ? ",\n " : "\n ";
        out += '{';
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out += ", ";
            out += '"';
            out += header[i];
            out += "\": \"";
            out += rows[r][i];
            out += '"';
        }
        out += '}';
    }
    out += "\n]\n";
    return out;
}

}  // namespace ioflow

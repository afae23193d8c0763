#include "ioflow/flow_tensor.hpp"

#include "ioflow/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace ioflow {

namespace {

constexpr const char* kFlowHeader = "year,src_country,src_sector,dst_country,dst_sector,value";

int parse_year_field(const std::string& field, long line_no) {
    int year = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), year);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError("bad year '" + field + "'", line_no);
    }
    return year;
}

Index lookup_country(const CountryRegistry& countries, const std::string& code, long line_no) {
    if (auto idx = countries.find(code)) return *idx;
    throw ParseError("unknown country code '" + code + "'", line_no);
}

Index lookup_sector(const SectorRegistry& sectors, const std::string& code, long line_no) {
    if (auto idx = sectors.find(code)) return *idx;
    throw ParseError("unknown sector code '" + code + "'", line_no);
}

}  // namespace

FlowTensor make_zero_tensor(const NodeSpace& nodes, int year) {
    FlowTensor t;
    t.year = year;
    t.nodes = nodes;
    t.flows = Matrix::Zero(nodes.size(), nodes.size());
    return t;
}

FlowTensor parse_flow_table(std::istream& in, const CountryRegistry& countries,
                            const SectorRegistry& sectors, int year, ParseStats* stats) {
    const NodeSpace nodes = node_space(countries, sectors);
    FlowTensor tensor = make_zero_tensor(nodes, year);
    std::vector<bool> seen(static_cast<std::size_t>(nodes.size() * nodes.size()), false);

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty flow file: missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFlowHeader) {
        throw ParseError(std::string("flow file header must be '") + kFlowHeader + "'", line_no);
    }

    ParseStats local;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ++local.lines;
        auto fields = split_csv(line);
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()), line_no);
        }
        const int record_year = parse_year_field(fields[0], line_no);
        const Index src_c = lookup_country(countries, fields[1], line_no);
        const Index src_s = lookup_sector(sectors, fields[2], line_no);
        const Index dst_c = lookup_country(countries, fields[3], line_no);
        const Index dst_s = lookup_sector(sectors, fields[4], line_no);
        const double value = parse_double(fields[5], line_no);
        if (value < 0.0) {
            throw ParseError("negative flow value '" + fields[5] + "'", line_no);
        }
        if (record_year != year) {
            ++local.skipped_other_year;
            continue;
        }
        const Index src = nodes.node(src_c, src_s);
        const Index dst = nodes.node(dst_c, dst_s);
        const std::size_t key = static_cast<std::size_t>(dst * nodes.size() + src);
        if (seen[key]) {
            throw ParseError("duplicate record for " + fields[1] + "/" + fields[2] + " -> " +
                                 fields[3] + "/" + fields[4] + " in year " + fields[0],
                             line_no);
        }
        seen[key] = true;
        tensor.flows(dst, src) = value;
        ++local.records;
    }
    if (stats) *stats = local;
    return tensor;
}

void write_flow_table(const FlowTensor& tensor, const CountryRegistry& countries,
                      const SectorRegistry& sectors, std::ostream& out) {
    const NodeSpace& nodes = tensor.nodes;
    if (countries.size() != nodes.n_countries || sectors.size() != nodes.n_sectors) {
        throw Error("registry sizes do not match tensor node space");
    }
    out << kFlowHeader << '\n';
    const std::string year = std::to_string(tensor.year);
    for (Index src = 0; src < nodes.size(); ++src) {
        const auto& src_country = countries.at(nodes.country_of(src)).iso3;
        const auto& src_sector = sectors.at(nodes.sector_of(src)).code;
        for (Index dst = 0; dst < nodes.size(); ++dst) {
            const double value = tensor.flows(dst, src);
            if (value == 0.0) continue;
            out << year << ',' << src_country << ',' << src_sector << ','
                << countries.at(nodes.country_of(dst)).iso3 << ','
                << sectors.at(nodes.sector_of(dst)).code << ',' << format_roundtrip(value) << '\n';
        }
    }
}

namespace {

Index parse_node_label(const std::string& label, const CountryRegistry& countries,
                       const SectorRegistry& sectors, const NodeSpace& nodes, long line_no) {
    auto pos = label.find(':');
    if (pos == std::string::npos) {
        throw ParseError("node label '" + label + "' must be ISO3:SECTOR", line_no);
    }
    const Index c = lookup_country(countries, label.substr(0, pos), line_no);
    const Index s = lookup_sector(sectors, label.substr(pos + 1), line_no);
    return nodes.node(c, s);
}

}  // namespace

FlowTensor parse_square_table(std::istream& in, const CountryRegistry& countries,
                              const SectorRegistry& sectors, int year) {
    const NodeSpace nodes = node_space(countries, sectors);
    const Index n = nodes.size();

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty square table");
    ++line_no;
    auto header = split_csv(line);
    if (header.size() != static_cast<std::size_t>(n) + 1) {
        throw ParseError("square table header must name all " + std::to_string(n) + " nodes",
                         line_no);
    }
    std::vector<Index> dst_of_col(static_cast<std::size_t>(n));
    std::vector<bool> dst_seen(static_cast<std::size_t>(n), false);
    for (Index col = 0; col < n; ++col) {
        const Index dst = parse_node_label(header[static_cast<std::size_t>(col) + 1], countries,
                                           sectors, nodes, line_no);
        if (dst_seen[static_cast<std::size_t>(dst)]) {
            throw ParseError("duplicate destination label '" +
                                 header[static_cast<std::size_t>(col) + 1] + "'",
                             line_no);
        }
        dst_seen[static_cast<std::size_t>(dst)] = true;
        dst_of_col[static_cast<std::size_t>(col)] = dst;
    }

    FlowTensor tensor = make_zero_tensor(nodes, year);
    std::vector<bool> src_seen(static_cast<std::size_t>(n), false);
    long rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != static_cast<std::size_t>(n) + 1) {
            throw ParseError("expected " + std::to_string(n + 1) + " fields", line_no);
        }
        const Index src = parse_node_label(fields[0], countries, sectors, nodes, line_no);
        if (src_seen[static_cast<std::size_t>(src)]) {
            throw ParseError("duplicate source row '" + fields[0] + "'", line_no);
        }
        src_seen[static_cast<std::size_t>(src)] = true;
        for (Index col = 0; col < n; ++col) {
            const double value = parse_double(fields[static_cast<std::size_t>(col) + 1], line_no);
            if (value < 0.0) throw ParseError("negative flow value", line_no);
            tensor.flows(dst_of_col[static_cast<std::size_t>(col)], src) = value;
        }
        ++rows;
    }
    if (rows != n) {
        throw ParseError("square table has " + std::to_string(rows) + " source rows, expected " +
                         std::to_string(n));
    }
    return tensor;
}

FlowTensor zero_intra_country(FlowTensor tensor) {
    const NodeSpace& nodes = tensor.nodes;
    const Index ns = nodes.n_sectors;
    for (Index c = 0; c < nodes.n_countries; ++c) {
        tensor.flows.block(c * ns, c * ns, ns, ns).setZero();
    }
    return tensor;
}

}  // namespace ioflow

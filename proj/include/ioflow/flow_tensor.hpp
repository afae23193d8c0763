#pragma once

#include "ioflow/registry.hpp"
#include "ioflow/types.hpp"

#include <iosfwd>

namespace ioflow {

/// Money-transfer tensor over country x sector nodes, flattened to an N x N
/// matrix: flows(i, j) is the value moved from source node j to destination
/// node i, in USD millions. All entries are nonnegative.
struct FlowTensor {
    int year = 0;
    NodeSpace nodes;
    Matrix flows;

    Scalar& at(Index dst_country, Index src_country, Index dst_sector, Index src_sector) {
        return flows(nodes.node(dst_country, dst_sector), nodes.node(src_country, src_sector));
    }
    Scalar at(Index dst_country, Index src_country, Index dst_sector, Index src_sector) const {
        return flows(nodes.node(dst_country, dst_sector), nodes.node(src_country, src_sector));
    }
};

FlowTensor make_zero_tensor(const NodeSpace& nodes, int year);

struct ParseStats {
    long lines = 0;             // data lines seen (excluding header)
    long records = 0;           // records ingested for the requested year
    long skipped_other_year = 0;
};

/// Parse long-form flow records:
///   year,src_country,src_sector,dst_country,dst_sector,value
/// Country fields are ISO3 codes, sector fields OECD codes (full or short
/// alias), value a nonnegative decimal in USD millions. Records whose year
/// differs from `year` are skipped. Within the requested year a repeated
/// (source, destination) pair is an error, as are unknown codes and negative
/// values.
FlowTensor parse_flow_table(std::istream& in, const CountryRegistry& countries,
                            const SectorRegistry& sectors, int year, ParseStats* stats = nullptr);

/// Serialize nonzero cells in source-major order using shortest round-trip
/// decimals, so parse(write(M)) == M bit for bit.
void write_flow_table(const FlowTensor& tensor, const CountryRegistry& countries,
                      const SectorRegistry& sectors, std::ostream& out);

/// Optional import path for square input-output layouts. The first row holds
/// destination node labels `ISO3:SECTOR` (short or full sector code, ':'
/// separated), each following row a source label plus one value per
/// destination. The matrix is transposed into the canonical source-column
/// orientation. Every node must appear exactly once on each axis.
FlowTensor parse_square_table(std::istream& in, const CountryRegistry& countries,
                              const SectorRegistry& sectors, int year);

/// Zero all intra-country cells (same source and destination country, any
/// sector pair). Idempotent.
FlowTensor zero_intra_country(FlowTensor tensor);

}  // namespace ioflow

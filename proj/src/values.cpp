#include "ioflow/values.hpp"

namespace ioflow {

ValueTables compute_values(const FlowTensor& tensor) {
    ValueTables t;
    t.nodes = tensor.nodes;
    t.import_value = tensor.flows.rowwise().sum();
    t.export_value = tensor.flows.colwise().sum().transpose();
    t.total = tensor.flows.sum();
    if (t.total == 0.0) {
        throw Error("degenerate dataset: total exchange value is zero");
    }
    t.import_prob = t.import_value / t.total;
    t.export_prob = t.export_value / t.total;
    return t;
}

ValueRanks value_rank_indexes(const ValueTables& tables) {
    ValueRanks r;
    r.node_import = rank_descending(tables.import_prob);
    r.node_export = rank_descending(tables.export_prob);
    r.country_import_prob = reduce(tables.import_prob, tables.nodes, Axis::Country);
    r.country_export_prob = reduce(tables.export_prob, tables.nodes, Axis::Country);
    r.country_import = rank_descending(r.country_import_prob);
    r.country_export = rank_descending(r.country_export_prob);
    r.sector_import_prob = reduce(tables.import_prob, tables.nodes, Axis::Sector);
    r.sector_export_prob = reduce(tables.export_prob, tables.nodes, Axis::Sector);
    r.sector_import = rank_descending(r.sector_import_prob);
    r.sector_export = rank_descending(r.sector_export_prob);
    return r;
}

}  // namespace ioflow

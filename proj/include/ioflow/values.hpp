#pragma once

#include "ioflow/flow_tensor.hpp"
#include "ioflow/ordering.hpp"
#include "ioflow/types.hpp"

namespace ioflow {

/// Per-node import/export values and their probability normalizations.
/// import_value[i] is the total inflow of node i (row sum of the flow
/// matrix), export_value[i] the total outflow (column sum); both sum to the
/// same grand total.
struct ValueTables {
    NodeSpace nodes;
    Vector import_value;   // V per node, USD millions
    Vector export_value;   // V* per node
    Scalar total = 0.0;    // V, full tensor sum
    Vector import_prob;    // import_value / total
    Vector export_prob;    // export_value / total
};

/// Throws Error when the tensor is all-zero (probabilities undefined).
ValueTables compute_values(const FlowTensor& tensor);

/// Value-based rank orderings at node, country and sector granularity.
struct ValueRanks {
    Ordering node_import, node_export;
    Vector country_import_prob, country_export_prob;
    Ordering country_import, country_export;
    Vector sector_import_prob, sector_export_prob;
    Ordering sector_import, sector_export;
};

ValueRanks value_rank_indexes(const ValueTables& tables);

}  // namespace ioflow

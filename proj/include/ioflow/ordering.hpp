#pragma once

#include "ioflow/types.hpp"

#include <vector>

namespace ioflow {

/// Descending ordering of a value vector. rank_of maps item -> one-based
/// rank; by_rank maps zero-based rank position -> item.
struct Ordering {
    std::vector<int> rank_of;
    std::vector<Index> by_rank;

    Index size() const { return static_cast<Index>(rank_of.size()); }
    bool operator==(const Ordering&) const = default;
};

/// Sort items by descending value; ties broken by ascending item index.
/// For node vectors the index tie-break is equivalent to ascending country
/// then ascending sector.
Ordering rank_descending(const Vector& values);

/// Build an Ordering from an externally supplied one-based rank vector;
/// throws unless it is a permutation of 1..N.
Ordering ordering_from_ranks(const std::vector<int>& rank_of);

/// Sum node values over sectors (Axis::Country -> length N_c) or over
/// countries (Axis::Sector -> length N_s).
Vector reduce(const Vector& node_values, const NodeSpace& nodes, Axis axis);

}  // namespace ioflow

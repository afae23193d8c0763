#include "ioflow/ordering.hpp"

#include <algorithm>
#include <numeric>

namespace ioflow {

Ordering rank_descending(const Vector& values) {
    const Index n = values.size();
    Ordering ord;
    ord.by_rank.resize(static_cast<std::size_t>(n));
    std::iota(ord.by_rank.begin(), ord.by_rank.end(), Index{0});
    std::sort(ord.by_rank.begin(), ord.by_rank.end(), [&](Index a, Index b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    ord.rank_of.resize(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) {
        ord.rank_of[static_cast<std::size_t>(ord.by_rank[static_cast<std::size_t>(pos)])] =
            static_cast<int>(pos) + 1;
    }
    return ord;
}

Ordering ordering_from_ranks(const std::vector<int>& rank_of) {
    const auto n = rank_of.size();
    Ordering ord;
    ord.rank_of = rank_of;
    ord.by_rank.assign(n, Index{-1});
    for (std::size_t i = 0; i < n; ++i) {
        const int r = rank_of[i];
        if (r < 1 || static_cast<std::size_t>(r) > n || ord.by_rank[static_cast<std::size_t>(r - 1)] != -1) {
            throw Error("rank vector is not a permutation of 1.." + std::to_string(n));
        }
        ord.by_rank[static_cast<std::size_t>(r - 1)] = static_cast<Index>(i);
    }
    return ord;
}

Vector reduce(const Vector& node_values, const NodeSpace& nodes, Axis axis) {
    if (node_values.size() != nodes.size()) throw Error("node vector size mismatch");
    if (axis == Axis::Country) {
        Vector out = Vector::Zero(nodes.n_countries);
        for (Index c = 0; c < nodes.n_countries; ++c) {
            out[c] = node_values.segment(c * nodes.n_sectors, nodes.n_sectors).sum();
        }
        return out;
    }
    Vector out = Vector::Zero(nodes.n_sectors);
    for (Index c = 0; c < nodes.n_countries; ++c) {
        out += node_values.segment(c * nodes.n_sectors, nodes.n_sectors);
    }
    return out;
}

}  // namespace ioflow

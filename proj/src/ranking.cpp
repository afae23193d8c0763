#include "ioflow/ranking.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace ioflow {

namespace {

void attach_orderings(RankResult& r, const NodeSpace& nodes) {
    r.node_rank = rank_descending(r.node_prob);
    r.country_prob = reduce(r.node_prob, nodes, Axis::Country);
    r.country_rank = rank_descending(r.country_prob);
    r.sector_prob = reduce(r.node_prob, nodes, Axis::Sector);
    r.sector_rank = rank_descending(r.sector_prob);
}

}  // namespace

RankResult pagerank(const GoogleOperator& op, const NodeSpace& nodes, Direction direction,
                    const SolveOptions& options) {
    const Index n = op.transitions.size();
    if (nodes.size() != n) throw Error("node space does not match operator dimension");
    if (options.tol <= 0.0) throw Error("tolerance must be positive");

    Vector x = Vector::Constant(n, 1.0 / static_cast<Scalar>(n));
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        Vector next = apply_google(op, x);
        residual = (next - x).lpNorm<1>();
        next /= next.sum();
        x = std::move(next);
        if (residual <= options.tol) break;
    }
    if (residual > options.tol) throw ConvergenceError(residual, iter);

    RankResult r;
    r.direction = direction;
    r.node_prob = std::move(x);
    r.iterations = iter + 1;
    r.residual = residual;
    attach_orderings(r, nodes);
    return r;
}

TwoDRankResult two_d_rank(const Ordering& import_rank, const Ordering& export_rank) {
    const Index n = import_rank.size();
    if (export_rank.size() != n) throw Error("rank vectors have different lengths");
    // ordering_from_ranks rejects anything that is not a permutation of 1..N.
    ordering_from_ranks(import_rank.rank_of);
    ordering_from_ranks(export_rank.rank_of);

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto entry_square = [&](Index i) {
        return std::max(import_rank.rank_of[static_cast<std::size_t>(i)],
                        export_rank.rank_of[static_cast<std::size_t>(i)]);
    };
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const int ka = entry_square(a);
        const int kb = entry_square(b);
        if (ka != kb) return ka < kb;
        return import_rank.rank_of[static_cast<std::size_t>(a)] <
               import_rank.rank_of[static_cast<std::size_t>(b)];
    });

    TwoDRankResult out;
    out.rank.by_rank = std::move(order);
    out.rank.rank_of.resize(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) {
        out.rank.rank_of[static_cast<std::size_t>(out.rank.by_rank[static_cast<std::size_t>(pos)])] =
            static_cast<int>(pos) + 1;
    }
    return out;
}

GpvmResult gpvm_ranks(const FlowTensor& tensor, double alpha, const SolveOptions& options) {
    const NodeSpace& nodes = tensor.nodes;
    const ValueTables tables = compute_values(tensor);

    StochasticMatrix s_import = build_stochastic(tensor, Direction::Import);
    StochasticMatrix s_export = build_stochastic(tensor, Direction::Export);

    GpvmResult result;
    {
        GoogleOperator op = make_google(std::move(s_import),
                                        first_personalization(tables, Direction::Import), alpha);
        result.first_pagerank = pagerank(op, nodes, Direction::Import, options);
        GoogleOperator second =
            make_google(std::move(op.transitions),
                        second_personalization(result.first_pagerank.sector_prob, nodes,
                                               Direction::Import),
                        alpha);
        result.pagerank = pagerank(second, nodes, Direction::Import, options);
    }
    {
        GoogleOperator op = make_google(std::move(s_export),
                                        first_personalization(tables, Direction::Export), alpha);
        result.first_cheirank = pagerank(op, nodes, Direction::Export, options);
        GoogleOperator second =
            make_google(std::move(op.transitions),
                        second_personalization(result.first_cheirank.sector_prob, nodes,
                                               Direction::Export),
                        alpha);
        result.cheirank = pagerank(second, nodes, Direction::Export, options);
    }
    result.node_k2 = two_d_rank(result.pagerank.node_rank, result.cheirank.node_rank);
    return result;
}

}  // namespace ioflow

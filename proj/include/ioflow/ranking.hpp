#pragma once

#include "ioflow/google.hpp"
#include "ioflow/ordering.hpp"

namespace ioflow {

struct SolveOptions {
    double tol = 1e-12;  // L1 change between iterates
    int max_iter = 1000;
};

/// Stationary probability vector with its orderings and country/sector
/// reductions. direction == Import is the PageRank side, Export the
/// CheiRank side.
struct RankResult {
    Direction direction = Direction::Import;
    Vector node_prob;      // P over nodes
    Ordering node_rank;    // K
    Vector country_prob;   // P_c
    Ordering country_rank; // K_c
    Vector sector_prob;    // P_s
    Ordering sector_rank;  // K_s
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration from the uniform start vector until the L1 change drops
/// below tol. Throws ConvergenceError (carrying the last residual) when
/// max_iter is exhausted.
RankResult pagerank(const GoogleOperator& op, const NodeSpace& nodes, Direction direction,
                    const SolveOptions& options = {});

/// Combined two-dimensional ordering: nodes sorted by the side length of the
/// smallest square [1..k] x [1..k] of the (K, K*) plane that contains them,
/// ties at equal k by smaller K. Inputs must be permutations of 1..N.
struct TwoDRankResult {
    Ordering rank;
};

TwoDRankResult two_d_rank(const Ordering& import_rank, const Ordering& export_rank);

/// Full two-iteration personalized pipeline: build S and S*, seed both sides
/// with the value-proportional personalization, solve, then resolve with the
/// sector-reduced personalization. The second-iteration results are the
/// reported ones; the first iteration is kept for diagnostics.
struct GpvmResult {
    RankResult pagerank;        // import side, second iteration
    RankResult cheirank;        // export side, second iteration
    TwoDRankResult node_k2;     // from second-iteration node orderings
    RankResult first_pagerank;  // first-iteration diagnostics
    RankResult first_cheirank;
};

GpvmResult gpvm_ranks(const FlowTensor& tensor, double alpha = 0.5,
                      const SolveOptions& options = {});

}  // namespace ioflow

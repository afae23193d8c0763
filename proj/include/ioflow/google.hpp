#pragma once

#include "ioflow/flow_tensor.hpp"
#include "ioflow/values.hpp"

#include <vector>

namespace ioflow {

/// Column-stochastic transition matrix over the node space. Columns with no
/// source value are not stored; they stand for the uniform 1/N column and
/// are flagged in `dangling`.
struct StochasticMatrix {
    SparseMatrix columns;              // explicit columns, each summing to 1
    std::vector<std::uint8_t> dangling;  // per-column flag

    Index size() const { return columns.cols(); }
    std::vector<Index> dangling_indices() const;
};

/// Normalize each column of the flow matrix (Import) or of its transpose
/// (Export) to unit sum. Zero columns become dangling markers. The
/// normalization divides by the column maximum before summing, so exact
/// rescaling of the input reproduces identical weights bit for bit.
StochasticMatrix build_stochastic(const FlowTensor& tensor, Direction direction);

enum class Stage { FirstIteration, SecondIteration };

/// Teleportation distribution: nonnegative, sums to one.
struct PersonalizationVector {
    Vector v;
    Stage stage = Stage::FirstIteration;
    Direction direction = Direction::Import;
};

/// Country-democratic, value-weighted teleportation: node (c, s) receives
/// value share within its own country divided by N_c, so every country with
/// any value carries block mass exactly 1/N_c. Countries with no value fall
/// back to the uniform in-country distribution 1/(N_c N_s).
PersonalizationVector first_personalization(const ValueTables& tables, Direction direction);

/// Sector-proportional teleportation from a sector probability vector:
/// node (c, s) receives sector_prob[s] / N_c, identical across countries.
/// Rejects sector_prob unless it sums to 1 within 1e-8.
PersonalizationVector second_personalization(const Vector& sector_prob, const NodeSpace& nodes,
                                             Direction direction);

/// alpha * S + (1 - alpha) * v * e^T, kept in factored form. Immutable after
/// construction and safe to share across threads.
struct GoogleOperator {
    StochasticMatrix transitions;
    Vector personalization;
    double alpha = 0.5;
};

/// Validates alpha in (0,1) exclusive, v nonnegative summing to 1, and a
/// consistent dimension.
GoogleOperator make_google(StochasticMatrix transitions, const PersonalizationVector& pers,
                           double alpha);

/// One Markov step: alpha * S x + (1 - alpha) * sum(x) * v, with the mass on
/// dangling columns spread uniformly. Preserves total probability.
Vector apply_google(const GoogleOperator& op, const Vector& x);

}  // namespace ioflow

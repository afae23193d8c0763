#include "ioflow/google.hpp"

#include <cmath>
#include <vector>

namespace ioflow {

std::vector<Index> StochasticMatrix::dangling_indices() const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j) {
        if (dangling[static_cast<std::size_t>(j)]) out.push_back(j);
    }
    return out;
}

StochasticMatrix build_stochastic(const FlowTensor& tensor, Direction direction) {
    const Index n = tensor.nodes.size();
    StochasticMatrix s;
    s.columns.resize(n, n);
    s.dangling.assign(static_cast<std::size_t>(n), 0);

    Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const Scalar value =
                direction == Direction::Import ? tensor.flows(i, j) : tensor.flows(j, i);
            if (value != 0.0) ++counts[j];
        }
    }
    s.columns.reserve(counts);

    Vector column(n);
    for (Index j = 0; j < n; ++j) {
        if (direction == Direction::Import) {
            column = tensor.flows.col(j);
        } else {
            column = tensor.flows.row(j).transpose();
        }
        const Scalar peak = column.maxCoeff();
        if (peak == 0.0) {
            s.dangling[static_cast<std::size_t>(j)] = 1;
            continue;
        }
        column /= peak;
        const Scalar norm = column.sum();
        for (Index i = 0; i < n; ++i) {
            if (column[i] != 0.0) {
                s.columns.insert(i, j) = column[i] / norm;
            }
        }
    }
    s.columns.makeCompressed();
    return s;
}

PersonalizationVector first_personalization(const ValueTables& tables, Direction direction) {
    const NodeSpace& nodes = tables.nodes;
    const Vector& value = direction == Direction::Import ? tables.import_value : tables.export_value;
    const Scalar nc = static_cast<Scalar>(nodes.n_countries);

    PersonalizationVector p;
    p.stage = Stage::FirstIteration;
    p.direction = direction;
    p.v = Vector::Zero(nodes.size());
    for (Index c = 0; c < nodes.n_countries; ++c) {
        const auto block = value.segment(c * nodes.n_sectors, nodes.n_sectors);
        const Scalar country_total = block.sum();
        if (country_total > 0.0) {
            p.v.segment(c * nodes.n_sectors, nodes.n_sectors) = block / (nc * country_total);
        } else {
            // No value anywhere in this country: keep its 1/N_c block mass
            // spread uniformly over its sectors.
            p.v.segment(c * nodes.n_sectors, nodes.n_sectors)
                .setConstant(1.0 / (nc * static_cast<Scalar>(nodes.n_sectors)));
        }
    }
    return p;
}

PersonalizationVector second_personalization(const Vector& sector_prob, const NodeSpace& nodes,
                                             Direction direction) {
    if (sector_prob.size() != nodes.n_sectors) {
        throw Error("sector probability vector has wrong length");
    }
    if (sector_prob.minCoeff() < 0.0 || std::abs(sector_prob.sum() - 1.0) > 1e-8) {
        throw Error("sector probability vector is not normalized");
    }
    PersonalizationVector p;
    p.stage = Stage::SecondIteration;
    p.direction = direction;
    p.v = Vector::Zero(nodes.size());
    const Scalar nc = static_cast<Scalar>(nodes.n_countries);
    for (Index c = 0; c < nodes.n_countries; ++c) {
        p.v.segment(c * nodes.n_sectors, nodes.n_sectors) = sector_prob / nc;
    }
    return p;
}

GoogleOperator make_google(StochasticMatrix transitions, const PersonalizationVector& pers,
                           double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error("damping factor must lie strictly inside (0,1)");
    }
    if (pers.v.size() != transitions.size()) {
        throw Error("personalization vector dimension mismatch");
    }
    if (pers.v.minCoeff() < 0.0 || std::abs(pers.v.sum() - 1.0) > 1e-10) {
        throw Error("personalization vector is not a probability distribution");
    }
    GoogleOperator op;
    op.transitions = std::move(transitions);
    op.personalization = pers.v;
    op.alpha = alpha;
    return op;
}

Vector apply_google(const GoogleOperator& op, const Vector& x) {
    const Index n = op.transitions.size();
    if (x.size() != n) throw Error("probability vector dimension mismatch");

    Vector y = op.alpha * (op.transitions.columns * x);

    Scalar dangling_mass = 0.0;
    for (Index j = 0; j < n; ++j) {
        if (op.transitions.dangling[static_cast<std::size_t>(j)]) dangling_mass += x[j];
    }
    if (dangling_mass != 0.0) {
        y.array() += op.alpha * dangling_mass / static_cast<Scalar>(n);
    }
    y += (1.0 - op.alpha) * x.sum() * op.personalization;
    return y;
}

}  // namespace ioflow

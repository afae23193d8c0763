#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace ioflow {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;
using Index = Eigen::Index;

/// Base error for all library failures.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input-data error carrying the offending line number (1-based, 0 = unknown).
struct ParseError : Error {
    ParseError(const std::string& what, long line_number = 0)
        : Error(line_number > 0 ? what + " (line " + std::to_string(line_number) + ")" : what),
          line(line_number) {}
    long line;
};

/// Power iteration failed to reach the requested tolerance.
struct ConvergenceError : Error {
    ConvergenceError(double last_residual, int iterations_run)
        : Error("power iteration did not converge after " + std::to_string(iterations_run) +
                " iterations, last L1 residual " + std::to_string(last_residual)),
          residual(last_residual),
          iterations(iterations_run) {}
    double residual;
    int iterations;
};

/// Flattened country x sector node index space.
///
/// Internal ids are zero-based, i = c * n_sectors + s. External reports use
/// the one-based convention i + 1, which equals s1 + (c1 - 1) * n_sectors for
/// one-based country/sector indexes.
struct NodeSpace {
    Index n_countries = 0;
    Index n_sectors = 0;

    Index size() const { return n_countries * n_sectors; }
    Index node(Index country, Index sector) const { return country * n_sectors + sector; }
    Index country_of(Index node) const { return node / n_sectors; }
    Index sector_of(Index node) const { return node % n_sectors; }

    bool operator==(const NodeSpace&) const = default;
};

/// Import = ranks over flows as stored (PageRank side);
/// Export = ranks over inverted flows (CheiRank side).
enum class Direction { Import, Export };

/// Whether country probabilities come from the rank pipeline or directly
/// from normalized exchange values.
enum class Basis { Gpvm, Value };

enum class Axis { Country, Sector };

inline const char* to_string(Direction d) { return d == Direction::Import ? "import" : "export"; }
inline const char* to_string(Basis b) { return b == Basis::Gpvm ? "gpvm" : "value"; }

}  // namespace ioflow

#pragma once

#include "ioflow/balance.hpp"
#include "ioflow/flow_tensor.hpp"
#include "ioflow/ranking.hpp"

#include <optional>
#include <vector>

namespace ioflow {

/// Multiplicative perturbation of all flows leaving a source sector
/// (SectorPrice), a source country (CountryLabor), or a set of source
/// countries (GroupLabor). Magnitude must stay above -1 so flows remain
/// nonnegative.
struct ShockSpec {
    enum class Kind { SectorPrice, CountryLabor, GroupLabor };

    Kind kind = Kind::SectorPrice;
    Index sector = -1;                  // SectorPrice target
    std::vector<Index> countries;       // CountryLabor (one) / GroupLabor (set)
    double magnitude = 0.0;

    static ShockSpec sector_price(Index sector, double magnitude);
    static ShockSpec country_labor(Index country, double magnitude);
    static ShockSpec group_labor(std::vector<Index> countries, double magnitude);

    ShockSpec with_magnitude(double m) const;
};

/// Scale every column whose source node matches the shock target by
/// (1 + magnitude); every affected entry is multiplied exactly once.
FlowTensor apply_shock(FlowTensor tensor, const ShockSpec& shock);

/// Country balances of a tensor under the chosen basis. Gpvm runs the full
/// two-iteration rank pipeline; Value uses the normalized exchange values
/// directly.
BalanceVector balance_of_tensor(const FlowTensor& tensor, Basis basis, double alpha = 0.5,
                                const SolveOptions& options = {});

struct DerivativeOptions {
    Basis basis = Basis::Gpvm;
    double step = 1e-5;           // finite-difference h
    double alpha = 0.5;
    SolveOptions solve;
    bool check_linearity = true;  // compare against step / 10
};

/// Central-difference derivative of every country balance with respect to
/// the shock magnitude. Each evaluation re-runs the whole pipeline on the
/// shocked tensor. For group shocks `group_derivative` differentiates the
/// balance of the group treated as one aggregate economy.
struct SensitivityMap {
    Vector derivative;                       // dB per country
    ShockSpec shock;                         // target; magnitude unused
    double step = 0.0;
    Basis basis = Basis::Gpvm;
    std::optional<double> group_derivative;
    std::optional<double> linearity_error;   // max relative h vs h/10 disagreement
    bool linearity_ok = true;                // false -> warning, never fatal
    int max_iterations = 0;                  // worst solve across evaluations
    double max_residual = 0.0;
};

SensitivityMap balance_derivative(const FlowTensor& tensor, const ShockSpec& target,
                                  const DerivativeOptions& options = {});

/// Run several targets with a worker pool; results are returned in target
/// order regardless of scheduling, and each evaluation is independent, so
/// output is identical for any thread count.
std::vector<SensitivityMap> run_sweep(const FlowTensor& tensor,
                                      const std::vector<ShockSpec>& targets,
                                      const DerivativeOptions& options, int threads = 1);

}  // namespace ioflow

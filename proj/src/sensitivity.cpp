#include "ioflow/sensitivity.hpp"

#include "ioflow/values.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ioflow {

namespace {

void validate_shock(const ShockSpec& shock) {
    if (!(shock.magnitude > -1.0)) {
        throw Error("shock magnitude must be greater than -1");
    }
    switch (shock.kind) {
        case ShockSpec::Kind::SectorPrice:
            if (shock.sector < 0) throw Error("sector shock needs a sector target");
            break;
        case ShockSpec::Kind::CountryLabor:
            if (shock.countries.size() != 1) throw Error("labor shock needs one country target");
            break;
        case ShockSpec::Kind::GroupLabor:
            if (shock.countries.empty()) throw Error("group shock needs a non-empty country set");
            break;
    }
}

}  // namespace

ShockSpec ShockSpec::sector_price(Index sector, double magnitude) {
    ShockSpec s;
    s.kind = Kind::SectorPrice;
    s.sector = sector;
    s.magnitude = magnitude;
    validate_shock(s);
    return s;
}

ShockSpec ShockSpec::country_labor(Index country, double magnitude) {
    ShockSpec s;
    s.kind = Kind::CountryLabor;
    s.countries = {country};
    s.magnitude = magnitude;
    validate_shock(s);
    return s;
}

ShockSpec ShockSpec::group_labor(std::vector<Index> countries, double magnitude) {
    ShockSpec s;
    s.kind = Kind::GroupLabor;
    std::sort(countries.begin(), countries.end());
    countries.erase(std::unique(countries.begin(), countries.end()), countries.end());
    s.countries = std::move(countries);
    s.magnitude = magnitude;
    validate_shock(s);
    return s;
}

ShockSpec ShockSpec::with_magnitude(double m) const {
    ShockSpec s = *this;
    s.magnitude = m;
    validate_shock(s);
    return s;
}

FlowTensor apply_shock(FlowTensor tensor, const ShockSpec& shock) {
    validate_shock(shock);
    const NodeSpace& nodes = tensor.nodes;
    const Scalar factor = 1.0 + shock.magnitude;

    if (shock.kind == ShockSpec::Kind::SectorPrice) {
        if (shock.sector >= nodes.n_sectors) throw Error("sector index out of range");
        if (shock.magnitude == 0.0) return tensor;
        // Source columns with sector s are spaced N_s apart.
        for (Index c = 0; c < nodes.n_countries; ++c) {
            tensor.flows.col(nodes.node(c, shock.sector)) *= factor;
        }
        return tensor;
    }

    for (Index c : shock.countries) {
        if (c < 0 || c >= nodes.n_countries) throw Error("country index out of range");
    }
    if (shock.magnitude == 0.0) return tensor;
    for (Index c : shock.countries) {
        tensor.flows.middleCols(c * nodes.n_sectors, nodes.n_sectors) *= factor;
    }
    return tensor;
}

namespace {

struct CountrySides {
    Vector import_prob;  // P_c
    Vector export_prob;  // P*_c
    int max_iterations = 0;
    double max_residual = 0.0;
};

CountrySides country_sides(const FlowTensor& tensor, Basis basis, double alpha,
                           const SolveOptions& options) {
    CountrySides sides;
    if (basis == Basis::Value) {
        const ValueTables tables = compute_values(tensor);
        sides.import_prob = reduce(tables.import_prob, tensor.nodes, Axis::Country);
        sides.export_prob = reduce(tables.export_prob, tensor.nodes, Axis::Country);
        return sides;
    }
    const GpvmResult ranks = gpvm_ranks(tensor, alpha, options);
    sides.import_prob = ranks.pagerank.country_prob;
    sides.export_prob = ranks.cheirank.country_prob;
    for (const RankResult* r :
         {&ranks.pagerank, &ranks.cheirank, &ranks.first_pagerank, &ranks.first_cheirank}) {
        sides.max_iterations = std::max(sides.max_iterations, r->iterations);
        sides.max_residual = std::max(sides.max_residual, r->residual);
    }
    return sides;
}

Scalar aggregate_balance(const CountrySides& sides, const std::vector<Index>& members) {
    Scalar p = 0.0;
    Scalar p_star = 0.0;
    for (Index c : members) {
        p += sides.import_prob[c];
        p_star += sides.export_prob[c];
    }
    const Scalar denom = p_star + p;
    return denom > 0.0 ? (p_star - p) / denom : 0.0;
}

struct DiffResult {
    Vector derivative;
    std::optional<double> group_derivative;
};

DiffResult central_difference(const FlowTensor& tensor, const ShockSpec& target, double h,
                              const DerivativeOptions& options, CountrySides& stats_sink) {
    const CountrySides plus =
        country_sides(apply_shock(tensor, target.with_magnitude(h)), options.basis, options.alpha,
                      options.solve);
    const CountrySides minus =
        country_sides(apply_shock(tensor, target.with_magnitude(-h)), options.basis, options.alpha,
                      options.solve);
    stats_sink.max_iterations =
        std::max({stats_sink.max_iterations, plus.max_iterations, minus.max_iterations});
    stats_sink.max_residual =
        std::max({stats_sink.max_residual, plus.max_residual, minus.max_residual});

    DiffResult out;
    const Vector b_plus = balance(plus.import_prob, plus.export_prob, options.basis).values;
    const Vector b_minus = balance(minus.import_prob, minus.export_prob, options.basis).values;
    out.derivative = (b_plus - b_minus) / (2.0 * h);
    if (target.kind == ShockSpec::Kind::GroupLabor) {
        out.group_derivative = (aggregate_balance(plus, target.countries) -
                                aggregate_balance(minus, target.countries)) /
                               (2.0 * h);
    }
    return out;
}

}  // namespace

BalanceVector balance_of_tensor(const FlowTensor& tensor, Basis basis, double alpha,
                                const SolveOptions& options) {
    const CountrySides sides = country_sides(tensor, basis, alpha, options);
    return balance(sides.import_prob, sides.export_prob, basis);
}

SensitivityMap balance_derivative(const FlowTensor& tensor, const ShockSpec& target,
                                  const DerivativeOptions& options) {
    if (options.step <= 0.0) throw Error("finite-difference step must be positive");
    validate_shock(target.with_magnitude(0.0));

    // Fail fast when the unshocked pipeline itself cannot run.
    CountrySides stats =
        country_sides(tensor, options.basis, options.alpha, options.solve);

    SensitivityMap map;
    map.shock = target.with_magnitude(0.0);
    map.step = options.step;
    map.basis = options.basis;

    const DiffResult at_h = central_difference(tensor, target, options.step, options, stats);
    map.derivative = at_h.derivative;
    map.group_derivative = at_h.group_derivative;

    if (options.check_linearity) {
        const DiffResult refined =
            central_difference(tensor, target, options.step / 10.0, options, stats);
        double worst = 0.0;
        for (Index c = 0; c < map.derivative.size(); ++c) {
            const double scale = std::max(std::abs(map.derivative[c]), 1e-6);
            worst = std::max(worst, std::abs(map.derivative[c] - refined.derivative[c]) / scale);
        }
        map.linearity_error = worst;
        map.linearity_ok = worst <= 1e-2;
    }

    map.max_iterations = stats.max_iterations;
    map.max_residual = stats.max_residual;
    return map;
}

std::vector<SensitivityMap> run_sweep(const FlowTensor& tensor,
                                      const std::vector<ShockSpec>& targets,
                                      const DerivativeOptions& options, int threads) {
    std::vector<SensitivityMap> results(targets.size());
    if (targets.empty()) return results;

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(targets.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            results[i] = balance_derivative(tensor, targets[i], options);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= targets.size()) return;
            try {
                results[i] = balance_derivative(tensor, targets[i], options);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace ioflow

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "toy_support.hpp"

#include <cmath>
#include <random>

using namespace ioflow;

namespace {

/// Cross-country toy with several suppliers per node so that country-wide
/// shocks are visible to the rank pipeline.
FlowTensor dense_toy(std::mt19937& rng, Index nc = 4, Index ns = 3) {
    toy::TensorOptions opt;
    opt.density = 0.7;
    return toy::random_tensor(rng, nc, ns, opt);
}

Vector value_country_import(const FlowTensor& t) {
    return reduce(compute_values(t).import_prob, t.nodes, Axis::Country);
}

Vector value_country_export(const FlowTensor& t) {
    return reduce(compute_values(t).export_prob, t.nodes, Axis::Country);
}

}  // namespace

TEST_CASE("balance") {
    SUBCASE("equal sides cancel") {
        const Vector p = Vector::Constant(4, 0.25);
        const BalanceVector b = balance(p, p, Basis::Gpvm);
        CHECK(b.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("matches the elementwise formula") {
        std::mt19937 rng(89);
        const Vector p = toy::random_probability(rng, 6);
        const Vector p_star = toy::random_probability(rng, 6);
        const BalanceVector b = balance(p, p_star, Basis::Value);
        for (Index c = 0; c < 6; ++c) {
            const double expected = (p_star[c] - p[c]) / (p_star[c] + p[c]);
            CHECK(b.values[c] == doctest::Approx(expected).epsilon(1e-14));
            CHECK(b.values[c] >= -1.0);
            CHECK(b.values[c] <= 1.0);
        }
    }
    SUBCASE("zero-mass country gets zero by convention") {
        Vector p = Vector::Zero(3);
        Vector p_star = Vector::Zero(3);
        p[0] = p_star[0] = 0.5;
        p[1] = p_star[1] = 0.5;
        const BalanceVector b = balance(p, p_star, Basis::Gpvm);
        CHECK(b.values[2] == 0.0);
    }
    SUBCASE("weighted sum identity") {
        std::mt19937 rng(97);
        for (int round = 0; round < 10; ++round) {
            const Vector p = toy::random_probability(rng, 8);
            const Vector p_star = toy::random_probability(rng, 8);
            const BalanceVector b = balance(p, p_star, Basis::Gpvm);
            double weighted = 0.0;
            for (Index c = 0; c < 8; ++c) weighted += b.values[c] * (p[c] + p_star[c]);
            CHECK(std::abs(weighted) <= 1e-10);
        }
    }
    SUBCASE("unnormalized inputs rejected") {
        const Vector p = Vector::Constant(4, 0.3);
        CHECK_THROWS_AS(balance(p, p, Basis::Gpvm), Error);
    }
}

TEST_CASE("apply_shock") {
    std::mt19937 rng(101);
    const FlowTensor t = dense_toy(rng);

    SUBCASE("zero magnitude changes nothing") {
        CHECK(apply_shock(t, ShockSpec::sector_price(1, 0.0)).flows == t.flows);
        CHECK(apply_shock(t, ShockSpec::country_labor(2, 0.0)).flows == t.flows);
    }
    SUBCASE("sector shock scales exactly the source-sector columns") {
        const double delta = 0.25;
        const FlowTensor shocked = apply_shock(t, ShockSpec::sector_price(1, delta));
        for (Index dst = 0; dst < t.nodes.size(); ++dst)
            for (Index src = 0; src < t.nodes.size(); ++src) {
                const double expected = t.nodes.sector_of(src) == 1
                                            ? t.flows(dst, src) * (1.0 + delta)
                                            : t.flows(dst, src);
                CHECK(shocked.flows(dst, src) == expected);
            }
    }
    SUBCASE("labor shock scales exactly the source-country columns") {
        const double sigma = -0.5;
        const FlowTensor shocked = apply_shock(t, ShockSpec::country_labor(2, sigma));
        for (Index dst = 0; dst < t.nodes.size(); ++dst)
            for (Index src = 0; src < t.nodes.size(); ++src) {
                const double expected = t.nodes.country_of(src) == 2
                                            ? t.flows(dst, src) * (1.0 + sigma)
                                            : t.flows(dst, src);
                CHECK(shocked.flows(dst, src) == expected);
            }
    }
    SUBCASE("sector with no outgoing flows is a no-op") {
        FlowTensor quiet = t;
        for (Index c = 0; c < quiet.nodes.n_countries; ++c) {
            quiet.flows.col(quiet.nodes.node(c, 0)).setZero();
        }
        const FlowTensor shocked = apply_shock(quiet, ShockSpec::sector_price(0, 0.3));
        CHECK(shocked.flows == quiet.flows);
    }
    SUBCASE("group shock equals sequential country shocks") {
        const double sigma = 0.1;
        const FlowTensor grouped = apply_shock(t, ShockSpec::group_labor({0, 3}, sigma));
        FlowTensor sequential = apply_shock(t, ShockSpec::country_labor(0, sigma));
        sequential = apply_shock(sequential, ShockSpec::country_labor(3, sigma));
        CHECK(grouped.flows == sequential.flows);
    }
    SUBCASE("invalid targets and magnitudes rejected") {
        CHECK_THROWS_AS(apply_shock(t, ShockSpec::sector_price(99, 0.1)), Error);
        CHECK_THROWS_AS(apply_shock(t, ShockSpec::country_labor(99, 0.1)), Error);
        CHECK_THROWS_AS(ShockSpec::sector_price(1, -1.0), Error);
        CHECK_THROWS_AS(ShockSpec::group_labor({}, 0.1), Error);
    }
}

TEST_CASE("balance_of_tensor value basis equals the direct construction") {
    std::mt19937 rng(103);
    const FlowTensor t = dense_toy(rng);
    const BalanceVector b = balance_of_tensor(t, Basis::Value);
    const BalanceVector expected =
        balance(value_country_import(t), value_country_export(t), Basis::Value);
    CHECK(b.values == expected.values);
}

TEST_CASE("balance_derivative") {
    std::mt19937 rng(107);
    const FlowTensor t = dense_toy(rng);

    SUBCASE("null-support shock has an exactly zero derivative") {
        FlowTensor quiet = t;
        for (Index c = 0; c < quiet.nodes.n_countries; ++c) {
            quiet.flows.col(quiet.nodes.node(c, 2)).setZero();
        }
        for (Basis basis : {Basis::Gpvm, Basis::Value}) {
            DerivativeOptions opt;
            opt.basis = basis;
            const SensitivityMap map =
                balance_derivative(quiet, ShockSpec::sector_price(2, 0.0), opt);
            CHECK(map.derivative.cwiseAbs().maxCoeff() == 0.0);
        }
    }

    SUBCASE("central difference agrees with one-sided difference at h/10") {
        DerivativeOptions opt;
        opt.check_linearity = false;
        const ShockSpec target = ShockSpec::country_labor(1, 0.0);
        const SensitivityMap map = balance_derivative(t, target, opt);

        const double h10 = opt.step / 10.0;
        const Vector base = balance_of_tensor(t, Basis::Gpvm).values;
        const Vector bumped =
            balance_of_tensor(apply_shock(t, target.with_magnitude(h10)), Basis::Gpvm).values;
        const Vector one_sided = (bumped - base) / h10;
        for (Index c = 0; c < map.derivative.size(); ++c) {
            const double scale = std::max(std::abs(map.derivative[c]), 1e-6);
            CHECK(std::abs(map.derivative[c] - one_sided[c]) / scale <= 1e-3);
        }
    }

    SUBCASE("step refinement stays within one percent") {
        for (Basis basis : {Basis::Gpvm, Basis::Value}) {
            DerivativeOptions opt;
            opt.basis = basis;
            const SensitivityMap map = balance_derivative(t, ShockSpec::sector_price(0, 0.0), opt);
            REQUIRE(map.linearity_error.has_value());
            CHECK(*map.linearity_error <= 1e-2);
            CHECK(map.linearity_ok);
        }
    }

    SUBCASE("singleton group equals the country shock bit for bit") {
        DerivativeOptions opt;
        opt.check_linearity = false;
        const SensitivityMap group =
            balance_derivative(t, ShockSpec::group_labor({2}, 0.0), opt);
        const SensitivityMap country =
            balance_derivative(t, ShockSpec::country_labor(2, 0.0), opt);
        CHECK(group.derivative == country.derivative);
        REQUIRE(group.group_derivative.has_value());
        CHECK(*group.group_derivative == group.derivative[2]);
    }

    SUBCASE("probability perturbations are zero-sum") {
        const double h = 1e-5;
        const ShockSpec target = ShockSpec::sector_price(1, 0.0);
        for (Basis basis : {Basis::Gpvm, Basis::Value}) {
            Vector plus_imp, plus_exp, minus_imp, minus_exp;
            const FlowTensor up = apply_shock(t, target.with_magnitude(h));
            const FlowTensor down = apply_shock(t, target.with_magnitude(-h));
            if (basis == Basis::Gpvm) {
                const GpvmResult a = gpvm_ranks(up);
                const GpvmResult b = gpvm_ranks(down);
                plus_imp = a.pagerank.country_prob;
                plus_exp = a.cheirank.country_prob;
                minus_imp = b.pagerank.country_prob;
                minus_exp = b.cheirank.country_prob;
            } else {
                plus_imp = value_country_import(up);
                plus_exp = value_country_export(up);
                minus_imp = value_country_import(down);
                minus_exp = value_country_export(down);
            }
            const double numerator_sum =
                (((plus_exp - plus_imp) - (minus_exp - minus_imp)) / (2.0 * h)).sum();
            CHECK(std::abs(numerator_sum) <= 1e-8);
        }
    }

    SUBCASE("shocked balances stay inside [-1, 1]") {
        const FlowTensor shocked = apply_shock(t, ShockSpec::country_labor(0, 0.9));
        for (Basis basis : {Basis::Gpvm, Basis::Value}) {
            const BalanceVector b = balance_of_tensor(shocked, basis);
            CHECK(b.values.minCoeff() >= -1.0);
            CHECK(b.values.maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("run_sweep is deterministic across thread counts") {
    std::mt19937 rng(109);
    const FlowTensor t = dense_toy(rng);
    DerivativeOptions opt;
    opt.check_linearity = false;
    std::vector<ShockSpec> targets;
    for (Index s = 0; s < t.nodes.n_sectors; ++s) {
        targets.push_back(ShockSpec::sector_price(s, 0.0));
    }
    const auto serial = run_sweep(t, targets, opt, 1);
    const auto parallel = run_sweep(t, targets, opt, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].derivative == parallel[i].derivative);
    }
}

TEST_CASE("balance_delta") {
    std::mt19937 rng(113);
    const FlowTensor a = dense_toy(rng);

    SUBCASE("identical datasets difference to zero") {
        const BalanceVector b = balance_of_tensor(a, Basis::Gpvm);
        CHECK(balance_delta(b, b).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("matches two independent runs") {
        FlowTensor later = a;
        later.flows *= 1.5;
        later.flows(later.nodes.node(0, 0), later.nodes.node(1, 1)) += 37.0;
        const BalanceVector b_early = balance_of_tensor(a, Basis::Gpvm);
        const BalanceVector b_late = balance_of_tensor(later, Basis::Gpvm);
        const Vector delta = balance_delta(b_early, b_late);
        for (Index c = 0; c < delta.size(); ++c) {
            CHECK(delta[c] == b_late.values[c] - b_early.values[c]);
        }
    }
    SUBCASE("length mismatch rejected") {
        BalanceVector b4;
        b4.values = Vector::Zero(4);
        BalanceVector b5;
        b5.values = Vector::Zero(5);
        CHECK_THROWS_AS(balance_delta(b4, b5), Error);
    }
}

#include "ioflow/balance.hpp"

#include <cmath>

namespace ioflow {

BalanceVector balance(const Vector& country_import_prob, const Vector& country_export_prob,
                      Basis basis) {
    if (country_import_prob.size() != country_export_prob.size()) {
        throw Error("reduced probability vectors have different lengths");
    }
    if (std::abs(country_import_prob.sum() - 1.0) > 1e-8 ||
        std::abs(country_export_prob.sum() - 1.0) > 1e-8) {
        throw Error("reduced probability vectors must each sum to 1");
    }
    BalanceVector b;
    b.basis = basis;
    b.values = Vector::Zero(country_import_prob.size());
    for (Index c = 0; c < b.values.size(); ++c) {
        const Scalar p = country_import_prob[c];
        const Scalar p_star = country_export_prob[c];
        const Scalar denom = p_star + p;
        b.values[c] = denom > 0.0 ? (p_star - p) / denom : 0.0;
    }
    return b;
}

Vector balance_delta(const BalanceVector& earlier, const BalanceVector& later) {
    if (earlier.values.size() != later.values.size()) {
        throw Error("balance vectors have different lengths");
    }
    return later.values - earlier.values;
}

}  // namespace ioflow

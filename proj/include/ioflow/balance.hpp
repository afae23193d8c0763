#pragma once

#include "ioflow/types.hpp"

namespace ioflow {

/// Per-country export-import asymmetry (P*_c - P_c) / (P*_c + P_c), in
/// [-1, 1]. Countries with no probability mass on either side get 0.
struct BalanceVector {
    Vector values;
    Basis basis = Basis::Gpvm;
};

/// Both reduced vectors must each sum to 1 (within 1e-8).
BalanceVector balance(const Vector& country_import_prob, const Vector& country_export_prob,
                      Basis basis);

/// Elementwise B_later - B_earlier; lengths must match.
Vector balance_delta(const BalanceVector& earlier, const BalanceVector& later);

}  // namespace ioflow

#pragma once

#include <optional>
#include <string>

#include "qtwist/arith.hpp"

namespace qtwist {

// Coefficient tables persist as binary files: magic "CTB1", then
// a1..a6, q, n_max as little-endian int64, then n_max little-endian
// int64 a_n values.  Keyed by (a1..a6, q, n_max).

std::string coefficient_cache_name(const WeierstrassCurve& curve, i64 n_max);

// Loads a cached table with n_max >= requested (prefers the exact key,
// otherwise scans the directory for a superset table of the same curve).
std::optional<CoefficientTable> load_coefficient_cache(const std::string& dir,
                                                       const WeierstrassCurve& curve,
                                                       i64 n_max);

void save_coefficient_cache(const std::string& dir, const WeierstrassCurve& curve,
                            const CoefficientTable& table);

}  // namespace qtwist

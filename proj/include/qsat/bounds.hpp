#pragma once

#include <cstddef>
#include <cstdint>

namespace qsat {

/// Computable bounds on f(k) (classical) and f*(k) (rank-1 quantum). The
/// values of f and f* themselves are unknown; "lower" fields are proven lower
/// bounds and gebauer_upper_estimate omits an unknown 1 + O(1/sqrt k) factor,
/// so it is an estimate, not a bound.
struct BoundReport {
  std::size_t k = 0;
  std::uint64_t qlll_lower = 0;      // floor(2^k / (e k)) <= f*(k) <= f(k)
  std::uint64_t gebauer_lower = 0;   // floor(2^(k+1) / (e (k+1))) <= f(k)
  double gebauer_upper_estimate = 0.0;  // 2^(k+1) / (e k)
  std::uint64_t tovey_lower = 0;     // k <= f(k)
};

inline constexpr std::size_t kMaxBoundK = 60;

/// Throws ArgumentError for k < 1 or k > kMaxBoundK.
BoundReport bound_report(std::size_t k);

/// Degree of the reduced instance is governed by f*(k) + 2 rather than the
/// encoded source degree 510 once the proven lower bound already clears it:
/// qlll_lower(k) + 2 > 510.
bool threshold_check(std::size_t k);

}  // namespace qsat

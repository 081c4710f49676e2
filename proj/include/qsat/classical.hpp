#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qsat/instance.hpp"

namespace qsat {

inline constexpr std::size_t kMaxBruteForceVars = 24;
inline constexpr std::size_t kMaxSignVariantLiterals = 20;

struct BruteForceResult {
  bool satisfiable = false;
  std::optional<std::vector<bool>> witness;
};

/// Exhaustive search over all 2^num_vars assignments.
BruteForceResult brute_force_sat(const CnfFormula& formula);

struct SignVariantResult {
  bool all_satisfiable = true;
  std::size_t variants_checked = 0;
  std::optional<CnfFormula> counterexample;
};

/// Enumerates every assignment of signs to the formula's literals (same
/// structure, 2^(total literals) variants) and brute-forces each one.
SignVariantResult all_sign_variants_satisfiable(const CnfFormula& structure);

/// Each clause becomes the projector onto its unique violating assignment.
QsatInstance cnf_to_qsat(const CnfFormula& formula, double promise_gap = kDefaultPromiseGap);

}  // namespace qsat

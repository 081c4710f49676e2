#include "qsat/classical.hpp"

#include <string>

#include "qsat/errors.hpp"

namespace qsat {

namespace {

void check_clause_vars(const CnfFormula& formula) {
  for (const auto& clause : formula.clauses) {
    for (std::size_t i = 0; i < clause.size(); ++i) {
      if (clause[i].var >= formula.num_vars) throw ValidationError("clause variable out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (clause[j].var == clause[i].var) throw ValidationError("clause repeats a variable");
      }
    }
  }
}

}  // namespace

BruteForceResult brute_force_sat(const CnfFormula& formula) {
  if (formula.num_vars > kMaxBruteForceVars) {
    throw CapacityError("brute_force_sat handles at most " + std::to_string(kMaxBruteForceVars) +
                        " variables");
  }
  check_clause_vars(formula);
  const std::uint32_t count = std::uint32_t{1} << formula.num_vars;
  for (std::uint32_t assignment = 0; assignment < count; ++assignment) {
    bool all = true;
    for (const auto& clause : formula.clauses) {
      bool any = false;
      for (const auto& lit : clause) {
        if ((((assignment >> lit.var) & 1U) != 0) == lit.positive) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) {
      std::vector<bool> witness(formula.num_vars);
      for (std::size_t v = 0; v < formula.num_vars; ++v) witness[v] = (assignment >> v) & 1U;
      return {true, std::move(witness)};
    }
  }
  return {false, std::nullopt};
}

SignVariantResult all_sign_variants_satisfiable(const CnfFormula& structure) {
  std::size_t literals = 0;
  for (const auto& clause : structure.clauses) literals += clause.size();
  if (literals > kMaxSignVariantLiterals) {
    throw CapacityError("sign-variant enumeration handles at most " +
                        std::to_string(kMaxSignVariantLiterals) + " literals");
  }
  SignVariantResult result;
  CnfFormula variant = structure;
  for (std::uint32_t signs = 0; signs < (std::uint32_t{1} << literals); ++signs) {
    std::size_t bit = 0;
    for (auto& clause : variant.clauses) {
      for (auto& lit : clause) lit.positive = ((signs >> bit++) & 1U) == 0;
    }
    ++result.variants_checked;
    if (!brute_force_sat(variant).satisfiable) {
      result.all_satisfiable = false;
      result.counterexample = variant;
      return result;
    }
  }
  return result;
}

QsatInstance cnf_to_qsat(const CnfFormula& formula, double promise_gap) {
  check_clause_vars(formula);
  QsatInstance out{formula.num_vars, {}, promise_gap};
  for (const auto& clause : formula.clauses) {
    Support support;
    std::string bits;
    for (const auto& lit : clause) {
      support.push_back(lit.var);
      bits.push_back(lit.positive ? '0' : '1');
    }
    out.terms.emplace_back(basis_term(std::move(support), bits));
  }
  return out;
}

}  // namespace qsat

#include "qsat/ensembles.hpp"

#include <cmath>

#include "qsat/errors.hpp"

namespace qsat {

RankOneTerm haar_random_term(const Support& support, CounterRng& rng) {
  RankOneTerm term{support, Eigen::VectorXcd(Eigen::Index{1} << support.size())};
  for (Eigen::Index i = 0; i < term.amplitudes.size(); ++i) term.amplitudes(i) = rng.complex_normal();
  term.amplitudes.normalize();
  return term;
}

QsatInstance sample_instance(const Structure& structure, std::uint64_t seed, std::uint64_t trial) {
  CounterRng rng(trial_stream_key(seed, trial));
  QsatInstance instance{structure.num_sites, {}, kDefaultPromiseGap};
  for (const auto& support : structure.supports) {
    instance.terms.emplace_back(haar_random_term(support, rng));
  }
  return instance;
}

EnsembleResult sample_ensemble(const Structure& structure, std::size_t trials, std::uint64_t seed,
                               const SolverOptions& options) {
  if (trials < 1) throw ArgumentError("sample_ensemble needs at least one trial");
  EnsembleResult result;
  result.trials = trials;
  result.seed = seed;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SatVerdict verdict = decide_sat(sample_instance(structure, seed, trial), options);
    result.lambda0.push_back(verdict.lambda0);
    switch (verdict.tag) {
      case Verdict::kSatisfiable: ++result.sat_count; break;
      case Verdict::kUnsatisfiable: ++result.unsat_count; break;
      case Verdict::kIndeterminate: ++result.indeterminate_count; break;
    }
  }
  return result;
}

RankOneTerm singlet_term(QubitIndex a, QubitIndex b) {
  const double h = 1.0 / std::sqrt(2.0);
  return make_term({a, b}, {0.0, h, -h, 0.0});
}

FigureInstances figure_instances() {
  FigureInstances f;
  f.classical = make_instance(3, {basis_term({0, 1}, "10"), basis_term({1, 2}, "11"),
                                  basis_term({0, 2}, "01"), basis_term({0, 2}, "10")});
  f.entangled = make_instance(3, {singlet_term(0, 1), singlet_term(1, 2), basis_term({0, 2}, "00"),
                                  basis_term({0, 2}, "11")});
  return f;
}

CnfFormula figure_a_cnf() {
  return CnfFormula{3,
                    {{{0, true}, {1, true}},
                     {{1, true}, {2, true}},
                     {{0, true}, {2, true}},
                     {{0, true}, {2, true}}}};
}

Structure triangle_double_structure() { return Structure{3, {{0, 1}, {1, 2}, {0, 2}, {0, 2}}}; }

}  // namespace qsat

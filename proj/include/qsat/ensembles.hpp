#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsat/instance.hpp"
#include "qsat/random.hpp"
#include "qsat/spectral.hpp"

namespace qsat {

/// Haar-uniform unit vector on the support: independent standard complex
/// Gaussians, normalized.
RankOneTerm haar_random_term(const Support& support, CounterRng& rng);

struct EnsembleResult {
  std::size_t trials = 0;
  std::size_t unsat_count = 0;
  std::size_t sat_count = 0;
  std::size_t indeterminate_count = 0;
  std::uint64_t seed = 0;
  /// lambda0 of each trial, in trial order.
  std::vector<double> lambda0;
};

/// Draws one Haar-random instance with the given structure from the stream
/// of `trial` (key seed ^ trial; terms drawn in support order).
QsatInstance sample_instance(const Structure& structure, std::uint64_t seed, std::uint64_t trial);

/// Samples `trials` instances over the structure's supports (taken in the
/// given order) and tallies their verdicts. Indeterminate verdicts are
/// counted, never coerced.
EnsembleResult sample_ensemble(const Structure& structure, std::size_t trials, std::uint64_t seed,
                               const SolverOptions& options = {});

struct FigureInstances {
  QsatInstance classical;  // computational-basis projectors, satisfied by |000>
  QsatInstance entangled;  // singlets on (1,2), (2,3) plus |00>, |11> on (1,3)
};

/// The two same-structure 2-QSAT instances on qubits q1, q2, q3 (indices 0, 1, 2).
FigureInstances figure_instances();

/// (x1 v x2) ^ (x2 v x3) ^ (x1 v x3) ^ (x1 v x3) over variables 0, 1, 2.
CnfFormula figure_a_cnf();

/// Triangle on 3 sites with the (1,3) edge doubled.
Structure triangle_double_structure();

RankOneTerm singlet_term(QubitIndex a, QubitIndex b);

}  // namespace qsat

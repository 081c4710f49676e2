#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qsat/instance.hpp"
#include "qsat/spectral.hpp"

namespace qsat {

inline constexpr double kSchmidtTolerance = 1e-12;

/// Qubits per qudit for the binary encoding: ceil(log2 d).
std::size_t qubits_per_qudit(std::size_t dimension);

/// Maps each qudit j onto qubits [j*b, (j+1)*b), embeds every projector, and
/// appends one |l><l| exclusion term per qudit per unused level l >= d.
QsatInstance encode_qudits(const QuditInstance& qudits);

/// Splits a projector into rank-1 projectors onto an orthonormal eigenbasis of
/// its range. Each vector's largest-magnitude entry is made real positive.
std::vector<RankOneTerm> rank_one_decompose(const GeneralTerm& term);

/// Replaces every GeneralTerm of the instance by its rank-1 decomposition.
QsatInstance rank_one_decompose(const QsatInstance& instance);

struct SchmidtSplit {
  /// |beta_i><beta_i| on support minus pivot, one per retained branch.
  std::vector<RankOneTerm> branches;
  /// Schmidt weights p_1 >= p_2 (both kept even when a branch is dropped).
  std::array<double, 2> weights{};
};

/// Schmidt decomposition of |psi> across pivot | rest.
SchmidtSplit schmidt_split(const RankOneTerm& term, QubitIndex pivot);

/// Tensors |bit> onto the listed fresh qubits, appended to the support in order.
RankOneTerm tensor_basis_qubits(const RankOneTerm& term, const Support& fresh, int bit);

/// term ⊗ |0...0> on `fresh`; |fresh| must equal target_k - |support|.
RankOneTerm pad_with_dummies(const RankOneTerm& term, std::size_t target_k, const Support& fresh);

struct MinimalCore {
  QsatInstance core;
  double core_lambda0 = 0.0;
  /// lambda0 of the core with term i removed.
  std::vector<double> deletion_lambda0;
};

/// Deletion-based minimization in input order, repeated until a full pass
/// removes nothing.
MinimalCore extract_minimal_core(const QsatInstance& instance, const SolverOptions& options = {});

/// Builds the certificate for an instance claimed minimal; throws
/// PreconditionError if it is satisfiable or some single deletion is not.
MinimalCore certify_minimal_core(const QsatInstance& instance, const SolverOptions& options = {});

/// Re-runs decide_sat on the core and every single deletion.
bool certificate_holds(const MinimalCore& core, const SolverOptions& options = {});

struct GadgetChecks {
  double dummy_zero_lambda0 = 0.0;  // min energy with dummy in |0>
  double dummy_one_lambda0 = 0.0;   // min energy with dummy in |1>
  std::size_t dummy_degree = 0;
  std::size_t gadget_max_degree = 0;
  std::size_t core_max_degree = 0;
};

struct EnforcingGadget {
  QsatInstance gadget;  // S on core qubits plus the dummy
  QubitIndex dummy_qubit = 0;
  std::vector<QubitIndex> ancilla_qubits;
  double penalty_constant = 0.0;  // c_k = lambda0(R)
  std::size_t lambda_index = 0;
  QubitIndex pivot = 0;
  std::array<double, 2> schmidt_weights{};
  GadgetChecks checks;
};

/// Index of the first term with support size >= 2 and that term's first qubit.
std::pair<std::size_t, QubitIndex> default_split_choice(const QsatInstance& core);

/// Replaces term `lambda_index` of the core by Lambda_i ⊗ |1><1|_dummy for
/// each Schmidt branch, then checks the gadget spectrally. The dummy index
/// must be >= the core's qubit count.
EnforcingGadget build_enforcing_gadget(const MinimalCore& core, std::size_t lambda_index,
                                       QubitIndex pivot, QubitIndex dummy,
                                       const SolverOptions& options = {});
EnforcingGadget build_enforcing_gadget(const MinimalCore& core, const SolverOptions& options = {});

enum class QubitRole { kWork, kDummy, kAncilla };

std::string_view to_string(QubitRole role);

struct RoleDegrees {
  std::size_t work = 0;
  std::size_t dummy = 0;
  std::size_t ancilla = 0;
};

struct ReductionOutput {
  QsatInstance t_instance;
  std::vector<QubitRole> role_map;
  double adjusted_gap = 0.0;  // min(epsilon, c_k)
  double penalty_constant = 0.0;
  std::size_t target_k = 0;
  std::size_t num_dummies = 0;
  std::size_t core_max_degree = 0;
  RoleDegrees max_degree_by_role;
};

ReductionOutput build_reduction(const QsatInstance& instance, std::size_t target_k,
                                const MinimalCore& core, const SolverOptions& options = {});

struct VerificationReport {
  bool dummy_z_commutes = true;
  std::vector<std::size_t> noncommuting_terms;
  bool dummy_degrees_three = true;
  bool spectra_checked = false;
  double lambda0_q = 0.0;
  double lambda0_t = 0.0;
  bool eigenvalue_relation = true;
  std::size_t max_degree_t = 0;
  std::size_t degree_bound = 0;
  bool degree_bound_holds = true;

  bool passed() const {
    return dummy_z_commutes && dummy_degrees_three && eigenvalue_relation && degree_bound_holds;
  }
};

/// Checks a reduction: dummy Z-commutation, dummy degrees, the E vs E'
/// relation, and Delta(T) <= max{Delta(Q), Delta(R)+1, 3}. Spectral checks
/// throw CapacityError when T exceeds the solver's qubit ceiling.
VerificationReport verify_reduction(const QsatInstance& instance, const ReductionOutput& out,
                                    const SolverOptions& options = {}, double tol = 1e-8);

}  // namespace qsat

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace qsat {

using Complex = std::complex<double>;
using QubitIndex = std::size_t;

/// Ordered list of qubit indices a term acts on. Amplitudes and matrices are
/// laid out big-endian over this order: support[0] is the most significant bit.
using Support = std::vector<QubitIndex>;

inline constexpr std::size_t kDefaultMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kIdempotentTolerance = 1e-10;
inline constexpr double kDefaultPromiseGap = 1e-3;

/// Global qubit ceiling (K_MAX). Reads QSAT_MAX_QUBITS when set to a positive
/// integer, otherwise kDefaultMaxQubits.
std::size_t max_qubits();

/// Rank-1 projector |psi><psi| on its support, identity elsewhere.
struct RankOneTerm {
  Support support;
  Eigen::VectorXcd amplitudes;

  /// Exact (bitwise-value) equality; differing shapes compare unequal.
  friend bool operator==(const RankOneTerm& a, const RankOneTerm& b);
};

/// Arbitrary-rank Hermitian projector on its support.
struct GeneralTerm {
  Support support;
  Eigen::MatrixXcd matrix;

  friend bool operator==(const GeneralTerm& a, const GeneralTerm& b);
};

using Term = std::variant<RankOneTerm, GeneralTerm>;

const Support& support_of(const Term& term);
bool is_rank_one(const Term& term);

/// Dense 2^k x 2^k projector of a term on its own support.
Eigen::MatrixXcd local_matrix(const Term& term);

RankOneTerm make_term(Support support, std::vector<Complex> amplitudes);

/// Projector onto the computational basis state spelled by `bits` ("01", ...)
/// over `support`.
RankOneTerm basis_term(Support support, std::string_view bits);

struct QsatInstance {
  std::size_t num_qubits = 0;
  std::vector<Term> terms;
  double promise_gap = kDefaultPromiseGap;

  std::size_t num_terms() const { return terms.size(); }
  bool all_rank_one() const;

  friend bool operator==(const QsatInstance&, const QsatInstance&) = default;
};

QsatInstance make_instance(std::size_t num_qubits, std::vector<RankOneTerm> terms,
                           double promise_gap = kDefaultPromiseGap);

QsatInstance without_term(const QsatInstance& instance, std::size_t index);
QsatInstance with_term(const QsatInstance& instance, Term term);

/// Projector on qudits; matrix is d^k x d^k, big-endian over the support.
struct QuditTerm {
  std::vector<std::size_t> support;
  Eigen::MatrixXcd matrix;
};

struct QuditInstance {
  std::size_t num_qudits = 0;
  std::size_t dimension = 2;
  std::vector<QuditTerm> terms;
  bool one_dim = false;
  double promise_gap = kDefaultPromiseGap;
};

struct Literal {
  std::size_t var = 0;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

struct CnfFormula {
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

enum class ViolationKind {
  kNoQubits,
  kNonPositiveGap,
  kEmptySupport,
  kDuplicateIndex,
  kIndexOutOfRange,
  kSupportTooLong,
  kShape,
  kNonFinite,
  kNormalization,
  kNotHermitian,
  kNotIdempotent,
  kNotNearestNeighbor,
  kBadDimension,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> term_index;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate(const RankOneTerm& term, std::size_t max_support = max_qubits());
ValidationReport validate(const GeneralTerm& term, std::size_t max_support = max_qubits());
ValidationReport validate(const QsatInstance& instance);
ValidationReport validate(const QuditInstance& instance);
ValidationReport validate(const CnfFormula& formula);

/// Throws ValidationError carrying the report summary when `validate` fails.
void require_valid(const QsatInstance& instance);

struct DegreeProfile {
  std::vector<std::size_t> per_qubit;
  std::size_t max_degree = 0;
  bool is_regular = true;
};

DegreeProfile degree_profile(const QsatInstance& instance);

/// Largest support size over the terms; 0 for an empty instance.
std::size_t locality(const QsatInstance& instance);

/// Interaction structure: number of sites plus the multiset of supports, each
/// support taken as a set. Canonical form is sorted at both levels.
struct Structure {
  std::size_t num_sites = 0;
  std::vector<Support> supports;

  friend bool operator==(const Structure&, const Structure&) = default;
};

Structure structure_of(const QsatInstance& instance);
Structure structure_of(const CnfFormula& formula);
Structure canonical(Structure structure);

bool same_structure(const QsatInstance& a, const QsatInstance& b);
bool same_structure(const QsatInstance& a, const CnfFormula& b);
bool same_structure(const CnfFormula& a, const QsatInstance& b);
bool same_structure(const CnfFormula& a, const CnfFormula& b);

/// FNV-1a digest of the canonical structure, printed by `qsat analyze`.
std::uint64_t structure_hash(const Structure& structure);

}  // namespace qsat

#include "qsat/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "qsat/errors.hpp"

namespace qsat {

std::size_t max_qubits() {
  if (const char* env = std::getenv("QSAT_MAX_QUBITS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return kDefaultMaxQubits;
}

namespace {

template <typename A, typename B>
bool same_values(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

bool operator==(const RankOneTerm& a, const RankOneTerm& b) {
  return a.support == b.support && same_values(a.amplitudes, b.amplitudes);
}

bool operator==(const GeneralTerm& a, const GeneralTerm& b) {
  return a.support == b.support && same_values(a.matrix, b.matrix);
}

const Support& support_of(const Term& term) {
  return std::visit([](const auto& t) -> const Support& { return t.support; }, term);
}

bool is_rank_one(const Term& term) { return std::holds_alternative<RankOneTerm>(term); }

Eigen::MatrixXcd local_matrix(const Term& term) {
  if (const auto* r = std::get_if<RankOneTerm>(&term)) {
    return r->amplitudes * r->amplitudes.adjoint();
  }
  return std::get<GeneralTerm>(term).matrix;
}

RankOneTerm make_term(Support support, std::vector<Complex> amplitudes) {
  RankOneTerm term{std::move(support), Eigen::VectorXcd(static_cast<Eigen::Index>(amplitudes.size()))};
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    term.amplitudes(static_cast<Eigen::Index>(i)) = amplitudes[i];
  }
  return term;
}

RankOneTerm basis_term(Support support, std::string_view bits) {
  if (bits.size() != support.size()) {
    throw ArgumentError("basis_term: bit string length does not match support size");
  }
  Eigen::Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ArgumentError("basis_term: bits must be '0' or '1'");
    index = (index << 1) | (c == '1' ? 1 : 0);
  }
  RankOneTerm term{std::move(support), Eigen::VectorXcd::Zero(Eigen::Index{1} << bits.size())};
  term.amplitudes(index) = 1.0;
  return term;
}

bool QsatInstance::all_rank_one() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return is_rank_one(t); });
}

QsatInstance make_instance(std::size_t num_qubits, std::vector<RankOneTerm> terms,
                           double promise_gap) {
  QsatInstance instance{num_qubits, {}, promise_gap};
  instance.terms.reserve(terms.size());
  for (auto& t : terms) instance.terms.emplace_back(std::move(t));
  return instance;
}

QsatInstance without_term(const QsatInstance& instance, std::size_t index) {
  if (index >= instance.terms.size()) throw ArgumentError("without_term: index out of range");
  QsatInstance out = instance;
  out.terms.erase(out.terms.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

QsatInstance with_term(const QsatInstance& instance, Term term) {
  QsatInstance out = instance;
  out.terms.push_back(std::move(term));
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kNoQubits: return "no-qubits";
    case ViolationKind::kNonPositiveGap: return "non-positive-gap";
    case ViolationKind::kEmptySupport: return "empty-support";
    case ViolationKind::kDuplicateIndex: return "duplicate-index";
    case ViolationKind::kIndexOutOfRange: return "index-out-of-range";
    case ViolationKind::kSupportTooLong: return "support-too-long";
    case ViolationKind::kShape: return "shape";
    case ViolationKind::kNonFinite: return "non-finite";
    case ViolationKind::kNormalization: return "normalization";
    case ViolationKind::kNotHermitian: return "not-hermitian";
    case ViolationKind::kNotIdempotent: return "not-idempotent";
    case ViolationKind::kNotNearestNeighbor: return "not-nearest-neighbor";
    case ViolationKind::kBadDimension: return "bad-dimension";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    if (v.term_index) os << "term " << *v.term_index << ": ";
    os << to_string(v.kind) << " (" << v.message << ")";
  }
  return os.str();
}

namespace {

void add(ValidationReport& report, ViolationKind kind, std::optional<std::size_t> term,
         std::string message) {
  report.violations.push_back({kind, term, std::move(message)});
}

void check_support(ValidationReport& report, const std::vector<std::size_t>& support,
                   std::size_t max_support, std::optional<std::size_t> term) {
  if (support.empty()) add(report, ViolationKind::kEmptySupport, term, "support is empty");
  if (support.size() > max_support) {
    add(report, ViolationKind::kSupportTooLong, term,
        "support length " + std::to_string(support.size()) + " exceeds " +
            std::to_string(max_support));
  }
  std::set<std::size_t> seen;
  for (auto q : support) {
    if (!seen.insert(q).second) {
      add(report, ViolationKind::kDuplicateIndex, term, "index " + std::to_string(q) + " repeated");
    }
  }
}

void check_range(ValidationReport& report, const std::vector<std::size_t>& support,
                 std::size_t limit, std::size_t term) {
  for (auto q : support) {
    if (q >= limit) {
      add(report, ViolationKind::kIndexOutOfRange, term,
          "index " + std::to_string(q) + " >= " + std::to_string(limit));
    }
  }
}

void check_projector(ValidationReport& report, const Eigen::MatrixXcd& m, Eigen::Index dim,
                     std::optional<std::size_t> term) {
  if (m.rows() != dim || m.cols() != dim) {
    add(report, ViolationKind::kShape, term,
        "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
            ", expected " + std::to_string(dim) + "x" + std::to_string(dim));
    return;
  }
  if (!m.allFinite()) {
    add(report, ViolationKind::kNonFinite, term, "matrix has non-finite entries");
    return;
  }
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) {
    add(report, ViolationKind::kNotHermitian, term, "max |M - M^H| = " + std::to_string(herm));
  }
  const double idem = (m * m - m).cwiseAbs().maxCoeff();
  if (idem > kIdempotentTolerance) {
    add(report, ViolationKind::kNotIdempotent, term, "max |M^2 - M| = " + std::to_string(idem));
  }
}

void check_rank_one(ValidationReport& report, const RankOneTerm& t, std::size_t max_support,
                    std::optional<std::size_t> term) {
  check_support(report, t.support, max_support, term);
  if (t.support.size() > max_support || t.support.size() >= 63) return;
  const Eigen::Index expected = Eigen::Index{1} << t.support.size();
  if (t.amplitudes.size() != expected) {
    add(report, ViolationKind::kShape, term,
        "amplitude length " + std::to_string(t.amplitudes.size()) + ", expected " +
            std::to_string(expected));
    return;
  }
  if (!t.amplitudes.allFinite()) {
    add(report, ViolationKind::kNonFinite, term, "amplitudes have non-finite entries");
    return;
  }
  const double norm = t.amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    add(report, ViolationKind::kNormalization, term, "norm " + std::to_string(norm));
  }
}

void check_general(ValidationReport& report, const GeneralTerm& t, std::size_t max_support,
                   std::optional<std::size_t> term) {
  check_support(report, t.support, max_support, term);
  if (t.support.size() > max_support || t.support.size() >= 63) return;
  check_projector(report, t.matrix, Eigen::Index{1} << t.support.size(), term);
}

}  // namespace

ValidationReport validate(const RankOneTerm& term, std::size_t max_support) {
  ValidationReport report;
  check_rank_one(report, term, max_support, std::nullopt);
  return report;
}

ValidationReport validate(const GeneralTerm& term, std::size_t max_support) {
  ValidationReport report;
  check_general(report, term, max_support, std::nullopt);
  return report;
}

ValidationReport validate(const QsatInstance& instance) {
  ValidationReport report;
  if (instance.num_qubits == 0) add(report, ViolationKind::kNoQubits, std::nullopt, "num_qubits is 0");
  if (!(instance.promise_gap > 0.0)) {
    add(report, ViolationKind::kNonPositiveGap, std::nullopt,
        "promise_gap " + std::to_string(instance.promise_gap));
  }
  const std::size_t max_support = max_qubits();
  for (std::size_t i = 0; i < instance.terms.size(); ++i) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, RankOneTerm>) {
            check_rank_one(report, t, max_support, i);
          } else {
            check_general(report, t, max_support, i);
          }
          check_range(report, t.support, instance.num_qubits, i);
        },
        instance.terms[i]);
  }
  return report;
}

ValidationReport validate(const QuditInstance& instance) {
  ValidationReport report;
  if (instance.num_qudits == 0) add(report, ViolationKind::kNoQubits, std::nullopt, "num_qudits is 0");
  if (instance.dimension < 2) {
    add(report, ViolationKind::kBadDimension, std::nullopt,
        "dimension " + std::to_string(instance.dimension));
    return report;
  }
  if (!(instance.promise_gap > 0.0)) {
    add(report, ViolationKind::kNonPositiveGap, std::nullopt,
        "promise_gap " + std::to_string(instance.promise_gap));
  }
  for (std::size_t i = 0; i < instance.terms.size(); ++i) {
    const auto& t = instance.terms[i];
    check_support(report, t.support, max_qubits(), i);
    check_range(report, t.support, instance.num_qudits, i);
    if (instance.one_dim) {
      const bool adjacent = t.support.size() == 2 &&
                            std::max(t.support[0], t.support[1]) ==
                                std::min(t.support[0], t.support[1]) + 1;
      if (!adjacent) {
        add(report, ViolationKind::kNotNearestNeighbor, i, "support is not {j, j+1}");
      }
    }
    double dim = std::pow(static_cast<double>(instance.dimension), static_cast<double>(t.support.size()));
    if (dim > 1 << 16) {
      add(report, ViolationKind::kSupportTooLong, i, "local dimension too large");
      continue;
    }
    check_projector(report, t.matrix, static_cast<Eigen::Index>(dim), i);
  }
  return report;
}

ValidationReport validate(const CnfFormula& formula) {
  ValidationReport report;
  if (formula.num_vars == 0) add(report, ViolationKind::kNoQubits, std::nullopt, "num_vars is 0");
  for (std::size_t i = 0; i < formula.clauses.size(); ++i) {
    std::vector<std::size_t> vars;
    for (const auto& lit : formula.clauses[i]) vars.push_back(lit.var);
    check_support(report, vars, std::numeric_limits<std::size_t>::max(), i);
    check_range(report, vars, formula.num_vars, i);
  }
  return report;
}

void require_valid(const QsatInstance& instance) {
  const auto report = validate(instance);
  if (!report.ok()) throw ValidationError("invalid instance: " + report.summary());
}

DegreeProfile degree_profile(const QsatInstance& instance) {
  require_valid(instance);
  DegreeProfile profile;
  profile.per_qubit.assign(instance.num_qubits, 0);
  for (const auto& term : instance.terms) {
    for (auto q : support_of(term)) ++profile.per_qubit[q];
  }
  const auto [lo, hi] = std::minmax_element(profile.per_qubit.begin(), profile.per_qubit.end());
  profile.max_degree = *hi;
  profile.is_regular = *lo == *hi;
  return profile;
}

std::size_t locality(const QsatInstance& instance) {
  std::size_t k = 0;
  for (const auto& term : instance.terms) k = std::max(k, support_of(term).size());
  return k;
}

Structure canonical(Structure structure) {
  for (auto& s : structure.supports) std::sort(s.begin(), s.end());
  std::sort(structure.supports.begin(), structure.supports.end());
  return structure;
}

Structure structure_of(const QsatInstance& instance) {
  Structure s{instance.num_qubits, {}};
  for (const auto& term : instance.terms) s.supports.push_back(support_of(term));
  return canonical(std::move(s));
}

Structure structure_of(const CnfFormula& formula) {
  Structure s{formula.num_vars, {}};
  for (const auto& clause : formula.clauses) {
    Support vars;
    for (const auto& lit : clause) vars.push_back(lit.var);
    s.supports.push_back(std::move(vars));
  }
  return canonical(std::move(s));
}

bool same_structure(const QsatInstance& a, const QsatInstance& b) {
  return structure_of(a) == structure_of(b);
}
bool same_structure(const QsatInstance& a, const CnfFormula& b) {
  return structure_of(a) == structure_of(b);
}
bool same_structure(const CnfFormula& a, const QsatInstance& b) {
  return structure_of(a) == structure_of(b);
}
bool same_structure(const CnfFormula& a, const CnfFormula& b) {
  return structure_of(a) == structure_of(b);
}

std::uint64_t structure_hash(const Structure& structure) {
  const Structure s = canonical(structure);
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(s.num_sites);
  for (const auto& support : s.supports) {
    mix(support.size());
    for (auto q : support) mix(q);
  }
  return h;
}

}  // namespace qsat

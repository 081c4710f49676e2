#include "qsat/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "qsat/errors.hpp"

namespace qsat {

std::size_t qubits_per_qudit(std::size_t dimension) {
  if (dimension < 2) throw ArgumentError("qudit dimension must be at least 2");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < dimension) ++bits;
  return bits;
}

QsatInstance encode_qudits(const QuditInstance& qudits) {
  const auto report = validate(qudits);
  if (!report.ok()) throw ValidationError("invalid qudit instance: " + report.summary());
  const std::size_t d = qudits.dimension;
  const std::size_t b = qubits_per_qudit(d);

  QsatInstance out;
  out.num_qubits = qudits.num_qudits * b;
  out.promise_gap = qudits.promise_gap;
  for (const auto& term : qudits.terms) {
    const std::size_t k = term.support.size();
    Support support;
    for (auto site : term.support) {
      for (std::size_t bit = 0; bit < b; ++bit) support.push_back(site * b + bit);
    }
    // Qudit local index (base d) -> qubit local index (base 2^b), digit by digit.
    const auto local_dim = static_cast<Eigen::Index>(term.matrix.rows());
    std::vector<Eigen::Index> embed(static_cast<std::size_t>(local_dim));
    for (Eigen::Index index = 0; index < local_dim; ++index) {
      Eigen::Index rest = index;
      Eigen::Index mapped = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const Eigen::Index level = rest % static_cast<Eigen::Index>(d);
        rest /= static_cast<Eigen::Index>(d);
        mapped |= level << (b * j);
      }
      embed[static_cast<std::size_t>(index)] = mapped;
    }
    GeneralTerm general{std::move(support), Eigen::MatrixXcd::Zero(Eigen::Index{1} << (b * k),
                                                                   Eigen::Index{1} << (b * k))};
    for (Eigen::Index j = 0; j < local_dim; ++j) {
      for (Eigen::Index i = 0; i < local_dim; ++i) {
        general.matrix(embed[static_cast<std::size_t>(i)], embed[static_cast<std::size_t>(j)]) =
            term.matrix(i, j);
      }
    }
    out.terms.emplace_back(std::move(general));
  }
  // Forbid the unused binary levels d .. 2^b - 1 of every qudit.
  for (std::size_t site = 0; site < qudits.num_qudits; ++site) {
    Support support;
    for (std::size_t bit = 0; bit < b; ++bit) support.push_back(site * b + bit);
    for (std::size_t level = d; level < (std::size_t{1} << b); ++level) {
      RankOneTerm exclusion{support, Eigen::VectorXcd::Zero(Eigen::Index{1} << b)};
      exclusion.amplitudes(static_cast<Eigen::Index>(level)) = 1.0;
      out.terms.emplace_back(std::move(exclusion));
    }
  }
  return out;
}

namespace {

void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  const Complex entry = v(pivot);
  if (std::abs(entry) > 0.0) v *= std::conj(entry) / std::abs(entry);
}

std::size_t position_in(const Support& support, QubitIndex qubit) {
  const auto it = std::find(support.begin(), support.end(), qubit);
  if (it == support.end()) {
    throw ArgumentError("qubit " + std::to_string(qubit) + " is not in the term's support");
  }
  return static_cast<std::size_t>(it - support.begin());
}

}  // namespace

std::vector<RankOneTerm> rank_one_decompose(const GeneralTerm& term) {
  const auto report = validate(term);
  if (!report.ok()) throw ValidationError("rank_one_decompose: " + report.summary());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(term.matrix);
  std::vector<RankOneTerm> out;
  for (Eigen::Index i = solver.eigenvalues().size() - 1; i >= 0; --i) {
    if (solver.eigenvalues()(i) < 0.5) break;
    Eigen::VectorXcd v = solver.eigenvectors().col(i);
    v.normalize();
    fix_phase(v);
    out.push_back({term.support, std::move(v)});
  }
  return out;
}

QsatInstance rank_one_decompose(const QsatInstance& instance) {
  require_valid(instance);
  QsatInstance out{instance.num_qubits, {}, instance.promise_gap};
  for (const auto& term : instance.terms) {
    if (const auto* general = std::get_if<GeneralTerm>(&term)) {
      for (auto& piece : rank_one_decompose(*general)) out.terms.emplace_back(std::move(piece));
    } else {
      out.terms.push_back(term);
    }
  }
  return out;
}

SchmidtSplit schmidt_split(const RankOneTerm& term, QubitIndex pivot) {
  const auto report = validate(term);
  if (!report.ok()) throw ValidationError("schmidt_split: " + report.summary());
  const std::size_t k = term.support.size();
  if (k < 2) throw ArityError("schmidt_split needs a term on at least 2 qubits");
  const std::size_t p = position_in(term.support, pivot);

  Support rest;
  for (auto q : term.support) {
    if (q != pivot) rest.push_back(q);
  }
  const Eigen::Index rest_dim = Eigen::Index{1} << (k - 1);
  Eigen::MatrixXcd reshaped(2, rest_dim);
  for (Eigen::Index local = 0; local < term.amplitudes.size(); ++local) {
    const Eigen::Index shift = static_cast<Eigen::Index>(k - 1 - p);
    const Eigen::Index row = (local >> shift) & 1;
    const Eigen::Index high = local >> (shift + 1);
    const Eigen::Index low = local & ((Eigen::Index{1} << shift) - 1);
    reshaped(row, (high << shift) | low) = term.amplitudes(local);
  }

  // reshaped = U S V^H, so |psi> = sum_i s_i |u_i> ⊗ conj(v_i).
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(reshaped, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double total = sigma.squaredNorm();
  SchmidtSplit split;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    split.weights[static_cast<std::size_t>(i)] = sigma(i) * sigma(i) / total;
  }
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (split.weights[static_cast<std::size_t>(i)] <= kSchmidtTolerance) continue;
    Eigen::VectorXcd beta = svd.matrixV().col(i).conjugate();
    beta.normalize();
    fix_phase(beta);
    split.branches.push_back({rest, std::move(beta)});
  }
  return split;
}

RankOneTerm tensor_basis_qubits(const RankOneTerm& term, const Support& fresh, int bit) {
  if (bit != 0 && bit != 1) throw ArgumentError("tensor_basis_qubits: bit must be 0 or 1");
  std::set<QubitIndex> seen(term.support.begin(), term.support.end());
  for (auto q : fresh) {
    if (!seen.insert(q).second) {
      throw ArgumentError("fresh qubit " + std::to_string(q) + " collides with the support");
    }
  }
  const std::size_t f = fresh.size();
  RankOneTerm out;
  out.support = term.support;
  out.support.insert(out.support.end(), fresh.begin(), fresh.end());
  out.amplitudes = Eigen::VectorXcd::Zero(term.amplitudes.size() << f);
  const Eigen::Index suffix = bit == 1 ? (Eigen::Index{1} << f) - 1 : 0;
  for (Eigen::Index i = 0; i < term.amplitudes.size(); ++i) {
    out.amplitudes((i << f) | suffix) = term.amplitudes(i);
  }
  return out;
}

RankOneTerm pad_with_dummies(const RankOneTerm& term, std::size_t target_k, const Support& fresh) {
  if (target_k < term.support.size() || fresh.size() != target_k - term.support.size()) {
    throw ArgumentError("pad_with_dummies: need exactly target_k - |support| fresh qubits");
  }
  return tensor_basis_qubits(term, fresh, 0);
}

namespace {

SatVerdict definite_verdict(const QsatInstance& instance, const SolverOptions& options) {
  SatVerdict v = decide_sat(instance, options);
  if (v.tag == Verdict::kIndeterminate) {
    throw IndeterminateError("indeterminate verdict (lambda0 = " + std::to_string(v.lambda0) +
                             ") while minimizing the core");
  }
  return v;
}

MinimalCore certificate_for(QsatInstance core, const SolverOptions& options) {
  MinimalCore out;
  out.core_lambda0 = ground_energy(core, options).lambda0;
  for (std::size_t i = 0; i < core.terms.size(); ++i) {
    out.deletion_lambda0.push_back(ground_energy(without_term(core, i), options).lambda0);
  }
  out.core = std::move(core);
  return out;
}

}  // namespace

MinimalCore extract_minimal_core(const QsatInstance& instance, const SolverOptions& options) {
  if (definite_verdict(instance, options).tag != Verdict::kUnsatisfiable) {
    throw PreconditionError("extract_minimal_core: input is satisfiable");
  }
  SolverOptions solve = options;
  solve.want_vector = false;
  QsatInstance current = instance;
  bool removed = true;
  while (removed) {
    removed = false;
    std::size_t i = 0;
    while (i < current.terms.size()) {
      QsatInstance candidate = without_term(current, i);
      if (definite_verdict(candidate, solve).tag == Verdict::kUnsatisfiable) {
        current = std::move(candidate);
        removed = true;
      } else {
        ++i;
      }
    }
  }
  return certificate_for(std::move(current), solve);
}

MinimalCore certify_minimal_core(const QsatInstance& instance, const SolverOptions& options) {
  if (definite_verdict(instance, options).tag != Verdict::kUnsatisfiable) {
    throw PreconditionError("core is satisfiable");
  }
  for (std::size_t i = 0; i < instance.terms.size(); ++i) {
    if (definite_verdict(without_term(instance, i), options).tag != Verdict::kSatisfiable) {
      throw PreconditionError("core is not minimal: removing term " + std::to_string(i) +
                              " leaves it unsatisfiable");
    }
  }
  SolverOptions solve = options;
  solve.want_vector = false;
  return certificate_for(instance, solve);
}

bool certificate_holds(const MinimalCore& core, const SolverOptions& options) {
  const SatVerdict whole = decide_sat(core.core, options);
  if (whole.tag != Verdict::kUnsatisfiable || core.core_lambda0 < whole.unsat_floor) return false;
  if (core.deletion_lambda0.size() != core.core.terms.size()) return false;
  for (std::size_t i = 0; i < core.core.terms.size(); ++i) {
    const SatVerdict v = decide_sat(without_term(core.core, i), options);
    if (v.tag != Verdict::kSatisfiable || core.deletion_lambda0[i] > v.sat_tolerance) return false;
  }
  return true;
}

std::pair<std::size_t, QubitIndex> default_split_choice(const QsatInstance& core) {
  for (std::size_t i = 0; i < core.terms.size(); ++i) {
    const Support& support = support_of(core.terms[i]);
    if (support.size() >= 2) return {i, support.front()};
  }
  throw ArgumentError("core has no term acting on 2 or more qubits to split");
}

EnforcingGadget build_enforcing_gadget(const MinimalCore& core, std::size_t lambda_index,
                                       QubitIndex pivot, QubitIndex dummy,
                                       const SolverOptions& options) {
  const QsatInstance& r = core.core;
  require_valid(r);
  if (!r.all_rank_one()) throw ArgumentError("enforcing gadget needs a rank-1 core");
  if (lambda_index >= r.terms.size()) throw ArgumentError("lambda index out of range");
  if (dummy < r.num_qubits) throw ArgumentError("dummy qubit must be fresh (>= core qubit count)");
  if (!(core.core_lambda0 > options.unsat_floor)) {
    throw PreconditionError("core ground energy " + std::to_string(core.core_lambda0) +
                            " is not above the unsat floor");
  }
  const auto& lambda = std::get<RankOneTerm>(r.terms[lambda_index]);
  const SchmidtSplit split = schmidt_split(lambda, pivot);

  EnforcingGadget g;
  g.dummy_qubit = dummy;
  g.lambda_index = lambda_index;
  g.pivot = pivot;
  g.schmidt_weights = split.weights;
  g.penalty_constant = core.core_lambda0;
  g.ancilla_qubits.resize(r.num_qubits);
  std::iota(g.ancilla_qubits.begin(), g.ancilla_qubits.end(), QubitIndex{0});
  g.gadget.num_qubits = dummy + 1;
  g.gadget.promise_gap = r.promise_gap;
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    if (i != lambda_index) g.gadget.terms.push_back(r.terms[i]);
  }
  for (const auto& branch : split.branches) {
    g.gadget.terms.emplace_back(tensor_basis_qubits(branch, {dummy}, 1));
  }

  const double sat_tol = options.sat_tolerance_per_term *
                         static_cast<double>(std::max<std::size_t>(1, g.gadget.num_terms()));
  SolverOptions solve = options;
  solve.want_vector = false;
  g.checks.dummy_zero_lambda0 = sector_ground_energy(g.gadget, {{dummy, 0}}, solve).lambda0;
  g.checks.dummy_one_lambda0 = sector_ground_energy(g.gadget, {{dummy, 1}}, solve).lambda0;
  const DegreeProfile gadget_degrees = degree_profile(g.gadget);
  g.checks.dummy_degree = gadget_degrees.per_qubit[dummy];
  g.checks.gadget_max_degree = gadget_degrees.max_degree;
  g.checks.core_max_degree = degree_profile(r).max_degree;

  if (g.checks.dummy_zero_lambda0 > sat_tol) {
    throw VerificationError("gadget is not satisfiable with the dummy in |0> (lambda0 = " +
                            std::to_string(g.checks.dummy_zero_lambda0) + "); is the core minimal?");
  }
  if (g.checks.dummy_one_lambda0 < g.penalty_constant - 1e-9) {
    throw VerificationError("dummy |1> sector energy " + std::to_string(g.checks.dummy_one_lambda0) +
                            " is below c_k = " + std::to_string(g.penalty_constant));
  }
  if (g.checks.dummy_degree != split.branches.size() ||
      g.checks.gadget_max_degree > g.checks.core_max_degree + 1) {
    throw VerificationError("gadget degree accounting failed");
  }
  return g;
}

EnforcingGadget build_enforcing_gadget(const MinimalCore& core, const SolverOptions& options) {
  const auto [index, pivot] = default_split_choice(core.core);
  return build_enforcing_gadget(core, index, pivot, core.core.num_qubits, options);
}

std::string_view to_string(QubitRole role) {
  switch (role) {
    case QubitRole::kWork: return "work";
    case QubitRole::kDummy: return "dummy";
    case QubitRole::kAncilla: return "ancilla";
  }
  return "unknown";
}

ReductionOutput build_reduction(const QsatInstance& instance, std::size_t target_k,
                                const MinimalCore& core, const SolverOptions& options) {
  require_valid(instance);
  if (!instance.all_rank_one()) {
    throw ArgumentError("build_reduction: decompose general projectors into rank-1 terms first");
  }
  if (target_k == 0 || locality(instance) > target_k) {
    throw ArgumentError("target k " + std::to_string(target_k) + " is below the instance locality " +
                        std::to_string(locality(instance)));
  }

  ReductionOutput out;
  out.target_k = target_k;
  out.penalty_constant = core.core_lambda0;
  out.core_max_degree = degree_profile(core.core).max_degree;
  const std::size_t n = instance.num_qubits;
  for (const auto& term : instance.terms) out.num_dummies += target_k - support_of(term).size();

  if (out.num_dummies == 0) {
    out.t_instance = instance;
    out.adjusted_gap = instance.promise_gap;
    out.role_map.assign(n, QubitRole::kWork);
    out.max_degree_by_role.work = degree_profile(instance).max_degree;
    return out;
  }

  const EnforcingGadget gadget = build_enforcing_gadget(core, options);
  if (locality(gadget.gadget) > target_k) {
    throw ArgumentError("core locality " + std::to_string(locality(gadget.gadget)) +
                        " exceeds target k " + std::to_string(target_k));
  }
  const std::size_t core_qubits = core.core.num_qubits;
  out.adjusted_gap = std::min(instance.promise_gap, gadget.penalty_constant);

  QsatInstance& t = out.t_instance;
  t.num_qubits = n + out.num_dummies * (1 + core_qubits);
  t.promise_gap = out.adjusted_gap;
  out.role_map.assign(n, QubitRole::kWork);
  out.role_map.resize(n + out.num_dummies, QubitRole::kDummy);
  out.role_map.resize(t.num_qubits, QubitRole::kAncilla);

  QubitIndex next_dummy = n;
  for (const auto& term : instance.terms) {
    const auto& r1 = std::get<RankOneTerm>(term);
    Support fresh(target_k - r1.support.size());
    std::iota(fresh.begin(), fresh.end(), next_dummy);
    next_dummy += fresh.size();
    t.terms.emplace_back(pad_with_dummies(r1, target_k, fresh));
  }
  for (std::size_t copy = 0; copy < out.num_dummies; ++copy) {
    const QubitIndex dummy = n + copy;
    const QubitIndex ancilla_base = n + out.num_dummies + copy * core_qubits;
    for (const auto& term : gadget.gadget.terms) {
      RankOneTerm relabeled = std::get<RankOneTerm>(term);
      for (auto& q : relabeled.support) q = q == gadget.dummy_qubit ? dummy : ancilla_base + q;
      t.terms.emplace_back(std::move(relabeled));
    }
  }

  const DegreeProfile degrees = degree_profile(t);
  for (std::size_t q = 0; q < t.num_qubits; ++q) {
    std::size_t& slot = out.role_map[q] == QubitRole::kWork    ? out.max_degree_by_role.work
                        : out.role_map[q] == QubitRole::kDummy ? out.max_degree_by_role.dummy
                                                               : out.max_degree_by_role.ancilla;
    slot = std::max(slot, degrees.per_qubit[q]);
  }
  return out;
}

namespace {

/// True when every nonzero amplitude (or matrix entry) agrees on the bit of
/// support position `pos`, i.e. the term commutes with Z on that qubit.
bool commutes_with_z(const Term& term, std::size_t pos) {
  const std::size_t k = support_of(term).size();
  const Eigen::Index bit = Eigen::Index{1} << (k - 1 - pos);
  if (const auto* r = std::get_if<RankOneTerm>(&term)) {
    int seen = -1;
    for (Eigen::Index i = 0; i < r->amplitudes.size(); ++i) {
      if (std::abs(r->amplitudes(i)) <= 1e-12) continue;
      const int value = (i & bit) ? 1 : 0;
      if (seen >= 0 && seen != value) return false;
      seen = value;
    }
    return true;
  }
  const auto& m = std::get<GeneralTerm>(term).matrix;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (((i & bit) != 0) != ((j & bit) != 0) && std::abs(m(i, j)) > 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

VerificationReport verify_reduction(const QsatInstance& instance, const ReductionOutput& out,
                                    const SolverOptions& options, double tol) {
  VerificationReport report;
  const QsatInstance& t = out.t_instance;
  require_valid(t);
  if (out.role_map.size() != t.num_qubits) {
    throw ArgumentError("role map length does not match the reduced instance");
  }

  for (std::size_t i = 0; i < t.terms.size(); ++i) {
    const Support& support = support_of(t.terms[i]);
    for (std::size_t pos = 0; pos < support.size(); ++pos) {
      if (out.role_map[support[pos]] == QubitRole::kDummy && !commutes_with_z(t.terms[i], pos)) {
        report.dummy_z_commutes = false;
        report.noncommuting_terms.push_back(i);
        break;
      }
    }
  }

  const DegreeProfile degrees = degree_profile(t);
  for (std::size_t q = 0; q < t.num_qubits; ++q) {
    if (out.role_map[q] == QubitRole::kDummy && degrees.per_qubit[q] != 3) {
      report.dummy_degrees_three = false;
    }
  }
  report.max_degree_t = degrees.max_degree;
  report.degree_bound = std::max({degree_profile(instance).max_degree, out.core_max_degree + 1,
                                  std::size_t{3}});
  report.degree_bound_holds = report.max_degree_t <= report.degree_bound;

  if (t.num_qubits > options.qubit_ceiling()) {
    throw CapacityError("reduced instance has " + std::to_string(t.num_qubits) +
                        " qubits; verification ceiling is " + std::to_string(options.qubit_ceiling()));
  }
  SolverOptions solve = options;
  solve.want_vector = false;
  report.lambda0_q = ground_energy(instance, solve).lambda0;
  report.lambda0_t = ground_energy(t, solve).lambda0;
  report.spectra_checked = true;
  const double c_k = out.penalty_constant;
  if (out.num_dummies == 0 || report.lambda0_q <= c_k) {
    report.eigenvalue_relation = std::abs(report.lambda0_t - report.lambda0_q) <= tol;
  } else {
    report.eigenvalue_relation = report.lambda0_t >= c_k - tol;
  }
  return report;
}

}  // namespace qsat

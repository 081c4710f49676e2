#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qsat/ensembles.hpp"
#include "qsat/errors.hpp"
#include "qsat/reduction.hpp"
#include "test_support.hpp"

using namespace qsat;
namespace qt = qsat::testing;

namespace {

MinimalCore builtin_core() { return certify_minimal_core(figure_instances().entangled); }

Eigen::MatrixXcd projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

/// Lambda restricted to the |0...0> dummy sector of its padded version.
Eigen::MatrixXcd zero_sector_block(const RankOneTerm& padded, std::size_t original_k) {
  const Eigen::MatrixXcd full = projector(padded.amplitudes);
  const std::size_t extra = padded.support.size() - original_k;
  const Eigen::Index dim = Eigen::Index{1} << original_k;
  Eigen::MatrixXcd block(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) block(i, j) = full(i << extra, j << extra);
  }
  return block;
}

std::size_t degree_of(const QsatInstance& q, QubitIndex qubit) {
  return degree_profile(q).per_qubit[qubit];
}

}  // namespace

TEST_CASE("qubits per qudit") {
  CHECK(qubits_per_qudit(2) == 1);
  CHECK(qubits_per_qudit(3) == 2);
  CHECK(qubits_per_qudit(4) == 2);
  CHECK(qubits_per_qudit(12) == 4);
  CHECK(qubits_per_qudit(16) == 4);
}

TEST_CASE("qubit dimension encodes as the identity map") {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
  p(1, 1) = 1.0;
  const QuditInstance q{2, 2, {{{0, 1}, p}}, false, 1e-3};
  const auto enc = encode_qudits(q);
  CHECK(enc.num_qubits == 2);
  REQUIRE(enc.num_terms() == 1);
  CHECK(support_of(enc.terms[0]) == Support{0, 1});
  CHECK((local_matrix(enc.terms[0]) - p).norm() < 1e-15);
}

TEST_CASE("twelve-level qudits make an eight-qubit term") {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(144, 144);
  p(5, 5) = 1.0;
  const QuditInstance q{2, 12, {{{0, 1}, p}}, true, 1e-3};
  const auto enc = encode_qudits(q);
  CHECK(enc.num_qubits == 8);
  CHECK(support_of(enc.terms[0]).size() == 8);
  // 4 invalid levels per qudit
  CHECK(enc.num_terms() == 1 + 2 * 4);
  CHECK(locality(enc) == 8);
  // qudit levels (0, 5) -> qubit bits 0000 0101
  CHECK(local_matrix(enc.terms[0])(5, 5) == Complex(1.0, 0.0));
}

TEST_CASE("three-level qudit gets one exclusion term and keeps satisfiability") {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3);
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  const QuditInstance q{1, 3, {{{0}, p}}, false, 1e-3};
  const auto enc = encode_qudits(q);
  CHECK(enc.num_qubits == 2);
  REQUIRE(enc.num_terms() == 2);
  const auto* excl = std::get_if<RankOneTerm>(&enc.terms[1]);
  REQUIRE(excl);
  CHECK(excl->amplitudes(3) == Complex(1.0, 0.0));
  // only level 2 survives: |10>
  CHECK(common_nullspace_dim(rank_one_decompose(enc)) == 1);
  CHECK(expectation(rank_one_decompose(enc), basis_state(2, "10")) < 1e-12);

  p(2, 2) = 1.0;  // every valid level excluded
  const auto blocked = encode_qudits(QuditInstance{1, 3, {{{0}, p}}, false, 1e-3});
  CHECK(common_nullspace_dim(rank_one_decompose(blocked)) == 0);
}

TEST_CASE("rank-1 decomposition examples") {
  const auto singlet = singlet_term(0, 1);
  const auto same = rank_one_decompose(GeneralTerm{singlet.support, local_matrix(singlet)});
  REQUIRE(same.size() == 1);
  CHECK((projector(same[0].amplitudes) - local_matrix(singlet)).norm() < 1e-10);

  const auto id = rank_one_decompose(GeneralTerm{{0}, Eigen::MatrixXcd::Identity(2, 2)});
  REQUIRE(id.size() == 2);
  CHECK((projector(id[0].amplitudes) + projector(id[1].amplitudes) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-10);

  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
  p(0, 0) = 1.0;
  p(3, 3) = 1.0;
  const auto two = rank_one_decompose(GeneralTerm{{0, 1}, p});
  REQUIRE(two.size() == 2);
  CHECK((projector(two[0].amplitudes) + projector(two[1].amplitudes) - p).norm() < 1e-10);

  CHECK_THROWS_AS(rank_one_decompose(GeneralTerm{{0}, 2.0 * Eigen::MatrixXcd::Identity(2, 2)}), ValidationError);
}

TEST_CASE("property: rank-1 decomposition of random projectors") {
  CounterRng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + rng.next_u64() % 3;
    const Eigen::Index dim = Eigen::Index{1} << k;
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::size_t>(dim));
    Eigen::MatrixXcd g(dim, rank);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.complex_normal();
    const Eigen::MatrixXcd basis = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ() *
                                   Eigen::MatrixXcd::Identity(dim, rank);
    const Eigen::MatrixXcd p = basis * basis.adjoint();
    Support s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    const auto parts = rank_one_decompose(GeneralTerm{s, p});
    CHECK(static_cast<Eigen::Index>(parts.size()) == rank);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& part : parts) {
      CHECK(validate(part).ok());
      CHECK((p * part.amplitudes - part.amplitudes).norm() < 1e-10);
      sum += projector(part.amplitudes);
    }
    CHECK((sum - p).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Schmidt split of the singlet") {
  const auto split = schmidt_split(singlet_term(0, 1), 0);
  REQUIRE(split.branches.size() == 2);
  CHECK(split.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(split.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& b : split.branches) CHECK(b.support == Support{1});
  const Eigen::MatrixXcd sum = projector(split.branches[0].amplitudes) + projector(split.branches[1].amplitudes);
  CHECK((sum - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
  // pivot qubit 0 in |1> pairs with |0> on qubit 1 and vice versa; both branches are basis states
  for (const auto& b : split.branches) CHECK(std::abs(std::abs(b.amplitudes(0)) - std::abs(b.amplitudes(1))) == doctest::Approx(1.0));
}

TEST_CASE("Schmidt split of product states keeps one branch") {
  CounterRng rng(32);
  const auto phi = qt::random_unit(4, rng);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(8);
  psi.head(4) = phi;  // |0> (x) |phi>
  const auto split = schmidt_split(RankOneTerm{{0, 1, 2}, psi}, 0);
  REQUIRE(split.branches.size() == 1);
  CHECK(split.branches[0].support == Support{1, 2});
  CHECK(std::abs(std::abs(split.branches[0].amplitudes.dot(phi)) - 1.0) < 1e-12);
  CHECK(split.weights[1] < 1e-12);

  const auto zz = schmidt_split(basis_term({0, 1}, "00"), 0);
  REQUIRE(zz.branches.size() == 1);
  CHECK(std::abs(zz.branches[0].amplitudes(0)) == doctest::Approx(1.0));
}

TEST_CASE("Schmidt split errors") {
  CHECK_THROWS_AS(schmidt_split(basis_term({0}, "0"), 0), ArityError);
  CHECK_THROWS_AS(schmidt_split(basis_term({0, 1}, "00"), 2), ArgumentError);
}

TEST_CASE("property: branch sum dominates the split projector, weights and orthogonality") {
  CounterRng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + trial % 3;
    Support s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    const auto t = qt::random_term(s, rng);
    for (QubitIndex pivot : s) {
      const auto split = schmidt_split(t, pivot);
      CHECK(std::abs(split.weights[0] + split.weights[1] - 1.0) < 1e-10);
      if (split.branches.size() == 2) {
        CHECK(std::abs(split.branches[0].amplitudes.dot(split.branches[1].amplitudes)) < 1e-10);
      }
      QsatInstance lhs{k, {}, 1e-3};
      for (const auto& b : split.branches) lhs.terms.emplace_back(b);
      CHECK(operator_dominates(lhs, make_instance(k, {t}), 1e-9));
    }
  }
}

TEST_CASE("padding with dummies") {
  const auto t = basis_term({0, 1}, "01");
  const auto padded = pad_with_dummies(t, 3, {5});
  CHECK(padded.support == Support{0, 1, 5});
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(8);
  expected(2) = 1.0;  // |01>|0>
  CHECK((padded.amplitudes - expected).norm() == 0.0);
  CHECK(pad_with_dummies(t, 2, {}) == t);
  CHECK_THROWS_AS(pad_with_dummies(t, 4, {5}), ArgumentError);
  CHECK_THROWS_AS(pad_with_dummies(t, 3, {1}), ArgumentError);

  CounterRng rng(34);
  const auto eight = qt::random_term({0, 1, 2, 3, 4, 5, 6, 7}, rng);
  const auto fifteen = pad_with_dummies(eight, 15, {8, 9, 10, 11, 12, 13, 14});
  CHECK(fifteen.support.size() == 15);
  CHECK(validate(fifteen).ok());

  const auto one = tensor_basis_qubits(basis_term({0}, "1"), {3}, 1);
  CHECK(one.support == Support{0, 3});
  CHECK(one.amplitudes(3) == Complex(1.0, 0.0));
}

TEST_CASE("property: padding preserves the zero-dummy sector") {
  CounterRng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 3;
    Support s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    const auto t = qt::random_term(s, rng);
    Support fresh;
    for (std::size_t i = 0; i < 1 + trial % 3; ++i) fresh.push_back(k + i);
    const auto padded = pad_with_dummies(t, k + fresh.size(), fresh);
    const auto block = zero_sector_block(padded, k);
    CHECK((block - projector(t.amplitudes)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(min_eigenvalue(block) - min_eigenvalue(projector(t.amplitudes))) < 1e-12);
  }
}

TEST_CASE("minimal core of the entangled figure instance") {
  const auto core = extract_minimal_core(figure_instances().entangled);
  CHECK(core.core == figure_instances().entangled);
  CHECK(core.deletion_lambda0.size() == 4);
  for (double v : core.deletion_lambda0) CHECK(v <= 4e-9);
  CHECK(core.core_lambda0 == doctest::Approx(qt::oracle_lambda0(figure_instances().entangled)).epsilon(1e-10));
  CHECK(certificate_holds(core));
}

TEST_CASE("a duplicated term is removed from the core") {
  const auto fig = figure_instances().entangled;
  const auto doubled = with_term(fig, basis_term({0, 2}, "00"));
  const auto core = extract_minimal_core(doubled);
  CHECK(core.core.num_terms() == 4);
  CHECK(same_structure(core.core, fig));
  CHECK(certificate_holds(core));
  CHECK_THROWS_AS(certify_minimal_core(doubled), PreconditionError);
}

TEST_CASE("core extraction rejects satisfiable input") {
  CHECK_THROWS_AS(extract_minimal_core(figure_instances().classical), PreconditionError);
  CHECK_THROWS_AS(certify_minimal_core(figure_instances().classical), PreconditionError);
}

TEST_CASE("core extraction refuses to guess on indeterminate verdicts") {
  const double theta = 1e-4;
  const auto q = make_instance(1, {basis_term({0}, "0"), make_term({0}, {std::cos(theta), std::sin(theta)})});
  CHECK_THROWS_AS(extract_minimal_core(q), IndeterminateError);
}

TEST_CASE("property: extracted cores are minimal and unsatisfiable") {
  CounterRng rng(36);
  std::size_t checked = 0;
  for (int trial = 0; trial < 60 && checked < 15; ++trial) {
    const auto q = qt::random_instance(3, 6, 2, rng, true);
    if (decide_sat(q).tag != Verdict::kUnsatisfiable) continue;
    ++checked;
    const auto core = extract_minimal_core(q);
    CHECK(decide_sat(core.core).tag == Verdict::kUnsatisfiable);
    for (std::size_t i = 0; i < core.core.num_terms(); ++i) {
      CHECK(decide_sat(without_term(core.core, i)).tag == Verdict::kSatisfiable);
    }
    CHECK(certificate_holds(core));
    CHECK(extract_minimal_core(q).core == core.core);
  }
  CHECK(checked >= 5);
}

TEST_CASE("enforcing gadget on the entangled figure instance") {
  const auto core = builtin_core();
  CHECK(default_split_choice(core.core) == std::pair<std::size_t, QubitIndex>{0, 0});
  const auto g = build_enforcing_gadget(core);
  CHECK(g.dummy_qubit == 3);
  CHECK(g.lambda_index == 0);
  CHECK(g.pivot == 0);
  CHECK(g.ancilla_qubits == std::vector<QubitIndex>{0, 1, 2});
  CHECK(g.penalty_constant == doctest::Approx(core.core_lambda0));
  CHECK(g.gadget.num_qubits == 4);
  REQUIRE(g.gadget.num_terms() == 5);

  // singlet(1,2), |00>(0,2), |11>(0,2) kept; the two branches on qubit 1 carry |1>_dummy
  CHECK(support_of(g.gadget.terms[0]) == Support{1, 2});
  CHECK(support_of(g.gadget.terms[1]) == Support{0, 2});
  CHECK(support_of(g.gadget.terms[2]) == Support{0, 2});
  Eigen::MatrixXcd branch_sum = Eigen::MatrixXcd::Zero(4, 4);
  for (std::size_t i = 3; i < 5; ++i) {
    CHECK(support_of(g.gadget.terms[i]) == Support{1, 3});
    branch_sum += local_matrix(g.gadget.terms[i]);
  }
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected(1, 1) = 1.0;  // |0>_1 |1>_d
  expected(3, 3) = 1.0;  // |1>_1 |1>_d
  CHECK((branch_sum - expected).norm() < 1e-12);

  CHECK(degree_of(g.gadget, 3) == 2);
  CHECK(g.checks.dummy_degree == 2);
  CHECK(degree_profile(g.gadget).max_degree <= degree_profile(core.core).max_degree + 1);
}

TEST_CASE("gadget sector energies against a 16-dimensional oracle") {
  const auto core = builtin_core();
  const auto g = build_enforcing_gadget(core);
  const Eigen::MatrixXcd s = qt::oracle_matrix(g.gadget);
  for (int bit = 0; bit < 2; ++bit) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index x = 0; x < 16; ++x) {
      if ((x & 1) == bit) idx.push_back(x);
    }
    Eigen::MatrixXcd block(8, 8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) block(i, j) = s(idx[i], idx[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues()(0);
    if (bit == 0) {
      CHECK(lowest <= 1e-9);
      CHECK(std::abs(g.checks.dummy_zero_lambda0 - lowest) < 1e-10);
    } else {
      CHECK(lowest >= core.core_lambda0 - 1e-9);
      CHECK(std::abs(g.checks.dummy_one_lambda0 - lowest) < 1e-10);
    }
  }
  CHECK(decide_sat(g.gadget).tag == Verdict::kSatisfiable);
}

TEST_CASE("gadget with a rank-1 split and explicit choices") {
  const auto core = builtin_core();
  // |00>(0,2) is a product state: one branch, dummy degree 1
  const auto g = build_enforcing_gadget(core, 2, 2, 7);
  CHECK(g.dummy_qubit == 7);
  CHECK(g.checks.dummy_degree == 1);
  CHECK(g.gadget.num_terms() == 4);
  CHECK_THROWS_AS(build_enforcing_gadget(core, 0, 2, 3), ArgumentError);
  CHECK_THROWS_AS(build_enforcing_gadget(core, 0, 0, 2), ArgumentError);
  CHECK_THROWS_AS(build_enforcing_gadget(core, 9, 0, 3), ArgumentError);
}

TEST_CASE("property: gadget from every split of the builtin core is satisfiable") {
  const auto core = builtin_core();
  for (std::size_t i = 0; i < core.core.num_terms(); ++i) {
    for (QubitIndex pivot : support_of(core.core.terms[i])) {
      const auto g = build_enforcing_gadget(core, i, pivot, 3);
      CHECK(ground_energy(g.gadget).lambda0 <= 1e-9);
      CHECK(g.checks.dummy_one_lambda0 >= core.core_lambda0 - 1e-9);
    }
  }
}

TEST_CASE("reduction of a satisfiable two-qubit term") {
  const auto q = make_instance(2, {basis_term({0, 1}, "00")});
  const auto core = builtin_core();
  const auto out = build_reduction(q, 3, core);
  CHECK(out.t_instance.num_qubits == 6);
  CHECK(out.num_dummies == 1);
  CHECK(out.target_k == 3);
  CHECK(locality(out.t_instance) == 3);
  CHECK(out.role_map == std::vector<QubitRole>{QubitRole::kWork, QubitRole::kWork, QubitRole::kDummy,
                                                QubitRole::kAncilla, QubitRole::kAncilla, QubitRole::kAncilla});
  CHECK(out.adjusted_gap == doctest::Approx(std::min(1e-3, core.core_lambda0)));
  CHECK(std::abs(qt::oracle_lambda0(out.t_instance)) < 1e-12);
  const auto report = verify_reduction(q, out);
  CHECK(report.passed());
  CHECK(report.spectra_checked);
  CHECK(std::abs(report.lambda0_t) < 1e-10);
  CHECK(degree_of(out.t_instance, 2) == 3);
}

TEST_CASE("reduction keeps a large input energy above c_k") {
  // |0><0| + |1><1| on one qubit: E = 1 > c_k
  const auto q = make_instance(1, {basis_term({0}, "0"), basis_term({0}, "1")});
  const auto core = builtin_core();
  REQUIRE(core.core_lambda0 < 1.0);
  const auto out = build_reduction(q, 2, core);
  CHECK(out.num_dummies == 2);
  CHECK(out.t_instance.num_qubits == 1 + 2 + 2 * 3);
  const double e_t = qt::oracle_lambda0(out.t_instance);
  CHECK(e_t >= core.core_lambda0 - 1e-8);
  const auto report = verify_reduction(q, out);
  CHECK(report.passed());
  CHECK(report.lambda0_t == doctest::Approx(e_t).epsilon(1e-8));
}

TEST_CASE("target locality equal to the input leaves the instance untouched") {
  const auto q = figure_instances().entangled;
  const auto out = build_reduction(q, 2, builtin_core());
  CHECK(out.t_instance == q);
  CHECK(out.num_dummies == 0);
  CHECK(out.adjusted_gap == q.promise_gap);
  CHECK(verify_reduction(q, out).passed());
}

TEST_CASE("reduction argument errors") {
  const auto core = builtin_core();
  CHECK_THROWS_AS(build_reduction(figure_instances().entangled, 1, core), ArgumentError);
  const auto general = QsatInstance{1, {GeneralTerm{{0}, Eigen::MatrixXcd::Identity(2, 2)}}, 1e-3};
  CHECK_THROWS_AS(build_reduction(general, 2, core), ArgumentError);
}

TEST_CASE("verification catches a dummy term that does not commute with Z") {
  const auto q = make_instance(2, {basis_term({0, 1}, "00")});
  auto out = build_reduction(q, 3, builtin_core());
  const double r = 1.0 / std::sqrt(2.0);
  out.t_instance.terms[0] = make_term({0, 1, 2}, {r, r, 0, 0, 0, 0, 0, 0});  // |00>|+>
  const auto report = verify_reduction(q, out);
  CHECK_FALSE(report.dummy_z_commutes);
  CHECK_FALSE(report.passed());
  CHECK(report.noncommuting_terms == std::vector<std::size_t>{0});
}

TEST_CASE("verification of an empty instance passes vacuously") {
  const QsatInstance q{2, {}, 1e-3};
  const auto out = build_reduction(q, 3, builtin_core());
  CHECK(out.num_dummies == 0);
  CHECK(verify_reduction(q, out).passed());
}

TEST_CASE("verification refuses oversized reductions") {
  const auto q = make_instance(2, {basis_term({0, 1}, "00")});
  const auto out = build_reduction(q, 3, builtin_core());
  SolverOptions opts;
  opts.max_qubits = 5;
  CHECK_THROWS_AS(verify_reduction(q, out, opts), CapacityError);
}

TEST_CASE("property: every dummy has degree three") {
  CounterRng rng(37);
  const auto core = builtin_core();
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = qt::random_instance(4, 1 + rng.next_u64() % 4, 2, rng);
    const std::size_t k = locality(q) + 1 + rng.next_u64() % 2;
    const auto out = build_reduction(q, k, core);
    const auto profile = degree_profile(out.t_instance);
    for (std::size_t i = 0; i < out.role_map.size(); ++i) {
      if (out.role_map[i] == QubitRole::kDummy) CHECK(profile.per_qubit[i] == 3);
    }
    CHECK(locality(out.t_instance) == k);
    CHECK(out.max_degree_by_role.dummy == 3);
  }
}

#include <doctest.h>

#include <cmath>

#include "qsat/ensembles.hpp"
#include "qsat/errors.hpp"
#include "qsat/spectral.hpp"
#include "test_support.hpp"

using namespace qsat;
namespace qt = qsat::testing;

TEST_CASE("assemble: |0><0| on qubit 0 of two is diag(1,1,0,0)") {
  const auto op = assemble(make_instance(2, {basis_term({0}, "0")}));
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK((op.to_dense() - expected).norm() < 1e-15);
}

TEST_CASE("assemble is linear and the empty sum is zero") {
  CounterRng rng(3);
  const auto t = qt::random_term({1, 0}, rng);
  const auto one = assemble(make_instance(3, {t})).to_dense();
  const auto two = assemble(make_instance(3, {t, t})).to_dense();
  CHECK((two - 2.0 * one).norm() < 1e-13);
  CHECK(assemble(QsatInstance{3, {}, 1e-3}).to_dense().norm() == 0.0);
}

TEST_CASE("assemble matches the entrywise oracle in both modes") {
  CounterRng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 6;
    auto q = qt::random_instance(n, 1 + rng.next_u64() % 5, 4, rng);
    q.terms.emplace_back(GeneralTerm{{n - 1}, Eigen::MatrixXcd::Identity(2, 2)});
    const auto oracle = qt::oracle_matrix(q);
    const QsatOperator dense(q, true);
    const QsatOperator free(q, false);
    CHECK(dense.is_dense());
    CHECK_FALSE(free.is_dense());
    CHECK((dense.to_dense() - oracle).norm() < 1e-12);
    CHECK((free.to_dense() - oracle).norm() < 1e-12);
    const auto v = qt::random_unit(std::size_t{1} << n, rng);
    CHECK((free * v - oracle * v).norm() < 1e-12);
  }
}

TEST_CASE("assemble refuses instances above the qubit ceiling") {
  SolverOptions opts;
  opts.max_qubits = 4;
  CHECK_THROWS_AS(assemble(QsatInstance{5, {}, 1e-3}, opts), CapacityError);
  CHECK_THROWS_AS(ground_energy(QsatInstance{5, {}, 1e-3}, opts), CapacityError);
}

TEST_CASE("ground energy examples") {
  const auto identity = make_instance(1, {basis_term({0}, "0"), basis_term({0}, "1")});
  CHECK(ground_energy(identity).lambda0 == doctest::Approx(1.0).epsilon(1e-12));

  const auto singlet = make_instance(2, {singlet_term(0, 1)});
  CHECK(std::abs(ground_energy(singlet).lambda0) < 1e-12);

  const auto fig_b = figure_instances().entangled;
  const auto r = ground_energy(fig_b);
  CHECK(r.lambda0 > 0.1);
  CHECK(r.lambda0 == doctest::Approx(qt::oracle_lambda0(fig_b)).epsilon(1e-12));
  CHECK(r.e0 == r.lambda0 / 4.0);
  REQUIRE(r.ground_vector);
  CHECK(r.ground_vector->norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.residual <= 1e-8);
}

TEST_CASE("empty instance has lambda0 = e0 = 0") {
  const auto r = ground_energy(QsatInstance{3, {}, 1e-3});
  CHECK(r.lambda0 == 0.0);
  CHECK(r.e0 == 0.0);
}

TEST_CASE("common null space examples") {
  CHECK(common_nullspace_dim(QsatInstance{3, {}, 1e-3}) == 8);
  CHECK(common_nullspace_dim(make_instance(1, {basis_term({0}, "0")})) == 1);
  CHECK(common_nullspace_dim(figure_instances().entangled) == 0);
  CHECK(common_nullspace_dim(figure_instances().classical) == 2);

  const auto basis = common_nullspace(make_instance(2, {singlet_term(0, 1)}));
  CHECK(basis.cols() == 3);
  CHECK((basis.adjoint() * basis - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);

  SolverOptions opts;
  opts.dense_limit = 4;
  CHECK_THROWS_AS(common_nullspace_dim(QsatInstance{5, {}, 1e-3}, opts), CapacityError);
}

TEST_CASE("decide_sat examples") {
  const auto a = decide_sat(figure_instances().classical);
  CHECK(a.tag == Verdict::kSatisfiable);
  CHECK(expectation(figure_instances().classical, basis_state(3, "000")) < 1e-12);

  const auto b = decide_sat(figure_instances().entangled);
  CHECK(b.tag == Verdict::kUnsatisfiable);
  CHECK(b.lambda0 >= 1e-6);
  CHECK(b.nullspace_dim == std::optional<std::size_t>(0));
  CHECK(b.promise_gap == 1e-3);

  const auto e = decide_sat(QsatInstance{2, {}, 1e-3});
  CHECK(e.tag == Verdict::kSatisfiable);
  CHECK(e.lambda0 == 0.0);
  CHECK(e.sat_tolerance == 1e-9);
}

TEST_CASE("decide_sat reports the indeterminate band") {
  // two nearly parallel single-qubit projectors: lambda0 = 1 - |<a|b>| is tiny but nonzero
  const double theta = 1e-4;
  const auto q = make_instance(1, {basis_term({0}, "0"), make_term({0}, {std::cos(theta), std::sin(theta)})});
  const auto v = decide_sat(q);
  CHECK(v.lambda0 == doctest::Approx(1.0 - std::cos(theta)).epsilon(1e-6));
  CHECK(v.tag == Verdict::kIndeterminate);
  CHECK(v.sat_tolerance == 2e-9);
}

TEST_CASE("forced methods agree with auto") {
  SolverOptions dense;
  dense.method = Method::kDense;
  SolverOptions krylov;
  krylov.method = Method::kKrylov;
  const auto q = figure_instances().entangled;
  const auto d = ground_energy(q, dense);
  const auto k = ground_energy(q, krylov);
  CHECK(d.method == Method::kDense);
  CHECK(k.method == Method::kKrylov);
  CHECK(std::abs(d.lambda0 - k.lambda0) < 1e-9);
  CHECK(k.residual <= 1e-8);
}

TEST_CASE("dense path refuses sizes above its limit") {
  SolverOptions opts;
  opts.method = Method::kDense;
  opts.dense_limit = 3;
  CHECK_THROWS_AS(ground_energy(QsatInstance{4, {basis_term({0}, "0")}, 1e-3}, opts), CapacityError);
}

TEST_CASE("krylov reports non-convergence with its best iterate") {
  SolverOptions opts;
  opts.krylov_dimension = 4;
  opts.krylov_keep = 2;
  opts.max_restarts = 1;
  opts.residual_tolerance = 1e-15;
  const Eigen::VectorXd diag = Eigen::VectorXd::LinSpaced(400, 0.0, 1.0);
  const MatVec mv = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out = diag.cast<Complex>().cwiseProduct(in);
  };
  try {
    krylov_lowest(mv, Eigen::VectorXcd::Ones(400), opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_vector().size() == 400);
    CHECK(e.best_residual() > 1e-15);
    CHECK(e.best_value() >= -1e-12);
  }
}

TEST_CASE("sector energies fix chosen qubits") {
  const auto q = make_instance(2, {basis_term({0}, "0"), basis_term({0, 1}, "11")});
  CHECK(std::abs(sector_ground_energy(q, {{0, 0}}).lambda0 - 1.0) < 1e-12);
  CHECK(std::abs(sector_ground_energy(q, {{0, 1}}).lambda0) < 1e-12);
  CHECK(std::abs(sector_ground_energy(q, {{0, 1}, {1, 1}}).lambda0 - 1.0) < 1e-12);
  SolverOptions krylov;
  krylov.method = Method::kKrylov;
  CHECK(std::abs(sector_ground_energy(q, {{0, 0}}, krylov).lambda0 - 1.0) < 1e-9);
}

TEST_CASE("operator_dominates examples") {
  const auto i2 = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd zero_proj = Eigen::MatrixXcd::Zero(2, 2);
  zero_proj(0, 0) = 1.0;
  CHECK(operator_dominates(zero_proj, zero_proj, 1e-12));
  CHECK_FALSE(operator_dominates(zero_proj, i2, 1e-9));
  CHECK(operator_dominates(i2, zero_proj, 1e-12));
  CHECK_THROWS_AS(operator_dominates(i2, Eigen::MatrixXcd::Identity(4, 4), 1e-9), ShapeError);

  // |1><1| (x) I + |0><0| (x) I on the second qubit is I, which dominates the singlet projector
  const auto split = make_instance(2, {basis_term({1}, "1"), basis_term({1}, "0")});
  CHECK(operator_dominates(split, make_instance(2, {singlet_term(0, 1)}), 1e-9));
  CHECK_FALSE(operator_dominates(make_instance(2, {basis_term({1}, "1")}), make_instance(2, {singlet_term(0, 1)}), 1e-9));
  CHECK_THROWS_AS(operator_dominates(make_instance(2, {}), make_instance(3, {}), 1e-9), ShapeError);
}

TEST_CASE("eigenvalue helpers") {
  Eigen::MatrixXcd h(2, 2);
  h << 2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  CHECK(min_eigenvalue(h) == doctest::Approx(1.0));
  const auto [value, vec] = lowest_eigenpair(h);
  CHECK(value == doctest::Approx(1.0));
  CHECK((h * vec - value * vec).norm() < 1e-12);
  const auto all = eigenvalues(h);
  CHECK(all(0) == doctest::Approx(1.0));
  CHECK(all(1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(min_eigenvalue(Eigen::MatrixXcd::Zero(2, 3)), ShapeError);
}

TEST_CASE("property: positivity and agreement with the oracle") {
  CounterRng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 6;
    const auto q = qt::random_instance(n, rng.next_u64() % 8, 3, rng);
    const auto r = ground_energy(q);
    CHECK(r.lambda0 >= -1e-9);
    if (q.num_terms() > 0) {
      CHECK(r.e0 == r.lambda0 / static_cast<double>(q.num_terms()));
      CHECK(std::abs(r.lambda0 - qt::oracle_lambda0(q)) < 1e-9);
    }
  }
}

TEST_CASE("property: null-space dimension matches the oracle kernel") {
  CounterRng rng(23);
  std::size_t sat = 0;
  std::size_t unsat = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 6;
    const bool basis = trial % 2 == 0;
    const auto q = qt::random_instance(n, rng.next_u64() % (2 * n + 3), 3, rng, basis);
    const std::size_t dim = common_nullspace_dim(q);
    CHECK(dim == qt::oracle_kernel_dim(q));
    const double lambda0 = ground_energy(q).lambda0;
    CHECK((dim >= 1) == (lambda0 <= 1e-9));
    (dim >= 1 ? sat : unsat) += 1;
  }
  CHECK(sat > 10);
  CHECK(unsat > 10);
}

TEST_CASE("property: adding a term never lowers lambda0") {
  CounterRng rng(24);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 6;
    const auto q = qt::random_instance(n, rng.next_u64() % 6, 3, rng);
    const auto extra = qt::random_instance(n, 1, 3, rng).terms[0];
    CHECK(ground_energy(with_term(q, extra)).lambda0 >= ground_energy(q).lambda0 - 1e-10);
  }
}

TEST_CASE("property: dense and Krylov agree for 8 to 10 qubits") {
  CounterRng rng(25);
  SolverOptions dense;
  dense.method = Method::kDense;
  SolverOptions krylov;
  krylov.method = Method::kKrylov;
  for (std::size_t n = 8; n <= 10; ++n) {
    const auto q = qt::random_instance(n, n + 2, 3, rng);
    const auto d = ground_energy(q, dense);
    const auto k = ground_energy(q, krylov);
    CHECK(std::abs(d.lambda0 - k.lambda0) < 1e-7);
  }
}

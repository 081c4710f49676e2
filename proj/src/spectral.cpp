#include "qsat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <Eigen/Dense>

#include "qsat/errors.hpp"
#include "qsat/random.hpp"

namespace qsat {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kAuto: return "auto";
    case Method::kDense: return "dense";
    case Method::kKrylov: return "krylov";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kSatisfiable: return "satisfiable";
    case Verdict::kUnsatisfiable: return "unsatisfiable";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "unknown";
}

std::size_t SolverOptions::qubit_ceiling() const {
  return max_qubits == 0 ? qsat::max_qubits() : max_qubits;
}

namespace {

/// Orthonormal columns spanning the range of a projector on its support.
Eigen::MatrixXcd term_factors(const Term& term) {
  if (const auto* r = std::get_if<RankOneTerm>(&term)) return r->amplitudes;
  const auto& m = std::get<GeneralTerm>(term).matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  const auto& values = solver.eigenvalues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > 0.5) keep.push_back(i);
  }
  Eigen::MatrixXcd factors(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    factors.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(keep[c]);
  }
  return factors;
}

/// Calls fn(base) for every global index whose bits under `mask` are zero.
template <typename Fn>
void for_each_fiber(Eigen::Index dimension, Eigen::Index mask, Fn&& fn) {
  const Eigen::Index complement = (dimension - 1) & ~mask;
  Eigen::Index base = 0;
  do {
    fn(base);
    base = (base - complement) & complement;
  } while (base != 0);
}

void check_capacity(const QsatInstance& instance, const SolverOptions& options) {
  if (instance.num_qubits > options.qubit_ceiling()) {
    throw CapacityError("instance has " + std::to_string(instance.num_qubits) +
                        " qubits; ceiling is " + std::to_string(options.qubit_ceiling()));
  }
}

bool use_dense(const QsatInstance& instance, const SolverOptions& options) {
  switch (options.method) {
    case Method::kDense:
      if (instance.num_qubits > options.dense_limit) {
        throw CapacityError("dense solve requested for " + std::to_string(instance.num_qubits) +
                            " qubits; dense limit is " + std::to_string(options.dense_limit));
      }
      return true;
    case Method::kKrylov:
      return false;
    case Method::kAuto:
      break;
  }
  return instance.num_qubits <= options.dense_cutoff;
}

Eigen::VectorXcd random_start(Eigen::Index dimension, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::VectorXcd v(dimension);
  for (Eigen::Index i = 0; i < dimension; ++i) v(i) = rng.complex_normal();
  return v;
}

double sat_tolerance(const QsatInstance& instance, const SolverOptions& options) {
  return options.sat_tolerance_per_term *
         static_cast<double>(std::max<std::size_t>(1, instance.num_terms()));
}

}  // namespace

QsatOperator::QsatOperator(const QsatInstance& instance, bool materialize)
    : num_qubits_(instance.num_qubits) {
  const std::size_t n = num_qubits_;
  for (const auto& term : instance.terms) {
    const Support& support = support_of(term);
    const std::size_t k = support.size();
    EmbeddedTerm e;
    e.factors = term_factors(term);
    e.offsets.resize(std::size_t{1} << k);
    for (std::size_t local = 0; local < e.offsets.size(); ++local) {
      Eigen::Index offset = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if ((local >> (k - 1 - j)) & 1U) offset |= qubit_mask(n, support[j]);
      }
      e.offsets[local] = offset;
    }
    for (auto q : support) e.support_mask |= qubit_mask(n, q);
    terms_.push_back(std::move(e));
  }
  if (materialize) dense_ = to_dense();
}

void QsatOperator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  if (dense_) {
    out.noalias() = *dense_ * in;
    return;
  }
  out.setZero(dimension());
  const Complex* x = in.data();
  Complex* y = out.data();
  for (const auto& term : terms_) {
    const std::size_t width = term.offsets.size();
    const Eigen::Index rank = term.factors.cols();
    const Eigen::Index* offsets = term.offsets.data();
    if (rank == 0) continue;
    if (rank == 1) {
      const Complex* psi = term.factors.data();
      for_each_fiber(dimension(), term.support_mask, [&](Eigen::Index base) {
        Complex overlap = 0.0;
        for (std::size_t i = 0; i < width; ++i) overlap += std::conj(psi[i]) * x[base + offsets[i]];
        if (overlap == Complex(0.0)) return;
        for (std::size_t i = 0; i < width; ++i) y[base + offsets[i]] += psi[i] * overlap;
      });
      continue;
    }
    Eigen::VectorXcd local(static_cast<Eigen::Index>(width));
    Eigen::VectorXcd coeffs(rank);
    for_each_fiber(dimension(), term.support_mask, [&](Eigen::Index base) {
      for (std::size_t i = 0; i < width; ++i) local(static_cast<Eigen::Index>(i)) = x[base + offsets[i]];
      coeffs.noalias() = term.factors.adjoint() * local;
      local.noalias() = term.factors * coeffs;
      for (std::size_t i = 0; i < width; ++i) y[base + offsets[i]] += local(static_cast<Eigen::Index>(i));
    });
  }
}

Eigen::VectorXcd QsatOperator::operator*(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(dimension());
  apply(in, out);
  return out;
}

Eigen::MatrixXcd QsatOperator::to_dense() const {
  if (dense_) return *dense_;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dimension(), dimension());
  for (const auto& term : terms_) {
    const Eigen::MatrixXcd local = term.factors * term.factors.adjoint();
    const auto width = static_cast<Eigen::Index>(term.offsets.size());
    for_each_fiber(dimension(), term.support_mask, [&](Eigen::Index base) {
      for (Eigen::Index j = 0; j < width; ++j) {
        const Eigen::Index col = base + term.offsets[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < width; ++i) {
          q(base + term.offsets[static_cast<std::size_t>(i)], col) += local(i, j);
        }
      }
    });
  }
  return q;
}

QsatOperator assemble(const QsatInstance& instance, const SolverOptions& options) {
  require_valid(instance);
  check_capacity(instance, options);
  return QsatOperator(instance, use_dense(instance, options));
}

double min_eigenvalue(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw ShapeError("min_eigenvalue: matrix not square");
  const auto n = static_cast<lapack_int>(hermitian.rows());
  if (n == 0) throw ShapeError("min_eigenvalue: empty matrix");
  Eigen::MatrixXcd a = hermitian;
  Eigen::VectorXd w(n);
  Eigen::VectorXcd z(1);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n, 0.0, 0.0,
                                         1, 1, 0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), 1, isuppz.data());
  if (info != 0) throw Error("zheevr failed with info " + std::to_string(info));
  return w(0);
}

std::pair<double, Eigen::VectorXcd> lowest_eigenpair(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw ShapeError("lowest_eigenpair: matrix not square");
  const auto n = static_cast<lapack_int>(hermitian.rows());
  if (n == 0) throw ShapeError("lowest_eigenpair: empty matrix");
  Eigen::MatrixXcd a = hermitian;
  Eigen::VectorXd w(n);
  Eigen::VectorXcd z(n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n, 0.0, 0.0,
                                         1, 1, 0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), n, isuppz.data());
  if (info != 0) throw Error("zheevr failed with info " + std::to_string(info));
  return {w(0), z};
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw ShapeError("eigenvalues: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

SpectralResult krylov_lowest(const MatVec& matvec, Eigen::VectorXcd start,
                             const SolverOptions& options) {
  const Eigen::Index dim = start.size();
  const double start_norm = start.norm();
  if (dim == 0 || start_norm == 0.0) throw ArgumentError("krylov_lowest: zero start vector");

  const auto basis = static_cast<Eigen::Index>(
      std::max<std::size_t>(2, std::min<std::size_t>(options.krylov_dimension, static_cast<std::size_t>(dim))));
  const Eigen::Index keep_target = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(options.krylov_keep), 1, basis - 1);

  Eigen::MatrixXcd v(dim, basis + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis + 1, basis);
  v.col(0) = start / start_norm;
  Eigen::VectorXcd w(dim);
  Eigen::Index locked = 0;

  SpectralResult result;
  result.method = Method::kKrylov;
  double best_value = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_vector = v.col(0);

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::Index active = basis;
    bool invariant = false;
    for (Eigen::Index j = locked; j < basis; ++j) {
      matvec(v.col(j), w);
      ++result.matvecs;
      const double w_norm = w.norm();
      // Classical Gram-Schmidt, twice.
      Eigen::VectorXcd coeffs = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * coeffs;
      const Eigen::VectorXcd again = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * again;
      coeffs += again;
      h.col(j).head(j + 1) = coeffs;
      const double beta = w.norm();
      h(j + 1, j) = beta;
      if (beta <= 1e-13 * std::max(1.0, w_norm) || beta == 0.0) {
        active = j + 1;
        invariant = true;
        break;
      }
      v.col(j + 1) = w / beta;
    }

    Eigen::MatrixXcd projected = h.topLeftCorner(active, active);
    projected = (0.5 * (projected + projected.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(projected);
    const Eigen::VectorXd& theta = ritz.eigenvalues();
    const Eigen::MatrixXcd& y = ritz.eigenvectors();
    const Eigen::RowVectorXcd tail =
        invariant ? Eigen::RowVectorXcd::Zero(active) : Eigen::RowVectorXcd(h.row(active).head(active));
    const double estimate = std::abs((tail * y.col(0))(0));

    if (estimate <= options.residual_tolerance || invariant) {
      Eigen::VectorXcd x = v.leftCols(active) * y.col(0);
      x.normalize();
      matvec(x, w);
      ++result.matvecs;
      const double value = x.dot(w).real();
      const double residual = (w - value * x).norm();
      if (residual < best_residual) {
        best_value = value;
        best_residual = residual;
        best_vector = x;
      }
      if (residual <= options.residual_tolerance) {
        result.lambda0 = value;
        result.residual = residual;
        result.ground_vector = std::move(x);
        return result;
      }
      if (invariant) {
        // Lost the residual direction; restart from the current best Ritz vector.
        v.col(0) = x;
        h.setZero();
        locked = 0;
        continue;
      }
    } else if (estimate < best_residual) {
      best_value = theta(0);
      best_residual = estimate;
      best_vector = (v.leftCols(active) * y.col(0)).normalized();
    }

    // Thick restart: keep the lowest Ritz vectors plus the residual direction.
    const Eigen::Index keep = std::min(keep_target, active - 1);
    const Eigen::MatrixXcd kept = v.leftCols(active) * y.leftCols(keep);
    const Eigen::RowVectorXcd coupling = tail * y.leftCols(keep);
    v.col(keep) = v.col(active);
    v.leftCols(keep) = kept;
    h.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) h(i, i) = theta(i);
    h.row(keep).head(keep) = coupling;
    locked = keep;
  }
  throw ConvergenceError("Krylov iteration did not reach residual " +
                             std::to_string(options.residual_tolerance),
                         best_value, best_residual, best_vector);
}

SpectralResult ground_energy(const QsatInstance& instance, const SolverOptions& options) {
  const QsatOperator op = assemble(instance, options);
  SpectralResult result;
  if (op.is_dense()) {
    const Eigen::MatrixXcd q = op.to_dense();
    auto [value, vector] = lowest_eigenpair(q);
    result.method = Method::kDense;
    result.lambda0 = value;
    result.residual = (q * vector - value * vector).norm();
    result.ground_vector = std::move(vector);
  } else {
    result = krylov_lowest([&op](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { op.apply(in, out); },
                           random_start(op.dimension(), options.krylov_seed), options);
  }
  const std::size_t m = instance.num_terms();
  result.e0 = m == 0 ? 0.0 : result.lambda0 / static_cast<double>(m);
  if (!options.want_vector) result.ground_vector.reset();
  return result;
}

SpectralResult sector_ground_energy(const QsatInstance& instance,
                                    const std::vector<std::pair<QubitIndex, int>>& fixed,
                                    const SolverOptions& options) {
  require_valid(instance);
  check_capacity(instance, options);
  const std::size_t n = instance.num_qubits;
  Eigen::Index fixed_mask = 0;
  Eigen::Index fixed_value = 0;
  for (const auto& [qubit, bit] : fixed) {
    if (qubit >= n) throw ArgumentError("sector_ground_energy: qubit out of range");
    if (bit != 0 && bit != 1) throw ArgumentError("sector_ground_energy: bit must be 0 or 1");
    const Eigen::Index mask = qubit_mask(n, qubit);
    if ((fixed_mask & mask) && ((fixed_value & mask) != 0) != (bit == 1)) {
      throw ArgumentError("sector_ground_energy: conflicting values for one qubit");
    }
    fixed_mask |= mask;
    if (bit == 1) fixed_value |= mask;
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Index> sector;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & fixed_mask) == fixed_value) sector.push_back(i);
  }

  const bool dense = use_dense(instance, options);
  const QsatOperator op(instance, false);
  SpectralResult result;
  if (dense) {
    const Eigen::MatrixXcd q = op.to_dense();
    const auto size = static_cast<Eigen::Index>(sector.size());
    Eigen::MatrixXcd sub(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
      for (Eigen::Index i = 0; i < size; ++i) sub(i, j) = q(sector[static_cast<std::size_t>(i)], sector[static_cast<std::size_t>(j)]);
    }
    auto [value, local] = lowest_eigenpair(sub);
    Eigen::VectorXcd vector = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index i = 0; i < size; ++i) vector(sector[static_cast<std::size_t>(i)]) = local(i);
    result.method = Method::kDense;
    result.lambda0 = value;
    result.residual = (sub * local - value * local).norm();
    result.ground_vector = std::move(vector);
  } else {
    auto project = [fixed_mask, fixed_value](Eigen::VectorXcd& x) {
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((i & fixed_mask) != fixed_value) x(i) = 0.0;
      }
    };
    Eigen::VectorXcd start = random_start(dim, options.krylov_seed);
    project(start);
    result = krylov_lowest(
        [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
          op.apply(in, out);
          project(out);
        },
        std::move(start), options);
  }
  const std::size_t m = instance.num_terms();
  result.e0 = m == 0 ? 0.0 : result.lambda0 / static_cast<double>(m);
  if (!options.want_vector) result.ground_vector.reset();
  return result;
}

namespace {

// Right singular vectors of `a` whose singular value is below `threshold`.
// Eigen 3.4's BDCSVD returns a wrong V for some wide complex inputs, so this
// goes through LAPACK's divide-and-conquer driver directly.
Eigen::MatrixXcd right_kernel(const Eigen::MatrixXcd& a, double threshold) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  if (rows == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  Eigen::MatrixXcd work = a;
  Eigen::VectorXd sigma(std::min(rows, cols));
  Eigen::MatrixXcd u(rows, rows);
  Eigen::MatrixXcd vh(cols, cols);
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'A', rows, cols, reinterpret_cast<lapack_complex_double*>(work.data()), rows,
      sigma.data(), reinterpret_cast<lapack_complex_double*>(u.data()), rows,
      reinterpret_cast<lapack_complex_double*>(vh.data()), cols);
  if (info != 0) throw Error("zgesdd failed with info " + std::to_string(info));
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) >= threshold) ++rank;
  return vh.bottomRows(cols - rank).adjoint();
}

}  // namespace

Eigen::MatrixXcd common_nullspace(const QsatInstance& instance, const SolverOptions& options) {
  require_valid(instance);
  const std::size_t n = instance.num_qubits;
  if (n > options.dense_limit || n > options.qubit_ceiling()) {
    throw CapacityError("common_nullspace needs dense factorizations; " + std::to_string(n) +
                        " qubits exceeds the dense limit, use ground_energy instead");
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& term : instance.terms) {
    if (basis.cols() == 0) break;
    const Support& support = support_of(term);
    const Eigen::MatrixXcd factors = term_factors(term);
    std::vector<Eigen::Index> offsets(std::size_t{1} << support.size());
    Eigen::Index mask = 0;
    for (std::size_t local = 0; local < offsets.size(); ++local) {
      Eigen::Index offset = 0;
      for (std::size_t j = 0; j < support.size(); ++j) {
        if ((local >> (support.size() - 1 - j)) & 1U) offset |= qubit_mask(n, support[j]);
      }
      offsets[local] = offset;
    }
    for (auto q : support) mask |= qubit_mask(n, q);

    // Rows of (F^H ⊗ I) * basis; its kernel is the kernel of (F F^H ⊗ I) * basis.
    const Eigen::Index fibers = dim >> support.size();
    Eigen::MatrixXcd constraint(fibers * factors.cols(), basis.cols());
    Eigen::Index row = 0;
    for_each_fiber(dim, mask, [&](Eigen::Index base) {
      for (Eigen::Index c = 0; c < factors.cols(); ++c) {
        auto out = constraint.row(row++);
        out.setZero();
        for (std::size_t i = 0; i < offsets.size(); ++i) {
          out += std::conj(factors(static_cast<Eigen::Index>(i), c)) * basis.row(base + offsets[i]);
        }
      }
    });

    const Eigen::MatrixXcd kernel = right_kernel(constraint, options.nullspace_threshold);
    const Eigen::Index nullity = kernel.cols();
    if (nullity == 0) return Eigen::MatrixXcd(dim, 0);
    const Eigen::MatrixXcd next = basis * kernel;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(next);
    basis = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, nullity);
  }
  return basis;
}

std::size_t common_nullspace_dim(const QsatInstance& instance, const SolverOptions& options) {
  return static_cast<std::size_t>(common_nullspace(instance, options).cols());
}

SatVerdict decide_sat(const QsatInstance& instance, const SolverOptions& options) {
  SolverOptions solve = options;
  solve.want_vector = false;
  const SpectralResult spectrum = ground_energy(instance, solve);
  SatVerdict verdict;
  verdict.lambda0 = spectrum.lambda0;
  verdict.method = spectrum.method;
  verdict.sat_tolerance = sat_tolerance(instance, options);
  verdict.unsat_floor = options.unsat_floor;
  verdict.promise_gap = instance.promise_gap;
  if (spectrum.lambda0 <= verdict.sat_tolerance) {
    verdict.tag = Verdict::kSatisfiable;
  } else if (spectrum.lambda0 >= verdict.unsat_floor) {
    verdict.tag = Verdict::kUnsatisfiable;
  } else {
    verdict.tag = Verdict::kIndeterminate;
  }
  if (instance.num_qubits <= options.crosscheck_cutoff) {
    verdict.nullspace_dim = common_nullspace_dim(instance, options);
    const bool oracle_sat = *verdict.nullspace_dim >= 1;
    if (verdict.tag != Verdict::kIndeterminate &&
        oracle_sat != (verdict.tag == Verdict::kSatisfiable)) {
      verdict.tag = Verdict::kIndeterminate;
    }
  }
  return verdict;
}

double expectation(const QsatInstance& instance, const Eigen::VectorXcd& v) {
  require_valid(instance);
  const QsatOperator op(instance, false);
  if (v.size() != op.dimension()) throw ShapeError("expectation: vector length mismatch");
  return v.dot(op * v).real();
}

Eigen::VectorXcd basis_state(std::size_t num_qubits, std::string_view bits) {
  if (bits.size() != num_qubits) throw ArgumentError("basis_state: bit string length mismatch");
  Eigen::Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ArgumentError("basis_state: bits must be '0' or '1'");
    index = (index << 1) | (c == '1' ? 1 : 0);
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  v(index) = 1.0;
  return v;
}

bool operator_dominates(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw ShapeError("operator_dominates: operands have different shapes");
  }
  return min_eigenvalue(a - b) >= -tol;
}

bool operator_dominates(const QsatInstance& a, const QsatInstance& b, double tol) {
  if (a.num_qubits != b.num_qubits) {
    throw ShapeError("operator_dominates: operands act on different qubit counts");
  }
  require_valid(a);
  require_valid(b);
  return operator_dominates(QsatOperator(a, false).to_dense(), QsatOperator(b, false).to_dense(), tol);
}

}  // namespace qsat

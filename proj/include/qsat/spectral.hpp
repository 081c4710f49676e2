#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qsat/instance.hpp"

namespace qsat {

enum class Method { kAuto, kDense, kKrylov };

std::string_view to_string(Method method);

struct SolverOptions {
  Method method = Method::kAuto;
  /// Auto mode uses the dense path up to this many qubits, Krylov above.
  std::size_t dense_cutoff = 10;
  /// Hard ceiling for an explicitly requested dense solve (2^13 x 2^13 complex is 1 GiB).
  std::size_t dense_limit = 13;
  /// Global qubit ceiling; 0 means "read max_qubits() at call time".
  std::size_t max_qubits = 0;
  double residual_tolerance = 1e-8;
  /// Satisfiable iff lambda0 <= sat_tolerance_per_term * max(1, m).
  double sat_tolerance_per_term = 1e-9;
  double unsat_floor = 1e-6;
  double nullspace_threshold = 1e-10;
  /// decide_sat cross-checks against the null-space oracle up to this size.
  std::size_t crosscheck_cutoff = 10;
  std::size_t krylov_dimension = 32;
  std::size_t krylov_keep = 8;
  std::size_t max_restarts = 400;
  std::uint64_t krylov_seed = 0x9e3779b97f4a7c15ULL;
  bool want_vector = true;

  std::size_t qubit_ceiling() const;
};

struct SpectralResult {
  double lambda0 = 0.0;
  double e0 = 0.0;
  std::optional<Eigen::VectorXcd> ground_vector;
  Method method = Method::kDense;
  double residual = 0.0;
  std::size_t matvecs = 0;
};

enum class Verdict { kSatisfiable, kUnsatisfiable, kIndeterminate };

std::string_view to_string(Verdict verdict);

struct SatVerdict {
  Verdict tag = Verdict::kIndeterminate;
  double lambda0 = 0.0;
  std::optional<std::size_t> nullspace_dim;
  double sat_tolerance = 0.0;
  double unsat_floor = 0.0;
  double promise_gap = 0.0;
  Method method = Method::kDense;
};

/// Q = sum_i Pi_i on the 2^n-dimensional space. Holds a dense matrix when
/// assembled densely, otherwise applies terms fiber by fiber on demand.
class QsatOperator {
 public:
  QsatOperator(const QsatInstance& instance, bool materialize);

  std::size_t num_qubits() const { return num_qubits_; }
  Eigen::Index dimension() const { return Eigen::Index{1} << num_qubits_; }
  bool is_dense() const { return dense_.has_value(); }

  /// out = Q * in.
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& in) const;

  Eigen::MatrixXcd to_dense() const;

 private:
  struct EmbeddedTerm {
    std::vector<Eigen::Index> offsets;  // 2^k global offsets of local basis states
    Eigen::Index support_mask = 0;
    Eigen::MatrixXcd factors;  // columns are orthonormal; term = factors * factors^H
  };

  std::size_t num_qubits_;
  std::vector<EmbeddedTerm> terms_;
  std::optional<Eigen::MatrixXcd> dense_;
};

/// Global bit position of `qubit` in an n-qubit big-endian basis index.
inline Eigen::Index qubit_mask(std::size_t num_qubits, QubitIndex qubit) {
  return Eigen::Index{1} << (num_qubits - 1 - qubit);
}

/// Throws CapacityError above the qubit ceiling. Dense iff the resolved method is dense.
QsatOperator assemble(const QsatInstance& instance, const SolverOptions& options = {});

SpectralResult ground_energy(const QsatInstance& instance, const SolverOptions& options = {});

/// Minimum of <phi|Q|phi> over unit states whose listed qubits are fixed to the
/// given computational basis values.
SpectralResult sector_ground_energy(const QsatInstance& instance,
                                    const std::vector<std::pair<QubitIndex, int>>& fixed,
                                    const SolverOptions& options = {});

/// Orthonormal basis of the common null space of all terms, intersected in
/// input order with singular-value thresholding.
Eigen::MatrixXcd common_nullspace(const QsatInstance& instance, const SolverOptions& options = {});
std::size_t common_nullspace_dim(const QsatInstance& instance, const SolverOptions& options = {});

SatVerdict decide_sat(const QsatInstance& instance, const SolverOptions& options = {});

/// <v|Q|v> for a (not necessarily normalized) vector v.
double expectation(const QsatInstance& instance, const Eigen::VectorXcd& v);

Eigen::VectorXcd basis_state(std::size_t num_qubits, std::string_view bits);

/// Lowest eigenvalue of a Hermitian matrix (LAPACK zheevr).
double min_eigenvalue(const Eigen::MatrixXcd& hermitian);

/// Lowest eigenpair of a Hermitian matrix.
std::pair<double, Eigen::VectorXcd> lowest_eigenpair(const Eigen::MatrixXcd& hermitian);

/// Every eigenvalue, ascending. Intended for small verification matrices.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& hermitian);

/// A ⪰ B up to tol: min eig(A - B) >= -tol. Throws ShapeError on mismatch.
bool operator_dominates(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol);
bool operator_dominates(const QsatInstance& a, const QsatInstance& b, double tol);

/// Matrix-free restarted Krylov (Krylov-Schur) search for the lowest eigenpair
/// of a Hermitian operator. `start` must be non-zero.
using MatVec = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;
SpectralResult krylov_lowest(const MatVec& matvec, Eigen::VectorXcd start,
                             const SolverOptions& options);

}  // namespace qsat

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qdw {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Malformed or out-of-contract input (bad label, bad dimensions, invalid state).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical assumption the computation relies on was found not to hold.
class NumericalAssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxQubits = 8;

/// Number of qubits for a register of dimension `dim`; throws unless `dim` is a power of two.
int qubits_for_dim(std::size_t dim);

/// Density matrix over a qubit register.
///
/// Construction validates the state: Hermitian within 1e-12, unit trace within
/// 1e-12, and no eigenvalue below -1e-10. The partition groups qubits into
/// subsystems, most significant (leftmost) first; by default every qubit is its
/// own subsystem.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);
  DensityMatrix(CMatrix entries, std::vector<int> qubit_partition);

  /// Symmetrizes and renormalizes a matrix that is a state up to rounding,
  /// then validates it.
  static DensityMatrix from_noisy(const CMatrix& entries, std::vector<int> qubit_partition = {});

  const CMatrix& matrix() const { return entries_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  int num_qubits() const { return num_qubits_; }
  const std::vector<int>& partition() const { return partition_; }

  /// Same entries, new grouping of qubits into subsystems.
  DensityMatrix with_partition(std::vector<int> qubit_partition) const;

 private:
  CMatrix entries_;
  std::vector<int> partition_;
  int num_qubits_ = 0;
};

/// Tensor product of single-qubit Pauli operators, leftmost symbol most significant.
class PauliLabel {
 public:
  explicit PauliLabel(std::string symbols);

  const std::string& str() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool is_identity() const;
  bool operator==(const PauliLabel&) const = default;
  auto operator<=>(const PauliLabel&) const = default;

  /// All 4^n labels on n qubits, lexicographic in I < X < Y < Z.
  static std::vector<PauliLabel> all(int num_qubits);
  static PauliLabel identity(int num_qubits);

 private:
  std::string symbols_;
};

CMatrix tensor(const CMatrix& a, const CMatrix& b);

/// Traces out every subsystem of `rho.partition()` not listed in `keep`.
/// The result keeps the kept blocks in their original order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

/// Partial transpose on the first `num_top_qubits` qubits.
CMatrix partial_transpose_top(const CMatrix& m, int num_top_qubits);

/// Real eigenvalues in descending order. Rejects input that is not Hermitian within 1e-10.
std::vector<double> hermitian_eigenvalues(const CMatrix& m);

/// Shannon entropy in bits of a spectrum, with 0 log 0 = 0. Values in [-1e-10, 0)
/// are treated as 0; anything more negative is rejected.
double spectrum_entropy(std::span<const double> eigenvalues);

/// von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entropy of a Hermitian PSD matrix without the unit-trace requirement, sum of -l log2 l.
double unnormalized_entropy(const CMatrix& m);

/// Singular values in descending order.
std::vector<double> singular_values(const RMatrix& m);

CMatrix pauli_realize(const PauliLabel& label);

/// Tr(rho * P) for a Pauli string, computed without forming P.
double pauli_expectation(const CMatrix& rho, const PauliLabel& label);

bool is_unitary(const CMatrix& u, double tol = 1e-10);

}  // namespace qdw

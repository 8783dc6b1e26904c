#include "qdw/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace qdw {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = 1e-10;

double hermitian_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<int> default_partition(int num_qubits) {
  return std::vector<int>(static_cast<std::size_t>(num_qubits), 1);
}

// Scatter the low bits of `value` into the bit positions listed in `positions`
// (positions are register bit indices, LSB = 0; positions[0] receives the
// most significant bit of value).
std::size_t scatter_bits(std::size_t value, const std::vector<int>& positions) {
  std::size_t out = 0;
  const auto count = positions.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t bit = (value >> (count - 1 - k)) & 1U;
    out |= bit << positions[k];
  }
  return out;
}

}  // namespace

int qubits_for_dim(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw InputError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(dim);
}

DensityMatrix::DensityMatrix(CMatrix entries) : DensityMatrix(std::move(entries), {}) {}

DensityMatrix::DensityMatrix(CMatrix entries, std::vector<int> qubit_partition)
    : entries_(std::move(entries)), partition_(std::move(qubit_partition)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw InputError("density matrix must be square and non-empty");
  }
  num_qubits_ = qubits_for_dim(static_cast<std::size_t>(entries_.rows()));
  if (partition_.empty()) partition_ = default_partition(num_qubits_);
  if (std::any_of(partition_.begin(), partition_.end(), [](int q) { return q <= 0; }) ||
      std::accumulate(partition_.begin(), partition_.end(), 0) != num_qubits_) {
    throw InputError("qubit partition does not sum to the register size");
  }
  if (hermitian_defect(entries_) >= kHermitianTol) {
    throw InputError("density matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - cplx(1.0)) >= kTraceTol) {
    throw InputError("density matrix trace differs from 1");
  }
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTol) {
    throw InputError("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::from_noisy(const CMatrix& entries, std::vector<int> qubit_partition) {
  CMatrix sym = 0.5 * (entries + entries.adjoint());
  const cplx tr = sym.trace();
  if (std::abs(tr) == 0.0) throw InputError("matrix has zero trace");
  sym /= tr.real();
  return DensityMatrix(std::move(sym), std::move(qubit_partition));
}

DensityMatrix DensityMatrix::with_partition(std::vector<int> qubit_partition) const {
  DensityMatrix copy = *this;
  if (qubit_partition.empty()) qubit_partition = default_partition(num_qubits_);
  if (std::any_of(qubit_partition.begin(), qubit_partition.end(), [](int q) { return q <= 0; }) ||
      std::accumulate(qubit_partition.begin(), qubit_partition.end(), 0) != num_qubits_) {
    throw InputError("qubit partition does not sum to the register size");
  }
  copy.partition_ = std::move(qubit_partition);
  return copy;
}

PauliLabel::PauliLabel(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InputError("empty Pauli label");
  if (symbols_.size() > static_cast<std::size_t>(kMaxQubits)) {
    throw InputError("Pauli label longer than " + std::to_string(kMaxQubits) + " qubits");
  }
  for (char c : symbols_) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw InputError("illegal Pauli symbol '" + std::string(1, c) + "' in " + symbols_);
    }
  }
}

bool PauliLabel::is_identity() const {
  return std::all_of(symbols_.begin(), symbols_.end(), [](char c) { return c == 'I'; });
}

std::vector<PauliLabel> PauliLabel::all(int num_qubits) {
  if (num_qubits <= 0 || num_qubits > kMaxQubits) throw InputError("bad qubit count for Pauli basis");
  static constexpr char kSymbols[] = {'I', 'X', 'Y', 'Z'};
  const std::size_t count = std::size_t{1} << (2 * num_qubits);
  std::vector<PauliLabel> out;
  out.reserve(count);
  std::string s(static_cast<std::size_t>(num_qubits), 'I');
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (int q = num_qubits - 1; q >= 0; --q) {
      s[static_cast<std::size_t>(q)] = kSymbols[rest & 3U];
      rest >>= 2;
    }
    out.emplace_back(s);
  }
  return out;
}

PauliLabel PauliLabel::identity(int num_qubits) {
  return PauliLabel(std::string(static_cast<std::size_t>(num_qubits), 'I'));
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto& part = rho.partition();
  const int n = rho.num_qubits();
  std::vector<bool> kept_block(part.size(), false);
  for (int b : keep) {
    if (b < 0 || static_cast<std::size_t>(b) >= part.size()) {
      throw InputError("subsystem index " + std::to_string(b) + " out of range");
    }
    if (kept_block[static_cast<std::size_t>(b)]) throw InputError("subsystem index repeated");
    kept_block[static_cast<std::size_t>(b)] = true;
  }

  // Register bit positions (LSB = 0) for kept and traced qubits, most significant first.
  std::vector<int> kept_bits;
  std::vector<int> traced_bits;
  std::vector<int> new_partition;
  int qubit = 0;
  for (std::size_t b = 0; b < part.size(); ++b) {
    for (int k = 0; k < part[b]; ++k, ++qubit) {
      (kept_block[b] ? kept_bits : traced_bits).push_back(n - 1 - qubit);
    }
    if (kept_block[b]) new_partition.push_back(part[b]);
  }
  if (kept_bits.empty()) throw InputError("partial trace must keep at least one subsystem");

  const std::size_t dk = std::size_t{1} << kept_bits.size();
  const std::size_t dt = std::size_t{1} << traced_bits.size();
  std::vector<std::size_t> kept_index(dk);
  std::vector<std::size_t> traced_index(dt);
  for (std::size_t i = 0; i < dk; ++i) kept_index[i] = scatter_bits(i, kept_bits);
  for (std::size_t t = 0; t < dt; ++t) traced_index[t] = scatter_bits(t, traced_bits);

  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = 0; j < dk; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t t = 0; t < dt; ++t) {
        acc += m(static_cast<Eigen::Index>(kept_index[i] | traced_index[t]),
                 static_cast<Eigen::Index>(kept_index[j] | traced_index[t]));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return DensityMatrix::from_noisy(out, std::move(new_partition));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

CMatrix partial_transpose_top(const CMatrix& m, int num_top_qubits) {
  const auto dim = m.rows();
  const int n = qubits_for_dim(static_cast<std::size_t>(dim));
  if (num_top_qubits < 0 || num_top_qubits > n) throw InputError("bad partial-transpose split");
  const Eigen::Index d_rest = Eigen::Index{1} << (n - num_top_qubits);
  const Eigen::Index d_top = Eigen::Index{1} << num_top_qubits;
  CMatrix out(dim, dim);
  for (Eigen::Index a = 0; a < d_top; ++a) {
    for (Eigen::Index b = 0; b < d_top; ++b) {
      out.block(a * d_rest, b * d_rest, d_rest, d_rest) = m.block(b * d_rest, a * d_rest, d_rest, d_rest);
    }
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("eigenvalues of a non-square matrix");
  if (m.size() > 0 && hermitian_defect(m) >= 1e-10) throw InputError("matrix is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double spectrum_entropy(std::span<const double> eigenvalues) {
  double h = 0.0;
  for (double l : eigenvalues) {
    if (l < -kPsdTol) throw InputError("negative eigenvalue in entropy");
    if (l <= 0.0) continue;
    l = std::min(l, 1.0);
    h -= l * std::log2(l);
  }
  return h;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const auto ev = hermitian_eigenvalues(rho.matrix());
  return spectrum_entropy(ev);
}

double unnormalized_entropy(const CMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double l = solver.eigenvalues()(i);
    if (l > 0.0) h -= l * std::log2(l);
  }
  return h;
}

std::vector<double> singular_values(const RMatrix& m) {
  if (m.size() == 0) return {};
  const Eigen::JacobiSVD<RMatrix> svd(m);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

CMatrix pauli_realize(const PauliLabel& label) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : label.str()) {
    CMatrix p(2, 2);
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, cplx(0, -1), cplx(0, 1), 0; break;
      default: p << 1, 0, 0, -1; break;
    }
    out = tensor(out, p);
  }
  return out;
}

double pauli_expectation(const CMatrix& rho, const PauliLabel& label) {
  const int n = static_cast<int>(label.size());
  if (rho.rows() != (Eigen::Index{1} << n) || rho.cols() != rho.rows()) {
    throw InputError("Pauli label " + label.str() + " does not match state dimension");
  }
  // P|j> = phase(j) |j ^ flip>, so Tr(rho P) = sum_j rho(j, j ^ flip) phase(j).
  std::size_t flip = 0;
  for (int q = 0; q < n; ++q) {
    const char c = label.str()[static_cast<std::size_t>(q)];
    if (c == 'X' || c == 'Y') flip |= std::size_t{1} << (n - 1 - q);
  }
  cplx acc{0.0, 0.0};
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t j = 0; j < dim; ++j) {
    cplx phase{1.0, 0.0};
    for (int q = 0; q < n; ++q) {
      const bool bit = (j >> (n - 1 - q)) & 1U;
      switch (label.str()[static_cast<std::size_t>(q)]) {
        case 'Y': phase *= bit ? cplx(0, -1) : cplx(0, 1); break;
        case 'Z': if (bit) phase = -phase; break;
        default: break;
      }
    }
    acc += rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ flip)) * phase;
  }
  return acc.real();
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  const CMatrix defect = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return defect.cwiseAbs().maxCoeff() < tol;
}

}  // namespace qdw

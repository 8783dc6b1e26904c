#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qdw/linalg.hpp"

namespace qdw {

/// One clean qubit of bias `epsilon` followed by `n` maximally mixed qubits
/// driven by a controlled `unitary`.
class Dqc1Instance {
 public:
  Dqc1Instance(double epsilon, CMatrix unitary);

  double epsilon() const { return epsilon_; }
  int n() const { return n_; }
  const CMatrix& unitary() const { return unitary_; }

 private:
  double epsilon_;
  int n_;
  CMatrix unitary_;
};

/// ((I + eps Z)/2) (x) I/2^n.
DensityMatrix input_state(const Dqc1Instance& inst);

/// Hadamard on the top qubit then controlled-U (U fires on |1>), applied by
/// explicit conjugation of the input state.
DensityMatrix output_state(const Dqc1Instance& inst);

/// The same state written in block form,
/// (I + eps(|0><1| (x) U^dag + |1><0| (x) U)) / 2^(n+1).
CMatrix output_state_closed_form(const Dqc1Instance& inst);

/// <X (x) I..I> + i <Y (x) I..I> on the output state.
cplx trace_estimate(const Dqc1Instance& inst);

/// diag(a, a, b, 1, a, b, 1, 1) with a = -(e^{-3 pi i/5})^4, b = (e^{-3 pi i/5})^8.
CMatrix jones_unitary();

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix with the phases of R's diagonal absorbed into Q.
CMatrix haar_random_unitary(int dim, std::uint64_t seed);

/// {"dim": d, "re": [[...]], "im": [[...]]}
CMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CMatrix& m);

/// Reads a unitary from a JSON file; rejects non-unitary content.
CMatrix load_unitary(const std::string& path);

/// "jones", "identityN" (N a power of two), or a path to a JSON unitary file.
CMatrix resolve_unitary(const std::string& name_or_path);

}  // namespace qdw

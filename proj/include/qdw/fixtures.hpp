#pragma once

#include <string>
#include <vector>

#include "qdw/linalg.hpp"
#include "qdw/witness.hpp"

namespace qdw {

/// bell, product-fixture, initial-dqc1, final-dqc1 (the last two use the Jones
/// unitary at full bias, i.e. the pseudopure part of the NMR state).
DensityMatrix named_state(const std::string& name);
const std::vector<std::string>& named_state_names();

/// Published truncated correlation matrix of the final DQC1 state: rows
/// I, X, Y, Z and columns III, IZI, IIZ, IZZ, with element uncertainties.
CorrelationMatrix rtrunc_measured();

/// Element uncertainties patterned on the published matrix, for a single-qubit
/// A side: row I 0.007, rows X and Y 0.05, row Z 0.007, except the identity
/// column where row I is exact and row Z carries 0.04.
RMatrix measurement_scale_sigmas(const CorrelationMatrix& r);

}  // namespace qdw

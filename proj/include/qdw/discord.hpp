#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qdw/linalg.hpp"

namespace qdw {

/// Rank-1 projective measurement on a qubit along the Bloch direction
/// (sin t cos p, sin t sin p, cos t); E_0 = (I + n.sigma)/2, E_1 = (I - n.sigma)/2.
struct MeasurementBasis {
  double theta = 0.0;
  double phi = 0.0;

  /// Outcome kets |v_0>, |v_1> with E_k = |v_k><v_k|.
  std::array<Eigen::Vector2cd, 2> kets() const;
  std::array<CMatrix, 2> projectors() const;

  /// Folds arbitrary angles into theta in [0, pi], phi in [0, 2 pi).
  MeasurementBasis canonical() const;

  static MeasurementBasis z() { return {0.0, 0.0}; }
};

/// Grid-then-polish minimizer settings over the measurement sphere.
struct MinimizerOptions {
  int theta_points = 64;
  int phi_points = 64;
  double angle_tolerance = 1e-8;
  /// Number of best grid cells polished by Nelder-Mead.
  int polish_starts = 3;
  int max_polish_iterations = 4000;
};

struct SphereMinimum {
  MeasurementBasis basis;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Deterministic global minimization of f(theta, phi): coarse grid, then
/// Nelder-Mead from the best cells until the simplex is smaller than the
/// angular tolerance.
SphereMinimum minimize_on_sphere(const std::function<double(double, double)>& f, const MinimizerOptions& opts);

struct BipartiteDims {
  std::size_t a = 2;
  std::size_t b = 2;
};

struct ConditionalOutcome {
  double probability = 0.0;
  /// Empty for a null outcome (probability below 1e-14).
  std::optional<DensityMatrix> state;
};

inline constexpr double kNullOutcomeProbability = 1e-14;

/// Outcome k of measuring `basis` on the first qubit; B is the remainder.
ConditionalOutcome conditional_state(const DensityMatrix& rho, const MeasurementBasis& basis, int k);

/// I(A:B) = H(A) + H(B) - H(AB) in bits, A being the leading qubits.
double mutual_information(const DensityMatrix& rho, BipartiteDims dims);

/// min over bases of sum_k p_k H(rho_B|k) is the quantity minimized.
double conditional_entropy_term(const CMatrix& rho, std::size_t dim_b, const MeasurementBasis& basis);

struct DiscordResult {
  double discord = 0.0;
  MeasurementBasis argmin_basis;
  double mutual_information = 0.0;
  double classical_correlations = 0.0;
  double conditional_term = 0.0;
  double entropy_a = 0.0;
  double entropy_b = 0.0;
  double entropy_ab = 0.0;
  std::size_t evaluations = 0;
};

/// D(A:B) = H(A) - H(AB) + min sum_k p_k H(rho_B|k) for a qubit A, in bits,
/// clipped at zero.
DiscordResult discord(const DensityMatrix& rho, BipartiteDims dims, const MinimizerOptions& opts = {});

/// sum_k (E_k (x) I) rho (E_k (x) I), E_k acting on the first qubit.
DensityMatrix projective_average(const DensityMatrix& rho, const MeasurementBasis& basis);

/// Frobenius distance between rho and its projective average in `basis`.
double dephasing_distance(const CMatrix& rho, std::size_t dim_b, const MeasurementBasis& basis);

struct ZeroDiscordTest {
  bool zero_discord = false;
  double min_distance = 0.0;
  MeasurementBasis closest_basis;
  /// Set only when zero_discord holds.
  std::optional<MeasurementBasis> witness_basis;
};

inline constexpr double kZeroDiscordTolerance = 1e-7;

/// True iff some projective measurement on the first qubit leaves rho
/// invariant to within `tol` in Frobenius norm.
ZeroDiscordTest is_zero_discord(const DensityMatrix& rho, double tol = kZeroDiscordTolerance,
                                const MinimizerOptions& opts = {});

struct ScalingExtrapolation {
  double value = 0.0;
  double exponent = 2.0;
  double coefficient = 0.0;
  bool degenerate = false;
  std::vector<double> epsilons;
  std::vector<double> discords;
};

/// Discord of the DQC1 output at a polarization too small for direct double
/// precision: D(eps) at eps in {1e-2, 3e-3, 1e-3}, fit log D = p log eps + log c,
/// return c * alpha^2. Throws NumericalAssumptionError when p falls outside
/// [1.9, 2.1]; returns zero when every sampled discord vanishes.
ScalingExtrapolation discord_at_small_polarization(const CMatrix& unitary, double alpha_target,
                                                   const MinimizerOptions& opts = {});

struct HaarSurvey {
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;
  std::vector<double> exponents;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Extrapolated discord at `alpha` for Haar unitaries on n qubits, one per
/// seed base_seed, base_seed + 1, ... Seeds are evaluated on `threads` workers;
/// results do not depend on the worker count.
HaarSurvey haar_discord_survey(int n, double alpha, std::size_t num_seeds, std::uint64_t base_seed,
                               const MinimizerOptions& opts = {}, unsigned threads = 0);

}  // namespace qdw

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qdw/discord.hpp"
#include "qdw/linalg.hpp"
#include "qdw/witness.hpp"

namespace qdw {

// CODATA 2018 (both exact in the 2019 SI).
inline constexpr double kReducedPlanck = 1.054571817e-34;  // J s
inline constexpr double kBoltzmann = 1.380649e-23;         // J / K

/// Ground-state bias hbar gamma B0 / (2 k_B T). gamma in rad s^-1 T^-1.
double boltzmann_polarization(double gamma, double b0, double temperature);

/// (1 - alpha) I / 2^N + alpha pps.
DensityMatrix embed(const DensityMatrix& pps, double alpha);

struct NmrEnsemble {
  double alpha;
  DensityMatrix pps;

  DensityMatrix physical_state() const { return embed(pps, alpha); }
};

/// {"alpha": a, "pps": "<named state>" | {"dim": d, "re": ..., "im": ...}}
NmrEnsemble ensemble_from_json(const nlohmann::json& j);
NmrEnsemble load_ensemble(const std::filesystem::path& path);

struct PolarizationInvariance {
  bool invariant = false;
  bool pps_zero_discord = false;
  std::vector<double> alphas;
  std::vector<bool> zero_discord;
  std::vector<double> min_distance;
};

/// Runs the zero-discord test on pps and on embed(pps, alpha) for every alpha;
/// invariant holds iff all verdicts agree.
PolarizationInvariance verdict_polarization_invariance(const DensityMatrix& pps, const std::vector<double>& alphas,
                                                       double tol = kZeroDiscordTolerance,
                                                       const MinimizerOptions& opts = {});

struct Measurement {
  double value;
  double sigma;
};

/// Tr(rho P) plus N(0, sigma) noise; the draw depends only on (seed, label).
Measurement simulate_measurement(const DensityMatrix& rho, const PauliLabel& observable, double sigma,
                                 std::uint64_t seed);

/// Correlation matrix of rho with every element drawn by simulate_measurement
/// at the given per-element sigmas.
CorrelationMatrix measured_correlation_matrix(const DensityMatrix& rho, BipartiteDims dims, const RMatrix& sigmas,
                                              std::uint64_t seed);

}  // namespace qdw

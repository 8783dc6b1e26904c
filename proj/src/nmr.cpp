#include "qdw/nmr.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "qdw/dqc1.hpp"
#include "qdw/fixtures.hpp"

namespace qdw {

double boltzmann_polarization(double gamma, double b0, double temperature) {
  if (!(gamma > 0.0) || !(temperature > 0.0) || b0 < 0.0) {
    throw InputError("polarization needs positive gyromagnetic ratio and temperature and a non-negative field");
  }
  return kReducedPlanck * gamma * b0 / (2.0 * kBoltzmann * temperature);
}

DensityMatrix embed(const DensityMatrix& pps, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("polarization must lie in (0, 1]");
  const auto d = static_cast<Eigen::Index>(pps.dim());
  const CMatrix mixed = CMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix::from_noisy((1.0 - alpha) * mixed + alpha * pps.matrix(), pps.partition());
}

NmrEnsemble ensemble_from_json(const nlohmann::json& j) {
  try {
    const double alpha = j.at("alpha").get<double>();
    const auto& p = j.at("pps");
    DensityMatrix pps = p.is_string() ? named_state(p.get<std::string>())
                                      : DensityMatrix::from_noisy(matrix_from_json(p));
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("ensemble alpha must lie in (0, 1]");
    return {alpha, std::move(pps)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("ensemble JSON: ") + e.what());
  }
}

NmrEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ensemble file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("ensemble file " + path.string() + ": " + e.what());
  }
  return ensemble_from_json(j);
}

PolarizationInvariance verdict_polarization_invariance(const DensityMatrix& pps, const std::vector<double>& alphas,
                                                       double tol, const MinimizerOptions& opts) {
  PolarizationInvariance out;
  out.alphas = alphas;
  out.pps_zero_discord = is_zero_discord(pps, tol, opts).zero_discord;
  out.invariant = true;
  for (double alpha : alphas) {
    const auto test = is_zero_discord(embed(pps, alpha), tol, opts);
    out.zero_discord.push_back(test.zero_discord);
    out.min_distance.push_back(test.min_distance);
    if (test.zero_discord != out.pps_zero_discord) out.invariant = false;
  }
  return out;
}

Measurement simulate_measurement(const DensityMatrix& rho, const PauliLabel& observable, double sigma,
                                 std::uint64_t seed) {
  if (sigma < 0.0) throw InputError("measurement sigma must be non-negative");
  const double exact = pauli_expectation(rho.matrix(), observable);
  if (sigma == 0.0) return {exact, 0.0};
  // Base-4 code of the label, offset so labels of different length differ.
  std::uint64_t code = 1;
  for (char c : observable.str()) {
    code = code * 4 + static_cast<std::uint64_t>(c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(code), static_cast<std::uint32_t>(code >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, sigma);
  return {exact + normal(rng), sigma};
}

CorrelationMatrix measured_correlation_matrix(const DensityMatrix& rho, BipartiteDims dims, const RMatrix& sigmas,
                                              std::uint64_t seed) {
  CorrelationMatrix r = correlation_matrix(rho, dims);
  if (sigmas.rows() != r.values.rows() || sigmas.cols() != r.values.cols()) {
    throw InputError("sigma matrix shape does not match the correlation matrix");
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t j = 0; j < r.cols.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      r.values(ii, jj) = simulate_measurement(rho, PauliLabel(r.rows[i].str() + r.cols[j].str()), sigmas(ii, jj), seed).value;
    }
  }
  r.sigmas = sigmas;
  r.validate();
  return r;
}

}  // namespace qdw

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qdw/discord.hpp"
#include "qdw/linalg.hpp"

namespace qdw {

/// r_nm = Tr(rho (A_n (x) B_m)), so rho = 2^-N sum r_nm A_n (x) B_m.
/// Rows are indexed by Pauli strings on A, columns by Pauli strings on B.
struct CorrelationMatrix {
  std::vector<PauliLabel> rows;
  std::vector<PauliLabel> cols;
  RMatrix values;
  std::optional<RMatrix> sigmas;

  /// Checks shapes and pins the (I..I, I..I) entry to exactly 1 with sigma 0.
  void validate();

  std::optional<std::size_t> column_index(const PauliLabel& label) const;
  std::optional<std::size_t> identity_column() const;
};

CorrelationMatrix correlation_matrix(const DensityMatrix& rho, BipartiteDims dims);

/// 2^-N sum r_nm A_n (x) B_m over the listed rows and columns.
CMatrix pauli_resummation(const CorrelationMatrix& r);

/// Keeps every row and the named columns, in the order given.
CorrelationMatrix extract_columns(const CorrelationMatrix& r, const std::vector<PauliLabel>& labels);

/// Number of singular values of the central values above tau.
int rank_lower_bound(const CorrelationMatrix& r, double tau);

/// Threshold used when none is given: the root-sum-square of the element
/// sigmas, i.e. the expected Frobenius norm of the noise, which bounds any
/// singular value produced by noise alone. Noise-free matrices get 1e-8.
double default_tau(const std::optional<RMatrix>& sigmas);

inline constexpr double kExactTau = 1e-8;
inline constexpr double kDefaultBinWidth = 0.005;
inline constexpr double kDefaultConfidence = 0.99;

struct Histogram {
  std::vector<double> bin_centers;
  std::vector<double> relative_occurrence;
  std::vector<double> cumulative;
};

/// Monte Carlo singular values: one row per sample, one column per singular
/// value (descending), with a histogram per column normalized by
/// n_samples * bin_width.
struct SingularValueDistribution {
  RMatrix samples;
  double bin_width = kDefaultBinWidth;
  std::vector<Histogram> histograms;
  /// Default threshold for the sampled submatrices (mean of default_tau over them).
  double suggested_tau = kExactTau;

  /// Empirical quantile (linear interpolation) of singular value `index`.
  double quantile(std::size_t index, double q) const;
  /// Count of singular values whose (1 - confidence) quantile exceeds tau.
  int rank_lower_bound(double tau, double confidence) const;
};

std::vector<Histogram> build_histograms(const RMatrix& samples, double bin_width);

/// Perturbs every element by N(0, sigma) independently per sample. Sample i
/// draws from a stream derived only from (seed, i).
SingularValueDistribution monte_carlo_svd(const CorrelationMatrix& r, std::size_t n_samples, std::uint64_t seed,
                                          double bin_width = kDefaultBinWidth);

/// Pools singular values over random four-column subsets that always contain
/// the identity column, each perturbed `resamples_per_combo` times.
SingularValueDistribution column_combination_scan(const CorrelationMatrix& r, std::size_t n_combos,
                                                  std::size_t resamples_per_combo, std::uint64_t seed,
                                                  double bin_width = kDefaultBinWidth);

struct MeasuredColumn {
  Eigen::VectorXd values;
  Eigen::VectorXd sigmas;
};

/// Returns the measured column for a B-side label, or nothing when that
/// column cannot be measured.
using ColumnSource = std::function<std::optional<MeasuredColumn>(const PauliLabel&)>;

ColumnSource column_source(const CorrelationMatrix& r);

/// Acquisition order for B-side columns; the first `initial_count` are
/// measured before the first rank test.
struct ColumnPolicy {
  std::vector<PauliLabel> order;
  std::size_t initial_count = 4;

  /// I/Z strings first (for three qubits: III, IZI, IIZ, IZZ, ZII, ...), then
  /// every remaining label in lexicographic order.
  static ColumnPolicy z_sector_first(int num_b_qubits);
};

enum class WitnessOutcome { DiscordWitnessed, Inconclusive };

std::string to_string(WitnessOutcome outcome);

struct WitnessOptions {
  std::optional<double> tau;
  double confidence = kDefaultConfidence;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  double bin_width = kDefaultBinWidth;
};

struct WitnessVerdict {
  WitnessOutcome outcome = WitnessOutcome::Inconclusive;
  int rank_lower_bound = 0;
  std::vector<PauliLabel> columns_used;
  double confidence = kDefaultConfidence;
  double tau = 0.0;
  /// The measured submatrix and its Monte Carlo distribution at the final step.
  CorrelationMatrix measured;
  SingularValueDistribution distribution;
};

/// Measures columns in policy order until the Monte Carlo rank bound exceeds
/// dim(A), or every column has been measured.
WitnessVerdict witness_procedure(const ColumnSource& source, int dim_a, const ColumnPolicy& policy,
                                 const WitnessOptions& opts = {});

CorrelationMatrix correlation_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorrelationMatrix& r);
CorrelationMatrix load_correlation_matrix(const std::filesystem::path& path);

/// Header `bin_center,relative_occurrence,cumulative`, six decimals.
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);
Histogram read_histogram_csv(const std::filesystem::path& path);

}  // namespace qdw

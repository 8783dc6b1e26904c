#include "qdw/witness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qdw {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

RMatrix perturbed(const RMatrix& values, const RMatrix& sigmas, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RMatrix out = values;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double z = normal(rng);
      out(i, j) += sigmas(i, j) * z;
    }
  }
  return out;
}

void store_singular_values(RMatrix& samples, Eigen::Index row, const RMatrix& m) {
  const auto sv = singular_values(m);
  for (std::size_t k = 0; k < sv.size(); ++k) samples(row, static_cast<Eigen::Index>(k)) = sv[k];
}

const RMatrix& require_sigmas(const CorrelationMatrix& r) {
  if (!r.sigmas) throw InputError("Monte Carlo sampling requires element uncertainties");
  return *r.sigmas;
}

}  // namespace

void CorrelationMatrix::validate() {
  if (values.rows() != static_cast<Eigen::Index>(rows.size()) ||
      values.cols() != static_cast<Eigen::Index>(cols.size())) {
    throw InputError("correlation matrix values do not match its row and column labels");
  }
  if (sigmas) {
    if (sigmas->rows() != values.rows() || sigmas->cols() != values.cols()) {
      throw InputError("correlation matrix sigmas do not match the values");
    }
    if ((sigmas->array() < 0.0).any()) throw InputError("negative uncertainty in correlation matrix");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_identity()) continue;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (!cols[j].is_identity()) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (std::abs(values(ii, jj) - 1.0) > 1e-9) throw InputError("identity correlation must equal 1 (unit trace)");
      values(ii, jj) = 1.0;
      if (sigmas) {
        if ((*sigmas)(ii, jj) != 0.0) throw InputError("identity correlation must carry zero uncertainty");
      }
    }
  }
}

std::optional<std::size_t> CorrelationMatrix::column_index(const PauliLabel& label) const {
  const auto it = std::find(cols.begin(), cols.end(), label);
  if (it == cols.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cols.begin());
}

std::optional<std::size_t> CorrelationMatrix::identity_column() const {
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].is_identity()) return j;
  }
  return std::nullopt;
}

CorrelationMatrix correlation_matrix(const DensityMatrix& rho, BipartiteDims dims) {
  if (dims.a * dims.b != rho.dim()) throw InputError("bipartite dimensions do not match the state");
  const int qa = qubits_for_dim(dims.a);
  const int qb = qubits_for_dim(dims.b);
  if (qa == 0 || qb == 0) throw InputError("correlation matrix needs two non-trivial subsystems");
  CorrelationMatrix r;
  r.rows = PauliLabel::all(qa);
  r.cols = PauliLabel::all(qb);
  r.values.resize(static_cast<Eigen::Index>(r.rows.size()), static_cast<Eigen::Index>(r.cols.size()));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t j = 0; j < r.cols.size(); ++j) {
      r.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          pauli_expectation(rho.matrix(), PauliLabel(r.rows[i].str() + r.cols[j].str()));
    }
  }
  r.validate();
  return r;
}

CMatrix pauli_resummation(const CorrelationMatrix& r) {
  if (r.rows.empty() || r.cols.empty()) throw InputError("empty correlation matrix");
  const std::size_t n = r.rows.front().size() + r.cols.front().size();
  const auto dim = Eigen::Index{1} << n;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const CMatrix a = pauli_realize(r.rows[i]);
    for (std::size_t j = 0; j < r.cols.size(); ++j) {
      const double v = r.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) out += v * tensor(a, pauli_realize(r.cols[j]));
    }
  }
  return out / static_cast<double>(dim);
}

CorrelationMatrix extract_columns(const CorrelationMatrix& r, const std::vector<PauliLabel>& labels) {
  CorrelationMatrix out;
  out.rows = r.rows;
  out.cols = labels;
  out.values.resize(r.values.rows(), static_cast<Eigen::Index>(labels.size()));
  if (r.sigmas) out.sigmas = RMatrix(r.values.rows(), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto j = r.column_index(labels[k]);
    if (!j) throw InputError("column " + labels[k].str() + " is not in the correlation matrix");
    out.values.col(static_cast<Eigen::Index>(k)) = r.values.col(static_cast<Eigen::Index>(*j));
    if (r.sigmas) out.sigmas->col(static_cast<Eigen::Index>(k)) = r.sigmas->col(static_cast<Eigen::Index>(*j));
  }
  return out;
}

int rank_lower_bound(const CorrelationMatrix& r, double tau) {
  const auto sv = singular_values(r.values);
  return static_cast<int>(std::count_if(sv.begin(), sv.end(), [tau](double s) { return s > tau; }));
}

double default_tau(const std::optional<RMatrix>& sigmas) {
  if (!sigmas || sigmas->size() == 0 || sigmas->maxCoeff() <= 0.0) return kExactTau;
  return sigmas->norm();
}

double SingularValueDistribution::quantile(std::size_t index, double q) const {
  if (samples.rows() == 0) throw InputError("empty singular-value distribution");
  if (index >= static_cast<std::size_t>(samples.cols())) throw InputError("singular value index out of range");
  std::vector<double> col(samples.col(static_cast<Eigen::Index>(index)).data(),
                          samples.col(static_cast<Eigen::Index>(index)).data() + samples.rows());
  std::sort(col.begin(), col.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(col.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, col.size() - 1);
  return col[lo] + (pos - static_cast<double>(lo)) * (col[hi] - col[lo]);
}

int SingularValueDistribution::rank_lower_bound(double tau, double confidence) const {
  int rank = 0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(samples.cols()); ++k) {
    if (quantile(k, 1.0 - confidence) > tau) ++rank;
  }
  return rank;
}

std::vector<Histogram> build_histograms(const RMatrix& samples, double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("histogram bin width must be positive");
  std::vector<Histogram> out;
  const double n = static_cast<double>(samples.rows());
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    const double top = samples.rows() > 0 ? samples.col(k).maxCoeff() : 0.0;
    const auto bins = static_cast<std::size_t>(std::floor(std::max(top, 0.0) / bin_width)) + 1;
    std::vector<std::size_t> counts(bins, 0);
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      const auto b = static_cast<std::size_t>(std::floor(std::max(samples(i, k), 0.0) / bin_width));
      ++counts[std::min(b, bins - 1)];
    }
    Histogram h;
    std::size_t running = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      running += counts[b];
      h.bin_centers.push_back((static_cast<double>(b) + 0.5) * bin_width);
      h.relative_occurrence.push_back(static_cast<double>(counts[b]) / (n * bin_width));
      h.cumulative.push_back(static_cast<double>(running) / n);
    }
    out.push_back(std::move(h));
  }
  return out;
}

SingularValueDistribution monte_carlo_svd(const CorrelationMatrix& r, std::size_t n_samples, std::uint64_t seed,
                                          double bin_width) {
  const RMatrix& sigmas = require_sigmas(r);
  if (n_samples == 0) throw InputError("Monte Carlo needs at least one sample");
  SingularValueDistribution out;
  out.bin_width = bin_width;
  out.suggested_tau = default_tau(r.sigmas);
  const auto k = std::min(r.values.rows(), r.values.cols());
  out.samples.resize(static_cast<Eigen::Index>(n_samples), k);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto rng = stream(seed, s);
    store_singular_values(out.samples, static_cast<Eigen::Index>(s), perturbed(r.values, sigmas, rng));
  }
  out.histograms = build_histograms(out.samples, bin_width);
  return out;
}

SingularValueDistribution column_combination_scan(const CorrelationMatrix& r, std::size_t n_combos,
                                                  std::size_t resamples_per_combo, std::uint64_t seed,
                                                  double bin_width) {
  const RMatrix& sigmas = require_sigmas(r);
  constexpr std::size_t kSubsetSize = 4;
  if (r.cols.size() < kSubsetSize) throw InputError("column scan needs at least four columns");
  const auto identity = r.identity_column();
  if (!identity) throw InputError("column scan needs the identity column");
  if (n_combos == 0 || resamples_per_combo == 0) throw InputError("column scan needs samples");

  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < r.cols.size(); ++j) {
    if (j != *identity) others.push_back(j);
  }

  SingularValueDistribution out;
  out.bin_width = bin_width;
  const auto k = std::min<Eigen::Index>(r.values.rows(), kSubsetSize);
  out.samples.resize(static_cast<Eigen::Index>(n_combos * resamples_per_combo), k);
  auto picker = stream(seed, 0, 1);
  double tau_sum = 0.0;
  RMatrix sub_values(r.values.rows(), static_cast<Eigen::Index>(kSubsetSize));
  RMatrix sub_sigmas(r.values.rows(), static_cast<Eigen::Index>(kSubsetSize));
  for (std::size_t c = 0; c < n_combos; ++c) {
    // Partial Fisher-Yates: the first three entries become a uniform 3-subset.
    for (std::size_t t = 0; t < kSubsetSize - 1; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, others.size() - 1);
      std::swap(others[t], others[pick(picker)]);
    }
    std::array<std::size_t, kSubsetSize> chosen{*identity, others[0], others[1], others[2]};
    std::sort(chosen.begin() + 1, chosen.end());
    for (std::size_t t = 0; t < kSubsetSize; ++t) {
      sub_values.col(static_cast<Eigen::Index>(t)) = r.values.col(static_cast<Eigen::Index>(chosen[t]));
      sub_sigmas.col(static_cast<Eigen::Index>(t)) = sigmas.col(static_cast<Eigen::Index>(chosen[t]));
    }
    tau_sum += default_tau(sub_sigmas);
    for (std::size_t s = 0; s < resamples_per_combo; ++s) {
      auto rng = stream(seed, c + 1, s + 1);
      store_singular_values(out.samples, static_cast<Eigen::Index>(c * resamples_per_combo + s),
                            perturbed(sub_values, sub_sigmas, rng));
    }
  }
  out.suggested_tau = tau_sum / static_cast<double>(n_combos);
  out.histograms = build_histograms(out.samples, bin_width);
  return out;
}

ColumnSource column_source(const CorrelationMatrix& r) {
  return [r](const PauliLabel& label) -> std::optional<MeasuredColumn> {
    const auto j = r.column_index(label);
    if (!j) return std::nullopt;
    const auto jj = static_cast<Eigen::Index>(*j);
    MeasuredColumn col{r.values.col(jj), Eigen::VectorXd::Zero(r.values.rows())};
    if (r.sigmas) col.sigmas = r.sigmas->col(jj);
    return col;
  };
}

ColumnPolicy ColumnPolicy::z_sector_first(int num_b_qubits) {
  if (num_b_qubits <= 0 || num_b_qubits > kMaxQubits) throw InputError("bad B register size");
  const auto nb = static_cast<std::size_t>(num_b_qubits);
  ColumnPolicy policy;
  std::vector<bool> taken;
  const auto all = PauliLabel::all(num_b_qubits);
  // Bit j of the counter switches on Z at qubit (j + 1) mod n, so the
  // leading qubit is the last to change.
  for (std::size_t mask = 0; mask < (std::size_t{1} << nb); ++mask) {
    std::string s(nb, 'I');
    for (std::size_t j = 0; j < nb; ++j) {
      if ((mask >> j) & 1U) s[(j + 1) % nb] = 'Z';
    }
    policy.order.emplace_back(s);
  }
  for (const auto& label : all) {
    if (std::find(policy.order.begin(), policy.order.end(), label) == policy.order.end()) {
      policy.order.push_back(label);
    }
  }
  return policy;
}

std::string to_string(WitnessOutcome outcome) {
  return outcome == WitnessOutcome::DiscordWitnessed ? "DiscordWitnessed" : "Inconclusive";
}

WitnessVerdict witness_procedure(const ColumnSource& source, int dim_a, const ColumnPolicy& policy,
                                 const WitnessOptions& opts) {
  const int qa = qubits_for_dim(static_cast<std::size_t>(dim_a));
  if (qa == 0) throw InputError("witness needs a non-trivial A side");
  if (!(opts.confidence > 0.0 && opts.confidence < 1.0)) throw InputError("confidence must lie in (0, 1)");
  if (opts.n_samples == 0) throw InputError("witness needs at least one Monte Carlo sample");

  WitnessVerdict verdict;
  verdict.confidence = opts.confidence;
  CorrelationMatrix& m = verdict.measured;
  m.rows = PauliLabel::all(qa);
  m.values.resize(static_cast<Eigen::Index>(m.rows.size()), 0);
  m.sigmas = RMatrix(static_cast<Eigen::Index>(m.rows.size()), 0);

  std::size_t step = 0;
  auto acquire = [&](const PauliLabel& label) {
    auto col = source(label);
    if (!col) return false;
    if (col->values.size() != m.values.rows() || col->sigmas.size() != m.values.rows()) {
      throw InputError("measured column " + label.str() + " has the wrong length");
    }
    const auto j = m.values.cols();
    m.values.conservativeResize(Eigen::NoChange, j + 1);
    m.sigmas->conservativeResize(Eigen::NoChange, j + 1);
    m.values.col(j) = col->values;
    m.sigmas->col(j) = col->sigmas;
    m.cols.push_back(label);
    return true;
  };
  auto test_rank = [&] {
    m.validate();
    verdict.distribution = monte_carlo_svd(m, opts.n_samples, opts.seed + step, opts.bin_width);
    ++step;
    verdict.tau = opts.tau.value_or(verdict.distribution.suggested_tau);
    verdict.rank_lower_bound = verdict.distribution.rank_lower_bound(verdict.tau, opts.confidence);
    return verdict.rank_lower_bound > dim_a;
  };

  std::size_t next = 0;
  std::size_t initial = 0;
  while (next < policy.order.size() && initial < policy.initial_count) {
    if (acquire(policy.order[next])) ++initial;
    ++next;
  }
  bool witnessed = m.values.cols() > 0 && test_rank();
  while (!witnessed && next < policy.order.size()) {
    if (acquire(policy.order[next++])) witnessed = test_rank();
  }
  verdict.outcome = witnessed ? WitnessOutcome::DiscordWitnessed : WitnessOutcome::Inconclusive;
  verdict.columns_used = m.cols;
  return verdict;
}

CorrelationMatrix correlation_matrix_from_json(const nlohmann::json& j) {
  try {
    CorrelationMatrix r;
    for (const auto& s : j.at("rows")) r.rows.emplace_back(s.get<std::string>());
    for (const auto& s : j.at("cols")) r.cols.emplace_back(s.get<std::string>());
    auto read = [&](const nlohmann::json& rowsj) {
      RMatrix m(static_cast<Eigen::Index>(r.rows.size()), static_cast<Eigen::Index>(r.cols.size()));
      if (rowsj.size() != r.rows.size()) throw InputError("correlation matrix JSON: wrong number of rows");
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = rowsj.at(i);
        if (row.size() != r.cols.size()) throw InputError("correlation matrix JSON: wrong number of columns");
        for (std::size_t k = 0; k < r.cols.size(); ++k) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row.at(k).get<double>();
        }
      }
      return m;
    };
    r.values = read(j.at("values"));
    if (j.contains("sigmas") && !j.at("sigmas").is_null()) r.sigmas = read(j.at("sigmas"));
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("correlation matrix JSON: ") + e.what());
  }
}

nlohmann::json to_json(const CorrelationMatrix& r) {
  auto rows_of = [](const RMatrix& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(i)].push_back(m(i, k));
    }
    return out;
  };
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& l : r.rows) j["rows"].push_back(l.str());
  j["cols"] = nlohmann::json::array();
  for (const auto& l : r.cols) j["cols"].push_back(l.str());
  j["values"] = rows_of(r.values);
  if (r.sigmas) j["sigmas"] = rows_of(*r.sigmas);
  return j;
}

CorrelationMatrix load_correlation_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open correlation matrix file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("correlation matrix file " + path.string() + ": " + e.what());
  }
  return correlation_matrix_from_json(j);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "bin_center,relative_occurrence,cumulative\n" << std::fixed << std::setprecision(6);
  for (std::size_t b = 0; b < h.bin_centers.size(); ++b) {
    out << h.bin_centers[b] << ',' << h.relative_occurrence[b] << ',' << h.cumulative[b] << '\n';
  }
}

Histogram read_histogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "bin_center,relative_occurrence,cumulative") throw InputError("unexpected histogram header");
  Histogram h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    h.bin_centers.push_back(std::stod(a));
    h.relative_occurrence.push_back(std::stod(b));
    h.cumulative.push_back(std::stod(c));
  }
  return h;
}

}  // namespace qdw

// Command-line front end: DQC1 simulation, discord, the rank witness and
// Haar surveys. Exit codes: 0 completed (including inconclusive verdicts),
// 2 input error, 3 numerical-assumption failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qdw/discord.hpp"
#include "qdw/dqc1.hpp"
#include "qdw/fixtures.hpp"
#include "qdw/nmr.hpp"
#include "qdw/witness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qdw;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Global {
  std::uint64_t seed = 1;
  std::string out;
};

json resolved_config(const CLI::App& cmd, const Global& g) {
  json cfg;
  cfg["command"] = cmd.get_name();
  cfg["seed"] = g.seed;
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->get_type_size() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      cfg[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    } else {
      cfg[name] = nullptr;
    }
  }
  return cfg;
}

void emit(const json& report, const Global& g, const std::string& summary) {
  if (g.out.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    if (const auto parent = fs::path(g.out).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream f(g.out);
    if (!f) throw InputError("cannot write " + g.out);
    f << report.dump(2) << '\n';
  }
  std::cout << summary << '\n';
}

MinimizerOptions grid_options(int grid) {
  MinimizerOptions o;
  o.theta_points = grid;
  o.phi_points = grid;
  return o;
}

json basis_json(const MeasurementBasis& b) { return {{"theta", b.theta}, {"phi", b.phi}}; }

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DQC1 simulation, quantum discord and correlation-matrix rank witness"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step")->capture_default_str();
  app.add_option("--out", g.out, "Write the JSON report here instead of standard output");

  // simulate
  auto* sim = app.add_subcommand("simulate", "DQC1 trace estimate");
  std::string sim_unitary;
  double sim_epsilon = 1.0;
  sim->add_option("--unitary", sim_unitary, "jones, identityN or a unitary JSON file")->required();
  sim->add_option("--epsilon", sim_epsilon, "Top-qubit bias")->capture_default_str();

  // discord
  auto* dis = app.add_subcommand("discord", "Quantum discord D(A:B) with A the first qubit");
  std::string dis_state, dis_dqc1, dis_ensemble, dis_rho;
  double dis_epsilon = 1.0;
  std::optional<double> dis_alpha;
  bool dis_extrapolate = false;
  int dis_grid = 64;
  int dis_dim_a = 2;
  double dis_tol = kZeroDiscordTolerance;
  auto* src_state = dis->add_option("--state", dis_state, "Named state: bell, product-fixture, initial-dqc1, final-dqc1");
  auto* src_dqc1 = dis->add_option("--dqc1", dis_dqc1, "DQC1 output for this unitary (jones, identityN, file)");
  auto* src_ens = dis->add_option("--ensemble", dis_ensemble, "NMR ensemble JSON {alpha, pps}");
  auto* src_rho = dis->add_option("--rho", dis_rho, "Density matrix JSON {dim, re, im}");
  src_state->excludes(src_dqc1, src_ens, src_rho);
  src_dqc1->excludes(src_ens, src_rho);
  src_ens->excludes(src_rho);
  dis->add_option("--epsilon", dis_epsilon, "DQC1 bias for direct evaluation")->capture_default_str();
  dis->add_option("--alpha", dis_alpha, "NMR polarization (DQC1 bias or embedding weight)");
  dis->add_flag("--extrapolate", dis_extrapolate, "Quadratic-scaling extrapolation to small --alpha");
  dis->add_option("--grid", dis_grid, "Minimizer grid points per angle")->capture_default_str();
  dis->add_option("--dim-a", dis_dim_a, "Dimension of the measured side A")->capture_default_str();
  dis->add_option("--tol", dis_tol, "Zero-discord Frobenius tolerance")->capture_default_str();

  // witness
  auto* wit = app.add_subcommand("witness", "Correlation-matrix rank witness with Monte Carlo errors");
  std::string wit_matrix, wit_state, wit_noise = "measured", wit_hist_dir = ".";
  std::size_t wit_samples = 10000;
  double wit_bin = kDefaultBinWidth;
  std::optional<double> wit_tau;
  double wit_confidence = kDefaultConfidence;
  std::size_t wit_combos = 0;
  std::size_t wit_resamples = 10;
  auto* w_matrix = wit->add_option("--matrix", wit_matrix, "Measured correlation-matrix JSON");
  auto* w_state = wit->add_option("--state", wit_state, "Named state measured column by column");
  w_matrix->excludes(w_state);
  wit->add_option("--noise", wit_noise, "State sources: none, measured (measurement-scale sigmas) or measured-sampled")
      ->check(CLI::IsMember({"none", "measured", "measured-sampled"}))
      ->capture_default_str();
  wit->add_option("--samples", wit_samples, "Monte Carlo samples per rank test")->capture_default_str();
  wit->add_option("--bin", wit_bin, "Histogram bin width")->capture_default_str();
  wit->add_option("--tau", wit_tau, "Zero threshold for singular values (default: RSS of the sigmas)");
  wit->add_option("--confidence", wit_confidence, "Quantile confidence for a nonzero singular value")
      ->capture_default_str();
  wit->add_option("--scan-combos", wit_combos, "Random four-column subsets for the pooled scan (0 = off)")
      ->capture_default_str();
  wit->add_option("--resamples", wit_resamples, "Noise resamples per scanned subset")->capture_default_str();
  wit->add_option("--hist-dir", wit_hist_dir, "Directory for the histogram CSVs")->capture_default_str();

  // haar-survey
  auto* haar = app.add_subcommand("haar-survey", "Extrapolated discord averaged over Haar unitaries");
  std::size_t haar_seeds = 500;
  double haar_alpha = 1.4e-5;
  int haar_n = 3;
  int haar_grid = 64;
  unsigned haar_threads = 0;
  std::string haar_csv;
  haar->add_option("--seeds", haar_seeds, "Number of unitaries (seeds seed, seed+1, ...)")->capture_default_str();
  haar->add_option("--alpha", haar_alpha, "Target polarization")->capture_default_str();
  haar->add_option("--n", haar_n, "Maximally mixed qubits")->capture_default_str();
  haar->add_option("--grid", haar_grid, "Minimizer grid points per angle")->capture_default_str();
  haar->add_option("--threads", haar_threads, "Worker threads (0 = all cores)")->capture_default_str();
  haar->add_option("--csv", haar_csv, "Per-seed CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*sim) {
      const Dqc1Instance inst(sim_epsilon, resolve_unitary(sim_unitary));
      const cplx t = trace_estimate(inst);
      const cplx exact = inst.unitary().trace() / static_cast<double>(inst.unitary().rows());
      json r{{"re", t.real()},
             {"im", t.imag()},
             {"exact_trace", {{"re", exact.real()}, {"im", exact.imag()}}},
             {"epsilon", inst.epsilon()},
             {"n", inst.n()},
             {"config", resolved_config(*sim, g)}};
      emit(r, g, "trace estimate " + sci(t.real()) + " + " + sci(t.imag()) + "i");
      return 0;
    }

    if (*dis) {
      if (dis_dim_a != 2) throw InputError("discord is defined here for a qubit A side only (--dim-a 2)");
      json r{{"config", resolved_config(*dis, g)}};
      if (dis_extrapolate) {
        if (dis_dqc1.empty()) throw InputError("--extrapolate needs --dqc1");
        if (!dis_alpha) throw InputError("--extrapolate needs --alpha");
        const auto ex = discord_at_small_polarization(resolve_unitary(dis_dqc1), *dis_alpha, grid_options(dis_grid));
        r["discord"] = ex.value;
        r["extrapolation"] = {{"exponent", ex.exponent},
                              {"coefficient", ex.coefficient},
                              {"degenerate", ex.degenerate},
                              {"epsilons", ex.epsilons},
                              {"discords", ex.discords}};
        emit(r, g, "discord " + sci(ex.value) + " bits (fitted exponent " + sci(ex.exponent) + ")");
        return 0;
      }
      std::optional<DensityMatrix> rho;
      if (!dis_state.empty()) {
        rho = named_state(dis_state);
        if (dis_alpha) rho = embed(*rho, *dis_alpha);
      } else if (!dis_dqc1.empty()) {
        rho = output_state(Dqc1Instance(dis_alpha.value_or(dis_epsilon), resolve_unitary(dis_dqc1)));
      } else if (!dis_ensemble.empty()) {
        rho = load_ensemble(dis_ensemble).physical_state();
      } else if (!dis_rho.empty()) {
        std::ifstream in(dis_rho);
        if (!in) throw InputError("cannot open " + dis_rho);
        json j;
        try {
          in >> j;
        } catch (const json::exception& e) {
          throw InputError(dis_rho + ": " + e.what());
        }
        rho = DensityMatrix::from_noisy(matrix_from_json(j));
      } else {
        throw InputError("discord needs one of --state, --dqc1, --ensemble or --rho");
      }
      if (rho->dim() < 4) throw InputError("discord needs at least two qubits");
      const auto opts = grid_options(dis_grid);
      const auto d = discord(*rho, {2, rho->dim() / 2}, opts);
      const auto zero = is_zero_discord(*rho, dis_tol, opts);
      r["discord"] = d.discord;
      r["argmin"] = basis_json(d.argmin_basis);
      r["mutual_information"] = d.mutual_information;
      r["classical_correlations"] = d.classical_correlations;
      r["conditional_term"] = d.conditional_term;
      r["entropies"] = {{"A", d.entropy_a}, {"B", d.entropy_b}, {"AB", d.entropy_ab}};
      r["minimizer"] = {{"grid", dis_grid}, {"evaluations", d.evaluations}, {"angle_tolerance", opts.angle_tolerance}};
      r["zero_discord"] = {{"zero", zero.zero_discord},
                           {"min_distance", zero.min_distance},
                           {"closest_basis", basis_json(zero.closest_basis)},
                           {"tolerance", dis_tol}};
      emit(r, g, "discord " + sci(d.discord) + " bits");
      return 0;
    }

    if (*wit) {
      std::optional<CorrelationMatrix> full;
      int qubits_b = 0;
      if (!wit_matrix.empty()) {
        full = load_correlation_matrix(wit_matrix);
        if (!full->sigmas) throw InputError("Monte Carlo rank estimation needs a sigmas block in " + wit_matrix);
        qubits_b = static_cast<int>(full->cols.front().size());
      } else if (!wit_state.empty()) {
        const DensityMatrix rho = named_state(wit_state);
        const BipartiteDims dims{2, rho.dim() / 2};
        CorrelationMatrix exact = correlation_matrix(rho, dims);
        const RMatrix sigmas = wit_noise == "none" ? RMatrix::Zero(exact.values.rows(), exact.values.cols())
                                                   : measurement_scale_sigmas(exact);
        if (wit_noise == "measured-sampled") {
          full = measured_correlation_matrix(rho, dims, sigmas, g.seed);
        } else {
          exact.sigmas = sigmas;
          full = exact;
        }
        qubits_b = rho.num_qubits() - 1;
      } else {
        throw InputError("witness needs --matrix or --state");
      }
      const int dim_a = 1 << static_cast<int>(full->rows.front().size());

      WitnessOptions wo;
      wo.tau = wit_tau;
      wo.confidence = wit_confidence;
      wo.n_samples = wit_samples;
      wo.seed = g.seed;
      wo.bin_width = wit_bin;
      const auto verdict = witness_procedure(column_source(*full), dim_a, ColumnPolicy::z_sector_first(qubits_b), wo);

      json r{{"config", resolved_config(*wit, g)}};
      r["outcome"] = to_string(verdict.outcome);
      r["rank_lower_bound"] = verdict.rank_lower_bound;
      r["dim_a"] = dim_a;
      r["tau"] = verdict.tau;
      r["confidence"] = verdict.confidence;
      std::vector<std::string> used;
      for (const auto& l : verdict.columns_used) used.push_back(l.str());
      r["columns_used"] = used;

      const SingularValueDistribution* dist = &verdict.distribution;
      std::optional<SingularValueDistribution> scan;
      if (wit_combos > 0) {
        scan = column_combination_scan(*full, wit_combos, wit_resamples, g.seed, wit_bin);
        const double scan_tau = wit_tau.value_or(scan->suggested_tau);
        r["scan"] = {{"combos", wit_combos},
                     {"resamples", wit_resamples},
                     {"samples", scan->samples.rows()},
                     {"tau", scan_tau},
                     {"rank_lower_bound", scan->rank_lower_bound(scan_tau, wit_confidence)}};
        dist = &*scan;
      }
      json sv = json::array();
      fs::create_directories(wit_hist_dir);
      for (std::size_t k = 0; k < dist->histograms.size(); ++k) {
        const fs::path file = fs::path(wit_hist_dir) / ("singular_value_" + std::to_string(k + 1) + ".csv");
        write_histogram_csv(file, dist->histograms[k]);
        sv.push_back({{"index", k + 1},
                      {"median", dist->quantile(k, 0.5)},
                      {"lower_quantile", dist->quantile(k, 1.0 - wit_confidence)},
                      {"histogram", file.string()}});
      }
      r["singular_values"] = sv;
      std::string summary = to_string(verdict.outcome) + ", rank >= " + std::to_string(verdict.rank_lower_bound) +
                            " after " + std::to_string(used.size()) + " columns";
      if (scan) summary += "; scan rank " + std::to_string(r["scan"]["rank_lower_bound"].get<int>());
      emit(r, g, summary);
      return 0;
    }

    if (*haar) {
      const auto s = haar_discord_survey(haar_n, haar_alpha, haar_seeds, g.seed, grid_options(haar_grid), haar_threads);
      if (!haar_csv.empty()) {
        std::ofstream csv(haar_csv);
        if (!csv) throw InputError("cannot write " + haar_csv);
        csv << "seed,discord,exponent\n" << std::setprecision(10);
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
          csv << s.seeds[i] << ',' << s.values[i] << ',' << s.exponents[i] << '\n';
        }
      }
      json r{{"config", resolved_config(*haar, g)},
             {"mean", s.mean},
             {"stderr", s.stderr_mean},
             {"n", haar_n},
             {"alpha", haar_alpha},
             {"seeds", s.seeds},
             {"values", s.values}};
      emit(r, g, "mean discord " + sci(s.mean) + " +- " + sci(s.stderr_mean) + " over " + std::to_string(haar_seeds) + " unitaries");
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalAssumptionError& e) {
    std::cerr << "numerical assumption failed: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

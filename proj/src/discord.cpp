#include "qdw/discord.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "qdw/dqc1.hpp"

namespace qdw {

namespace {

constexpr double kPi = std::numbers::pi;

struct Blocks {
  CMatrix b00, b01, b10, b11;
};

Blocks split_first_qubit(const CMatrix& rho, std::size_t dim_b) {
  const auto d = static_cast<Eigen::Index>(dim_b);
  if (rho.rows() != 2 * d) throw InputError("state dimension does not match 2 x dim(B)");
  return {rho.topLeftCorner(d, d), rho.topRightCorner(d, d), rho.bottomLeftCorner(d, d),
          rho.bottomRightCorner(d, d)};
}

// <u|_A rho |v>_A as a dim_b x dim_b block.
CMatrix sandwich(const Blocks& b, const Eigen::Vector2cd& u, const Eigen::Vector2cd& v) {
  return std::conj(u(0)) * v(0) * b.b00 + std::conj(u(0)) * v(1) * b.b01 + std::conj(u(1)) * v(0) * b.b10 +
         std::conj(u(1)) * v(1) * b.b11;
}

void require_qubit_a(const DensityMatrix& rho, BipartiteDims dims) {
  if (dims.a != 2) throw InputError("discord requires a single-qubit A side");
  if (dims.a * dims.b != rho.dim()) throw InputError("bipartite dimensions do not match the state");
}

struct Vertex {
  double theta;
  double phi;
  double value;
};

SphereMinimum nelder_mead(const std::function<double(double, double)>& f, double theta0, double phi0, double step,
                          const MinimizerOptions& opts) {
  std::size_t evals = 0;
  auto eval = [&](double t, double p) {
    ++evals;
    return Vertex{t, p, f(t, p)};
  };
  std::array<Vertex, 3> s = {eval(theta0, phi0), eval(theta0 + step, phi0), eval(theta0, phi0 + step)};
  for (int it = 0; it < opts.max_polish_iterations; ++it) {
    std::sort(s.begin(), s.end(), [](const Vertex& x, const Vertex& y) { return x.value < y.value; });
    double diameter = 0.0;
    for (int k = 1; k < 3; ++k) {
      diameter = std::max(diameter, std::hypot(s[k].theta - s[0].theta, s[k].phi - s[0].phi));
    }
    if (diameter < opts.angle_tolerance) break;

    const double ct = 0.5 * (s[0].theta + s[1].theta);
    const double cp = 0.5 * (s[0].phi + s[1].phi);
    const Vertex refl = eval(2.0 * ct - s[2].theta, 2.0 * cp - s[2].phi);
    if (refl.value < s[0].value) {
      const Vertex expd = eval(3.0 * ct - 2.0 * s[2].theta, 3.0 * cp - 2.0 * s[2].phi);
      s[2] = expd.value < refl.value ? expd : refl;
    } else if (refl.value < s[1].value) {
      s[2] = refl;
    } else {
      const bool outside = refl.value < s[2].value;
      const Vertex contr = outside ? eval(0.5 * (ct + refl.theta), 0.5 * (cp + refl.phi))
                                   : eval(0.5 * (ct + s[2].theta), 0.5 * (cp + s[2].phi));
      if (contr.value < std::min(refl.value, s[2].value)) {
        s[2] = contr;
      } else {
        for (int k = 1; k < 3; ++k) {
          s[k] = eval(0.5 * (s[0].theta + s[k].theta), 0.5 * (s[0].phi + s[k].phi));
        }
      }
    }
  }
  const auto best = *std::min_element(s.begin(), s.end(), [](const Vertex& x, const Vertex& y) { return x.value < y.value; });
  return {MeasurementBasis{best.theta, best.phi}.canonical(), best.value, evals};
}

}  // namespace

std::array<Eigen::Vector2cd, 2> MeasurementBasis::kets() const {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx e = std::polar(1.0, phi);
  Eigen::Vector2cd up(c, e * s);
  Eigen::Vector2cd down(-std::conj(e) * s, c);
  return {up, down};
}

std::array<CMatrix, 2> MeasurementBasis::projectors() const {
  const auto v = kets();
  return {CMatrix(v[0] * v[0].adjoint()), CMatrix(v[1] * v[1].adjoint())};
}

MeasurementBasis MeasurementBasis::canonical() const {
  double t = std::fmod(theta, 2.0 * kPi);
  double p = phi;
  if (t < 0.0) t += 2.0 * kPi;
  if (t > kPi) {
    t = 2.0 * kPi - t;
    p += kPi;
  }
  p = std::fmod(p, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  return {t, p};
}

SphereMinimum minimize_on_sphere(const std::function<double(double, double)>& f, const MinimizerOptions& opts) {
  if (opts.theta_points < 2 || opts.phi_points < 1) throw InputError("minimizer grid too small");
  struct Cell {
    double value;
    int i;
    int j;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(opts.theta_points * opts.phi_points));
  const double dt = kPi / (opts.theta_points - 1);
  const double dp = 2.0 * kPi / opts.phi_points;
  for (int i = 0; i < opts.theta_points; ++i) {
    // Every phi is the same point at the poles.
    const int nphi = (i == 0 || i == opts.theta_points - 1) ? 1 : opts.phi_points;
    for (int j = 0; j < nphi; ++j) cells.push_back({f(i * dt, j * dp), i, j});
  }
  std::size_t evaluations = cells.size();
  const auto starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.polish_starts, 1)), cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(starts), cells.end(),
                    [](const Cell& x, const Cell& y) {
                      return x.value < y.value || (x.value == y.value && std::tie(x.i, x.j) < std::tie(y.i, y.j));
                    });

  SphereMinimum best{MeasurementBasis{cells[0].i * dt, cells[0].j * dp}.canonical(), cells[0].value, 0};
  const double step = 0.5 * std::min(dt, dp);
  for (std::size_t s = 0; s < starts; ++s) {
    const SphereMinimum local = nelder_mead(f, cells[s].i * dt, cells[s].j * dp, step, opts);
    evaluations += local.evaluations;
    if (local.value < best.value) best = local;
  }
  best.evaluations = evaluations;
  return best;
}

ConditionalOutcome conditional_state(const DensityMatrix& rho, const MeasurementBasis& basis, int k) {
  if (k != 0 && k != 1) throw InputError("outcome index must be 0 or 1");
  if (rho.dim() < 4) throw InputError("conditional state needs a non-empty B side");
  const std::size_t dim_b = rho.dim() / 2;
  const auto v = basis.kets()[static_cast<std::size_t>(k)];
  const CMatrix unnormalized = sandwich(split_first_qubit(rho.matrix(), dim_b), v, v);
  const double p = unnormalized.trace().real();
  if (p < kNullOutcomeProbability) return {std::max(p, 0.0), std::nullopt};
  std::vector<int> part(rho.partition());
  // Drop the first qubit from the partition.
  if (part.front() == 1) {
    part.erase(part.begin());
  } else {
    part.front() -= 1;
  }
  return {p, DensityMatrix::from_noisy(unnormalized / p, std::move(part))};
}

double mutual_information(const DensityMatrix& rho, BipartiteDims dims) {
  if (dims.a * dims.b != rho.dim()) throw InputError("bipartite dimensions do not match the state");
  const int qa = qubits_for_dim(dims.a);
  const int qb = qubits_for_dim(dims.b);
  if (qa == 0 || qb == 0) return 0.0;
  const DensityMatrix split = rho.with_partition({qa, qb});
  return von_neumann_entropy(partial_trace(split, {0})) + von_neumann_entropy(partial_trace(split, {1})) -
         von_neumann_entropy(rho);
}

double conditional_entropy_term(const CMatrix& rho, std::size_t dim_b, const MeasurementBasis& basis) {
  const Blocks blocks = split_first_qubit(rho, dim_b);
  double total = 0.0;
  for (const auto& v : basis.kets()) {
    const CMatrix unnormalized = sandwich(blocks, v, v);
    const double p = unnormalized.trace().real();
    if (p < kNullOutcomeProbability) continue;
    // p H(sigma / p) = S(sigma) + p log2 p for the unnormalized sigma.
    total += unnormalized_entropy(unnormalized) + p * std::log2(p);
  }
  return total;
}

DiscordResult discord(const DensityMatrix& rho, BipartiteDims dims, const MinimizerOptions& opts) {
  require_qubit_a(rho, dims);
  const DensityMatrix split = rho.with_partition({1, qubits_for_dim(dims.b)});
  DiscordResult r;
  r.entropy_a = von_neumann_entropy(partial_trace(split, {0}));
  r.entropy_b = von_neumann_entropy(partial_trace(split, {1}));
  r.entropy_ab = von_neumann_entropy(rho);

  const CMatrix& m = rho.matrix();
  const auto minimum = minimize_on_sphere(
      [&](double t, double p) { return conditional_entropy_term(m, dims.b, {t, p}); }, opts);
  r.conditional_term = minimum.value;
  r.argmin_basis = minimum.basis;
  r.evaluations = minimum.evaluations;
  r.mutual_information = r.entropy_a + r.entropy_b - r.entropy_ab;
  r.classical_correlations = r.entropy_b - r.conditional_term;
  r.discord = std::max(0.0, r.mutual_information - r.classical_correlations);
  return r;
}

DensityMatrix projective_average(const DensityMatrix& rho, const MeasurementBasis& basis) {
  if (rho.dim() < 4) throw InputError("projective average needs a non-empty B side");
  const std::size_t dim_b = rho.dim() / 2;
  const Blocks blocks = split_first_qubit(rho.matrix(), dim_b);
  CMatrix out = CMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& v : basis.kets()) {
    out += tensor(CMatrix(v * v.adjoint()), sandwich(blocks, v, v));
  }
  return DensityMatrix::from_noisy(out, rho.partition());
}

double dephasing_distance(const CMatrix& rho, std::size_t dim_b, const MeasurementBasis& basis) {
  // In the measurement basis the dephasing removes exactly the two off-diagonal blocks.
  const auto v = basis.kets();
  return std::sqrt(2.0) * sandwich(split_first_qubit(rho, dim_b), v[0], v[1]).norm();
}

ZeroDiscordTest is_zero_discord(const DensityMatrix& rho, double tol, const MinimizerOptions& opts) {
  if (rho.dim() < 4) throw InputError("zero-discord test needs a non-empty B side");
  const std::size_t dim_b = rho.dim() / 2;
  const CMatrix& m = rho.matrix();
  const auto minimum = minimize_on_sphere(
      [&](double t, double p) {
        const double d = dephasing_distance(m, dim_b, {t, p});
        return d * d;
      },
      opts);
  ZeroDiscordTest out;
  out.min_distance = std::sqrt(std::max(minimum.value, 0.0));
  out.closest_basis = minimum.basis;
  out.zero_discord = out.min_distance < tol;
  if (out.zero_discord) out.witness_basis = minimum.basis;
  return out;
}

ScalingExtrapolation discord_at_small_polarization(const CMatrix& unitary, double alpha_target,
                                                   const MinimizerOptions& opts) {
  if (!(alpha_target > 0.0 && alpha_target < 1e-4)) {
    throw InputError("extrapolation applies only to polarizations in (0, 1e-4)");
  }
  ScalingExtrapolation out;
  out.epsilons = {1e-2, 3e-3, 1e-3};
  for (double eps : out.epsilons) {
    const Dqc1Instance inst(eps, unitary);
    const DensityMatrix rho = output_state(inst);
    out.discords.push_back(discord(rho, {2, rho.dim() / 2}, opts).discord);
  }
  // Below this every sampled value is rounding noise.
  constexpr double kVanishing = 1e-13;
  if (*std::max_element(out.discords.begin(), out.discords.end()) < kVanishing) {
    out.degenerate = true;
    return out;
  }
  if (*std::min_element(out.discords.begin(), out.discords.end()) <= 0.0) {
    throw NumericalAssumptionError("discord vanishes at some but not all sampled polarizations");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(out.epsilons.size());
  for (std::size_t i = 0; i < out.epsilons.size(); ++i) {
    const double x = std::log(out.epsilons[i]);
    const double y = std::log(out.discords[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double log_c = (sy - out.exponent * sx) / k;
  out.coefficient = std::exp(log_c);
  if (out.exponent < 1.9 || out.exponent > 2.1) {
    throw NumericalAssumptionError("fitted discord scaling exponent " + std::to_string(out.exponent) +
                                   " is not quadratic; compute the discord directly instead");
  }
  out.value = out.coefficient * alpha_target * alpha_target;
  return out;
}

HaarSurvey haar_discord_survey(int n, double alpha, std::size_t num_seeds, std::uint64_t base_seed,
                               const MinimizerOptions& opts, unsigned threads) {
  if (n < 1 || n + 1 > kMaxQubits) throw InputError("Haar survey register size out of range");
  if (num_seeds == 0) throw InputError("Haar survey needs at least one seed");
  HaarSurvey out;
  out.seeds.resize(num_seeds);
  out.values.assign(num_seeds, 0.0);
  out.exponents.assign(num_seeds, 0.0);
  for (std::size_t i = 0; i < num_seeds; ++i) out.seeds[i] = base_seed + i;

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, num_seeds));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < num_seeds; i = next++) {
            const CMatrix u = haar_random_unitary(1 << n, out.seeds[i]);
            const auto ex = discord_at_small_polarization(u, alpha, opts);
            out.values[i] = ex.value;
            out.exponents[i] = ex.exponent;
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double count = static_cast<double>(num_seeds);
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / count;
  if (num_seeds > 1) {
    double ss = 0.0;
    for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_mean = std::sqrt(ss / (count - 1.0) / count);
  }
  return out;
}

}  // namespace qdw

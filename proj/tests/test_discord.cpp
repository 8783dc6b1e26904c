#include "doctest.h"

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdw/discord.hpp"
#include "qdw/dqc1.hpp"
#include "qdw/fixtures.hpp"

using namespace qdw;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix zz_state() {
  return DensityMatrix::from_noisy((CMatrix::Identity(4, 4) + pauli_realize(PauliLabel("ZZ"))) / 4.0);
}

BipartiteDims dims_of(const DensityMatrix& rho) { return {2, rho.dim() / 2}; }

}  // namespace

TEST_CASE("measurement basis projectors") {
  for (double t : {0.0, 0.3, 1.7, std::numbers::pi}) {
    for (double p : {0.0, 2.0, 5.5}) {
      const auto e = MeasurementBasis{t, p}.projectors();
      CHECK(max_abs(e[0] + e[1] - CMatrix::Identity(2, 2)) < 1e-12);
      CHECK(max_abs(e[0] * e[0] - e[0]) < 1e-12);
      CHECK(max_abs(e[1] * e[1] - e[1]) < 1e-12);
      const CMatrix ndots = std::sin(t) * std::cos(p) * oracle::pauli1('X') + std::sin(t) * std::sin(p) * oracle::pauli1('Y') +
                            std::cos(t) * oracle::pauli1('Z');
      CHECK(max_abs(e[0] - (CMatrix::Identity(2, 2) + ndots) / 2.0) < 1e-12);
    }
  }
  const auto c = MeasurementBasis{-0.5, -1.0}.canonical();
  CHECK(c.theta == doctest::Approx(0.5));
  CHECK(c.phi == doctest::Approx(std::numbers::pi - 1.0));
}

TEST_CASE("conditional state") {
  SUBCASE("deterministic outcome") {
    CMatrix sigma(2, 2);
    sigma << 0.6, cplx(0.1, 0.1), cplx(0.1, -0.1), 0.4;
    const DensityMatrix rho(tensor(Eigen::Vector2cd(1, 0).asDiagonal().toDenseMatrix(), sigma));
    const auto out = conditional_state(rho, MeasurementBasis::z(), 0);
    CHECK(out.probability == doctest::Approx(1.0));
    REQUIRE(out.state);
    CHECK(max_abs(out.state->matrix() - sigma) < 1e-15);
    const auto null = conditional_state(rho, MeasurementBasis::z(), 1);
    CHECK(null.probability < kNullOutcomeProbability);
    CHECK(!null.state);
  }
  SUBCASE("maximally mixed") {
    const DensityMatrix rho(CMatrix::Identity(4, 4) / 4.0);
    for (int k = 0; k < 2; ++k) {
      const auto out = conditional_state(rho, {1.1, 0.4}, k);
      CHECK(out.probability == doctest::Approx(0.5));
      CHECK(max_abs(out.state->matrix() - CMatrix::Identity(2, 2) / 2.0) < 1e-15);
    }
  }
  SUBCASE("Bell state in Z") {
    const auto out = conditional_state(named_state("bell"), MeasurementBasis::z(), 0);
    CHECK(out.probability == doctest::Approx(0.5));
    CHECK(max_abs(out.state->matrix() - Eigen::Vector2cd(1, 0).asDiagonal().toDenseMatrix()) < 1e-15);
  }
  SUBCASE("probabilities sum to one and match the projector oracle") {
    std::mt19937_64 rng(3);
    const DensityMatrix rho(oracle::ginibre_state(8, rng));
    const MeasurementBasis b{0.9, 2.1};
    double total = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto out = conditional_state(rho, b, k);
      const CMatrix proj = oracle::kron(b.projectors()[static_cast<std::size_t>(k)], CMatrix::Identity(4, 4));
      const CMatrix post = oracle::trace_out_a(proj * rho.matrix() * proj, 2, 4);
      CHECK(out.probability == doctest::Approx(post.trace().real()).epsilon(1e-13));
      CHECK(max_abs(out.state->matrix() - post / post.trace().real()) < 1e-13);
      total += out.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(conditional_state(named_state("bell"), MeasurementBasis::z(), 2), InputError);
}

TEST_CASE("mutual information") {
  CHECK(std::abs(mutual_information(named_state("product-fixture"), {2, 2})) < 1e-9);
  CHECK(mutual_information(named_state("bell"), {2, 2}) == doctest::Approx(2.0).epsilon(1e-12));
  // (II+ZZ)/4 = diag(1/2, 0, 0, 1/2): H(A) = H(B) = H(AB) = 1.
  CHECK(mutual_information(zz_state(), {2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(mutual_information(named_state("bell"), {2, 4}), InputError);

  std::mt19937_64 rng(4);
  const CMatrix rho = oracle::ginibre_state(16, rng);
  const double expected = oracle::entropy_bits(oracle::trace_out_b(rho, 4, 4)) +
                          oracle::entropy_bits(oracle::trace_out_a(rho, 4, 4)) - oracle::entropy_bits(rho);
  CHECK(mutual_information(DensityMatrix(rho), {4, 4}) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("discord of reference states") {
  SUBCASE("product state") {
    const auto r = discord(named_state("product-fixture"), {2, 2});
    CHECK(r.discord < 1e-9);
    CHECK(std::abs(r.discord - (r.mutual_information - r.classical_correlations)) < 1e-9);
  }
  SUBCASE("Bell state") {
    const auto r = discord(named_state("bell"), {2, 2});
    CHECK(r.discord == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracle::dense_grid_discord(named_state("bell").matrix(), 2, 20) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.mutual_information == doctest::Approx(2.0));
    CHECK(r.classical_correlations == doctest::Approx(1.0));
  }
  SUBCASE("(II+ZZ)/4 vanishes in the Z basis") {
    const auto r = discord(zz_state(), {2, 2});
    CHECK(r.discord < 1e-9);
    CHECK(std::abs(std::cos(r.argmin_basis.theta)) == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(discord(named_state("final-dqc1"), {4, 4}), InputError);
  CHECK_THROWS_AS(discord(named_state("bell"), {2, 4}), InputError);
}

TEST_CASE("discord agrees with a dense-grid oracle on random states") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = oracle::ginibre_state(4, rng);
    const double exact = discord(DensityMatrix(rho), {2, 2}).discord;
    const double grid = oracle::dense_grid_discord(rho, 2, 60);
    // The grid can only overestimate the minimum.
    CHECK(exact <= grid + 1e-12);
    CHECK(grid - exact < 1e-3);
  }
}

TEST_CASE("discord is non-negative") {
  std::mt19937_64 rng(13);
  MinimizerOptions coarse;
  coarse.theta_points = 16;
  coarse.phi_points = 16;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index db = Eigen::Index{1} << (1 + trial % 3);
    const DensityMatrix rho(trial % 2 ? oracle::ginibre_state(2 * db, rng) : oracle::classical_quantum_state(db, rng));
    const auto r = discord(rho, dims_of(rho), coarse);
    CHECK(r.mutual_information - r.classical_correlations >= -1e-9);
    CHECK(r.discord >= 0.0);
  }
}

TEST_CASE("discord is invariant under local unitaries") {
  std::mt19937_64 rng(14);
  const DensityMatrix rho(oracle::ginibre_state(8, rng));
  const double base = discord(rho, {2, 4}).discord;
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix u = tensor(oracle::random_unitary(2, rng), oracle::random_unitary(4, rng));
    const DensityMatrix rotated = DensityMatrix::from_noisy(u * rho.matrix() * u.adjoint());
    CHECK(std::abs(discord(rotated, {2, 4}).discord - base) < 1e-7);
  }
}

TEST_CASE("DQC1 discord grows with bias for the Jones unitary") {
  double previous = -1.0;
  for (int k = 0; k <= 10; ++k) {
    const DensityMatrix rho = output_state(Dqc1Instance(0.1 * k, jones_unitary()));
    const double d = discord(rho, {2, 8}).discord;
    CHECK(d >= previous - 1e-12);
    previous = d;
  }
  CHECK(previous > 0.01);
}

TEST_CASE("denser grid does not move the minimum") {
  MinimizerOptions dense;
  dense.theta_points = 128;
  dense.phi_points = 128;
  for (const auto& name : named_state_names()) {
    const DensityMatrix rho = named_state(name);
    CHECK(std::abs(discord(rho, dims_of(rho)).discord - discord(rho, dims_of(rho), dense).discord) < 1e-8);
  }
}

TEST_CASE("projective average") {
  const MeasurementBasis z = MeasurementBasis::z();
  SUBCASE("fixed point for states diagonal in the basis") {
    const DensityMatrix rho = zz_state();
    CHECK(max_abs(projective_average(rho, z).matrix() - rho.matrix()) < 1e-15);
  }
  SUBCASE("Bell state loses its coherences") {
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = expected(3, 3) = 0.5;
    CHECK(max_abs(projective_average(named_state("bell"), z).matrix() - expected) < 1e-15);
  }
  SUBCASE("X coherence erased") {
    const CMatrix plus = (CMatrix::Identity(2, 2) + oracle::pauli1('X')) / 2.0;
    const DensityMatrix rho(tensor(plus, CMatrix::Identity(2, 2) / 2.0));
    CHECK(max_abs(projective_average(rho, z).matrix() - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
  }
  SUBCASE("idempotent and matches the projector sum") {
    std::mt19937_64 rng(15);
    const DensityMatrix rho(oracle::ginibre_state(8, rng));
    const MeasurementBasis b{2.2, 0.7};
    const DensityMatrix once = projective_average(rho, b);
    CHECK(max_abs(projective_average(once, b).matrix() - once.matrix()) < 1e-12);
    CMatrix direct = CMatrix::Zero(8, 8);
    for (const auto& e : b.projectors()) {
      const CMatrix p = oracle::kron(e, CMatrix::Identity(4, 4));
      direct += p * rho.matrix() * p;
    }
    CHECK(max_abs(once.matrix() - direct) < 1e-14);
    CHECK(dephasing_distance(rho.matrix(), 4, b) == doctest::Approx((rho.matrix() - direct).norm()).epsilon(1e-12));
  }
}

TEST_CASE("zero-discord test") {
  const auto product = is_zero_discord(named_state("product-fixture"));
  CHECK(product.zero_discord);
  REQUIRE(product.witness_basis);

  const auto bell = is_zero_discord(named_state("bell"));
  CHECK(!bell.zero_discord);
  CHECK(!bell.witness_basis);
  // Brute-force grid over explicit projector sums: every basis leaves
  // two off-diagonal blocks of norm 1/2.
  double grid_min = 1e300;
  const CMatrix rho = named_state("bell").matrix();
  for (int i = 0; i <= 30; ++i) {
    for (int j = 0; j < 60; ++j) {
      CMatrix avg = CMatrix::Zero(4, 4);
      for (const auto& e : MeasurementBasis{std::numbers::pi * i / 30, std::numbers::pi * j / 30}.projectors()) {
        const CMatrix p = oracle::kron(e, CMatrix::Identity(2, 2));
        avg += p * rho * p;
      }
      grid_min = std::min(grid_min, (rho - avg).norm());
    }
  }
  CHECK(grid_min == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(bell.min_distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

  const auto dqc1 = is_zero_discord(output_state(Dqc1Instance(0.5, jones_unitary())));
  CHECK(!dqc1.zero_discord);
  CHECK(dqc1.min_distance > 1e-3);

  const auto zz = is_zero_discord(zz_state());
  CHECK(zz.zero_discord);
  CHECK(std::abs(std::cos(zz.witness_basis->theta)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("zero-discord verdict agrees with the discord value") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    const DensityMatrix rho(trial % 2 ? oracle::ginibre_state(8, rng) : oracle::classical_quantum_state(4, rng));
    const auto test = is_zero_discord(rho);
    const double d = discord(rho, {2, 4}).discord;
    CHECK(test.zero_discord == (d < 1e-6));
    if (test.zero_discord) {
      CHECK(dephasing_distance(rho.matrix(), 4, *test.witness_basis) < kZeroDiscordTolerance);
    }
  }
}

TEST_CASE("small-polarization extrapolation") {
  SUBCASE("identity short-circuits to zero") {
    for (int d : {2, 8}) {
      const auto r = discord_at_small_polarization(CMatrix::Identity(d, d), 1.4e-5);
      CHECK(r.degenerate);
      CHECK(r.value == 0.0);
    }
  }
  SUBCASE("Jones unitary scales quadratically") {
    const auto r = discord_at_small_polarization(jones_unitary(), 1.4e-5);
    CHECK(!r.degenerate);
    CHECK(std::abs(r.exponent - 2.0) < 0.02);
    CHECK(r.discords.size() == 3);
    CHECK(r.discords[0] > r.discords[1]);
  }
  CHECK_THROWS_AS(discord_at_small_polarization(jones_unitary(), 1e-3), InputError);
}

TEST_CASE("Haar survey is deterministic and thread-count independent") {
  MinimizerOptions coarse;
  coarse.theta_points = 16;
  coarse.phi_points = 16;
  const auto one = haar_discord_survey(2, 1.4e-5, 6, 50, coarse, 1);
  const auto many = haar_discord_survey(2, 1.4e-5, 6, 50, coarse, 4);
  CHECK(one.values == many.values);
  CHECK(one.seeds.front() == 50);
  CHECK(one.mean > 0.0);
  const auto single = haar_discord_survey(2, 1.4e-5, 1, 77, coarse, 1);
  CHECK(single.values.size() == 1);
  CHECK(single.stderr_mean == 0.0);
  CHECK(single.values == haar_discord_survey(2, 1.4e-5, 1, 77, coarse, 1).values);
}

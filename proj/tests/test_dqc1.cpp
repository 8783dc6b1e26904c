#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "qdw/dqc1.hpp"

using namespace qdw;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Jones trace summed by hand from the eight diagonal entries.
const cplx kJonesTraceOver8{0.056864378515657815, 0.2096998805375641};

}  // namespace

TEST_CASE("input state") {
  const auto a = input_state(Dqc1Instance(1.0, CMatrix::Identity(2, 2)));
  CHECK(max_abs(a.matrix() - Eigen::Vector4cd(0.5, 0.5, 0, 0).asDiagonal().toDenseMatrix()) < 1e-16);
  const auto b = input_state(Dqc1Instance(0.0, CMatrix::Identity(4, 4)));
  CHECK(max_abs(b.matrix() - CMatrix::Identity(8, 8) / 8.0) < 1e-16);

  const double eps = 1.4e-5;
  const auto ev = hermitian_eigenvalues(input_state(Dqc1Instance(eps, jones_unitary())).matrix());
  for (int k = 0; k < 8; ++k) CHECK(std::abs(ev[k] - (1.0 + eps) / 16.0) < 1e-16);
  for (int k = 8; k < 16; ++k) CHECK(std::abs(ev[k] - (1.0 - eps) / 16.0) < 1e-16);
}

TEST_CASE("output state") {
  SUBCASE("identity leaves the top qubit in (I+X)/2") {
    for (int d : {2, 4, 8}) {
      const auto out = output_state(Dqc1Instance(1.0, CMatrix::Identity(d, d)));
      CMatrix top(2, 2);
      top << 0.5, 0.5, 0.5, 0.5;
      CHECK(max_abs(out.matrix() - tensor(top, CMatrix::Identity(d, d) / d)) < 1e-15);
    }
  }
  SUBCASE("no bias gives the maximally mixed state") {
    const auto out = output_state(Dqc1Instance(0.0, haar_random_unitary(8, 3)));
    CHECK(max_abs(out.matrix() - CMatrix::Identity(16, 16) / 16.0) < 1e-15);
  }
  SUBCASE("Jones off-diagonal block is U/16") {
    const CMatrix u = jones_unitary();
    const auto out = output_state(Dqc1Instance(1.0, u));
    CHECK(max_abs(out.matrix().bottomLeftCorner(8, 8) - u / 16.0) < 1e-15);
    // Independent matrix-product oracle: C (H x I) rho0 (H x I)^dag C^dag.
    const CMatrix h = (oracle::pauli1('X') + oracle::pauli1('Z')) / std::sqrt(2.0);
    CMatrix c = CMatrix::Zero(16, 16);
    c.topLeftCorner(8, 8) = CMatrix::Identity(8, 8);
    c.bottomRightCorner(8, 8) = u;
    const CMatrix g = c * oracle::kron(h, CMatrix::Identity(8, 8));
    const CMatrix rho0 = oracle::kron(Eigen::Vector2cd(1, 0).asDiagonal().toDenseMatrix(), CMatrix::Identity(8, 8) / 8.0);
    CHECK(max_abs(out.matrix() - g * rho0 * g.adjoint()) < 1e-15);
  }
  SUBCASE("non-unitary is rejected") {
    CHECK_THROWS_AS(Dqc1Instance(1.0, 2.0 * CMatrix::Identity(2, 2)), InputError);
    CHECK_THROWS_AS(Dqc1Instance(1.0, CMatrix::Identity(3, 3)), InputError);
    CHECK_THROWS_AS(Dqc1Instance(1.5, CMatrix::Identity(2, 2)), InputError);
    CHECK_THROWS_AS(Dqc1Instance(1.0, CMatrix::Identity(256, 256)), InputError);
  }
}

TEST_CASE("circuit and closed form agree") {
  for (int n = 1; n <= 4; ++n) {
    for (double eps : {0.0, 1e-5, 0.5, 1.0}) {
      const Dqc1Instance inst(eps, haar_random_unitary(1 << n, 100 + n));
      CHECK(max_abs(output_state(inst).matrix() - output_state_closed_form(inst)) < 1e-12);
    }
  }
}

TEST_CASE("output state is a valid density matrix") {
  for (double eps : {0.0, 1e-5, 0.5, 1.0}) {
    const CMatrix rho = output_state(Dqc1Instance(eps, haar_random_unitary(8, 17))).matrix();
    CHECK(max_abs(rho - rho.adjoint()) < 1e-12);
    CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
    CHECK(hermitian_eigenvalues(rho).back() >= -1e-10);
  }
}

TEST_CASE("trace estimate") {
  CHECK(std::abs(trace_estimate(Dqc1Instance(1.0, CMatrix::Identity(8, 8))) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(trace_estimate(Dqc1Instance(1.0, pauli_realize(PauliLabel("ZII"))))) < 1e-15);
  CHECK(std::abs(trace_estimate(Dqc1Instance(1.0, jones_unitary())) - kJonesTraceOver8) < 1e-12);
}

TEST_CASE("trace estimate matches eps Tr(U)/2^n for Haar unitaries") {
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const CMatrix u = haar_random_unitary(1 << n, seed);
      const Dqc1Instance inst(0.5, u);
      CHECK(std::abs(trace_estimate(inst) - 0.5 * u.trace() / double(1 << n)) < 1e-10);
    }
  }
}

TEST_CASE("no entanglement across the top-qubit cut") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CMatrix rho = output_state(Dqc1Instance(1.0, haar_random_unitary(8, seed))).matrix();
    CHECK(hermitian_eigenvalues(partial_transpose_top(rho, 1)).back() >= -1e-10);
  }
}

TEST_CASE("Jones unitary") {
  const CMatrix u = jones_unitary();
  CHECK(u(3, 3) == cplx(1.0));
  CHECK(max_abs(u - CMatrix(u.diagonal().asDiagonal())) == 0.0);
  const cplx a = u(0, 0);
  const cplx b = u(2, 2);
  CHECK(std::abs(std::abs(a) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(b) - 1.0) < 1e-15);
  CHECK(std::abs(a + std::polar(1.0, -2.0 * std::numbers::pi / 5.0)) < 1e-14);
  CHECK(std::abs(b - std::polar(1.0, -4.0 * std::numbers::pi / 5.0)) < 1e-14);
  for (int k : {1, 4}) CHECK(u(k, k) == a);
  for (int k : {5}) CHECK(u(k, k) == b);
  for (int k : {6, 7}) CHECK(u(k, k) == cplx(1.0));
}

TEST_CASE("Haar random unitary") {
  const CMatrix one = haar_random_unitary(1, 4);
  CHECK(std::abs(std::abs(one(0, 0)) - 1.0) < 1e-14);
  CHECK(max_abs(haar_random_unitary(8, 42) - haar_random_unitary(8, 42)) == 0.0);
  CHECK(max_abs(haar_random_unitary(8, 42) - haar_random_unitary(8, 43)) > 0.0);
  CHECK(is_unitary(haar_random_unitary(256, 1)));
  CHECK_THROWS_AS(haar_random_unitary(257, 1), InputError);

  // E|Tr U|^2 = 1 under the Haar measure.
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) sum += std::norm(haar_random_unitary(8, seed).trace());
  CHECK(std::abs(sum / 2000.0 - 1.0) < 0.1);
  // E|U_00|^2 = 1/d, and the first row is not biased by a fixed left rotation.
  const CMatrix v = haar_random_unitary(8, 999999);
  double raw = 0.0, rotated = 0.0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const CMatrix u = haar_random_unitary(8, seed);
    raw += std::norm(u(0, 0));
    rotated += std::norm((v * u)(0, 0));
  }
  CHECK(std::abs(raw / 2000.0 - 0.125) < 0.01);
  CHECK(std::abs(rotated / 2000.0 - 0.125) < 0.01);
}

TEST_CASE("unitary JSON") {
  const CMatrix u = haar_random_unitary(4, 12);
  CHECK(max_abs(matrix_from_json(matrix_to_json(u)) - u) == 0.0);

  const auto dir = std::filesystem::temp_directory_path() / "qdw_test_unitary";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "u.json") << matrix_to_json(u).dump();
    std::ofstream(dir / "bad.json") << R"({"dim": 2, "re": [[1, 0], [0, 2]], "im": [[0, 0], [0, 0]]})";
    std::ofstream(dir / "broken.json") << R"({"dim": 2, "re": [[1, 0]]})";
    std::ofstream(dir / "garbage.json") << "not json";
  }
  CHECK(max_abs(resolve_unitary((dir / "u.json").string()) - u) == 0.0);
  CHECK_THROWS_AS(load_unitary((dir / "bad.json").string()), InputError);
  CHECK_THROWS_AS(load_unitary((dir / "broken.json").string()), InputError);
  CHECK_THROWS_AS(load_unitary((dir / "garbage.json").string()), InputError);
  CHECK_THROWS_AS(load_unitary((dir / "missing.json").string()), InputError);
  CHECK(max_abs(resolve_unitary("identity8") - CMatrix::Identity(8, 8)) == 0.0);
  CHECK(max_abs(resolve_unitary("jones") - jones_unitary()) == 0.0);
  CHECK_THROWS_AS(resolve_unitary("identity6"), InputError);
}

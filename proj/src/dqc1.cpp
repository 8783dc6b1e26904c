#include "qdw/dqc1.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

namespace qdw {

Dqc1Instance::Dqc1Instance(double epsilon, CMatrix unitary) : epsilon_(epsilon), unitary_(std::move(unitary)) {
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) throw InputError("epsilon must lie in [0, 1]");
  if (unitary_.rows() < 2) throw InputError("DQC1 unitary must act on at least one qubit");
  n_ = qubits_for_dim(static_cast<std::size_t>(unitary_.rows()));
  if (1 + n_ > kMaxQubits) throw InputError("DQC1 register exceeds the 8-qubit cap");
  if (!is_unitary(unitary_)) throw InputError("DQC1 matrix is not unitary");
}

DensityMatrix input_state(const Dqc1Instance& inst) {
  const Eigen::Index d = inst.unitary().rows();
  CMatrix top(2, 2);
  top << (1.0 + inst.epsilon()) / 2.0, 0.0, 0.0, (1.0 - inst.epsilon()) / 2.0;
  return DensityMatrix(tensor(top, CMatrix::Identity(d, d) / static_cast<double>(d)), {1, inst.n()});
}

DensityMatrix output_state(const Dqc1Instance& inst) {
  const Eigen::Index d = inst.unitary().rows();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix hadamard(2, 2);
  hadamard << 1.0, 1.0, 1.0, -1.0;
  hadamard /= std::sqrt(2.0);
  CMatrix controlled = CMatrix::Zero(2 * d, 2 * d);
  controlled.topLeftCorner(d, d) = id;
  controlled.bottomRightCorner(d, d) = inst.unitary();
  const CMatrix gate = controlled * tensor(hadamard, id);
  const CMatrix out = gate * input_state(inst).matrix() * gate.adjoint();
  return DensityMatrix::from_noisy(out, {1, inst.n()});
}

CMatrix output_state_closed_form(const Dqc1Instance& inst) {
  const Eigen::Index d = inst.unitary().rows();
  CMatrix out = CMatrix::Identity(2 * d, 2 * d);
  out.topRightCorner(d, d) = inst.epsilon() * inst.unitary().adjoint();
  out.bottomLeftCorner(d, d) = inst.epsilon() * inst.unitary();
  return out / static_cast<double>(2 * d);
}

cplx trace_estimate(const Dqc1Instance& inst) {
  const DensityMatrix rho = output_state(inst);
  const std::string rest(static_cast<std::size_t>(inst.n()), 'I');
  return {pauli_expectation(rho.matrix(), PauliLabel("X" + rest)),
          pauli_expectation(rho.matrix(), PauliLabel("Y" + rest))};
}

CMatrix jones_unitary() {
  const cplx w = std::polar(1.0, -3.0 * std::numbers::pi / 5.0);
  const cplx a = -std::pow(w, 4);
  const cplx b = std::pow(w, 8);
  Eigen::VectorXcd diag(8);
  diag << a, a, b, 1.0, a, b, 1.0, 1.0;
  return diag.asDiagonal();
}

CMatrix haar_random_unitary(int dim, std::uint64_t seed) {
  if (dim < 1 || dim > 256) throw InputError("Haar dimension must lie in [1, 256]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  const Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const cplx rk = r(k, k);
    const double mag = std::abs(rk);
    q.col(k) *= (mag > 0.0 ? rk / mag : cplx(1.0));
  }
  return q;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<std::vector<double>>>()
                                     : std::vector<std::vector<double>>(re.size(), std::vector<double>(re.size(), 0.0));
    if (dim <= 0 || re.size() != static_cast<std::size_t>(dim) || im.size() != re.size()) {
      throw InputError("matrix JSON: row count does not match dim");
    }
    CMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& rr = re[static_cast<std::size_t>(i)];
      const auto& ir = im[static_cast<std::size_t>(i)];
      if (rr.size() != static_cast<std::size_t>(dim) || ir.size() != rr.size()) {
        throw InputError("matrix JSON: column count does not match dim");
      }
      for (Eigen::Index k = 0; k < dim; ++k) {
        m(i, k) = cplx(rr[static_cast<std::size_t>(k)], ir[static_cast<std::size_t>(k)]);
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("matrix JSON: ") + e.what());
  }
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  std::vector<std::vector<double>> re(static_cast<std::size_t>(m.rows()));
  std::vector<std::vector<double>> im(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re[static_cast<std::size_t>(i)].push_back(m(i, k).real());
      im[static_cast<std::size_t>(i)].push_back(m(i, k).imag());
    }
  }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix load_unitary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open unitary file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("unitary file " + path + ": " + e.what());
  }
  CMatrix u = matrix_from_json(j);
  if (!is_unitary(u)) throw InputError("unitary file " + path + " does not hold a unitary matrix");
  return u;
}

CMatrix resolve_unitary(const std::string& name_or_path) {
  if (name_or_path == "jones") return jones_unitary();
  if (name_or_path.starts_with("identity")) {
    const std::string digits = name_or_path.substr(8);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      const auto d = std::stoul(digits);
      qubits_for_dim(d);
      return CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    }
  }
  return load_unitary(name_or_path);
}

}  // namespace qdw

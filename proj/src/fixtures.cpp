#include "qdw/fixtures.hpp"

#include "qdw/dqc1.hpp"

namespace qdw {

namespace {

CMatrix bloch_qubit(double x, double y, double z) {
  CMatrix m(2, 2);
  m << cplx(1.0 + z, 0.0), cplx(x, -y), cplx(x, y), cplx(1.0 - z, 0.0);
  return m / 2.0;
}

}  // namespace

const std::vector<std::string>& named_state_names() {
  static const std::vector<std::string> names = {"bell", "product-fixture", "initial-dqc1", "final-dqc1"};
  return names;
}

DensityMatrix named_state(const std::string& name) {
  if (name == "bell") {
    Eigen::Vector4cd psi(1.0, 0.0, 0.0, 1.0);
    psi /= std::sqrt(2.0);
    return DensityMatrix::from_noisy(psi * psi.adjoint());
  }
  if (name == "product-fixture") {
    return DensityMatrix::from_noisy(tensor(bloch_qubit(0.3, 0.0, 0.4), bloch_qubit(0.0, 0.5, 0.0)));
  }
  if (name == "initial-dqc1") return input_state(Dqc1Instance(1.0, jones_unitary()));
  if (name == "final-dqc1") return output_state(Dqc1Instance(1.0, jones_unitary()));
  throw InputError("unknown named state '" + name + "'");
}

CorrelationMatrix rtrunc_measured() {
  CorrelationMatrix r;
  r.rows = {PauliLabel("I"), PauliLabel("X"), PauliLabel("Y"), PauliLabel("Z")};
  r.cols = {PauliLabel("III"), PauliLabel("IZI"), PauliLabel("IIZ"), PauliLabel("IZZ")};
  r.values.resize(4, 4);
  r.values << 1.00, -0.01, 0.00, -0.01,
              0.10, -0.34, -0.13, 0.25,
              0.17, 0.38, 0.04, 0.26,
              0.01, 0.08, -0.01, 0.02;
  RMatrix s(4, 4);
  s << 0.0, 0.007, 0.01, 0.007,
       0.05, 0.05, 0.05, 0.05,
       0.05, 0.05, 0.05, 0.05,
       0.04, 0.007, 0.007, 0.007;
  r.sigmas = s;
  r.validate();
  return r;
}

RMatrix measurement_scale_sigmas(const CorrelationMatrix& r) {
  RMatrix s(r.values.rows(), r.values.cols());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].size() != 1) throw InputError("measurement-scale sigmas are defined for a single-qubit A side");
    const char a = r.rows[i].str()[0];
    for (std::size_t j = 0; j < r.cols.size(); ++j) {
      const bool id_col = r.cols[j].is_identity();
      double v = 0.05;
      if (a == 'I') v = id_col ? 0.0 : 0.007;
      if (a == 'Z') v = id_col ? 0.04 : 0.007;
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return s;
}

}  // namespace qdw

// Copyright 2026 The dmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dms/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace dms {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kKetNormTol = 1e-12;

double hermiticity_defect(const MatrixXc& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix density_matrix(MatrixXc entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw std::invalid_argument("density matrix must be square and non-empty");
  if (hermiticity_defect(entries) > kHermitianTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(entries.trace() - Complex(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument("density matrix trace is not 1");
  return DensityMatrix{std::move(entries), false};
}

DensityMatrix reconstructed_density(MatrixXc entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw std::invalid_argument("density matrix must be square and non-empty");
  return DensityMatrix{std::move(entries), true};
}

Projector projector(VectorXc ket) {
  if (ket.size() < 1) throw std::invalid_argument("projector ket is empty");
  if (std::abs(ket.norm() - 1.0) > kKetNormTol)
    throw std::invalid_argument("projector ket is not unit norm");
  return Projector{std::move(ket)};
}

VectorXc polarization_ket(char label) {
  const double r = 1.0 / std::sqrt(2.0);
  VectorXc ket(2);
  switch (label) {
    case 'H': ket << 1.0, 0.0; break;
    case 'V': ket << 0.0, 1.0; break;
    case 'D': ket << r, r; break;
    case 'A': ket << -r, r; break;
    case 'R': ket << r, Complex(0.0, -r); break;
    case 'L': ket << r, Complex(0.0, r); break;
    default: throw std::invalid_argument(std::string("unknown polarization label: ") + label);
  }
  return ket;
}

Projector basis_projector(char label) { return Projector{polarization_ket(label)}; }

DensityMatrix density_from_pure(const PureState& state) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-12)
    throw std::invalid_argument("pure state is not normalized");
  VectorXc psi(2);
  psi << state.a, state.b;
  return DensityMatrix{psi * psi.adjoint(), false};
}

double purity(const DensityMatrix& rho) {
  return (rho.entries * rho.entries).trace().real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& beta) {
  if (rho.dim() != beta.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  MatrixXc diff = beta.entries - rho.entries;
  diff = 0.5 * (diff + diff.adjoint().eval());  // inputs are Hermitian up to tolerance
  double sum = 0.0;
  if (rho.dim() == 2) {
    const auto eig = eigen_hermitian_2x2(diff);
    sum = std::abs(eig.values[0]) + std::abs(eig.values[1]);
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> solver(diff, Eigen::EigenvaluesOnly);
    sum = solver.eigenvalues().cwiseAbs().sum();
  }
  return 0.5 * sum;
}

Matrix2c waveplate_unitary(const WaveplateSetting& setting) {
  Matrix2c u;
  if (setting.kind == WaveplateKind::half) {
    const double c = std::cos(2.0 * setting.fast_axis_rad);
    const double s = std::sin(2.0 * setting.fast_axis_rad);
    u << c, s, s, -c;
  } else {
    // R(phi) diag(1, -i) R(-phi): maps |H> to
    // (cos^2 phi - i sin^2 phi)|H> + (1+i)/2 sin(2 phi)|V>.
    const double c = std::cos(setting.fast_axis_rad);
    const double s = std::sin(setting.fast_axis_rad);
    const Complex mi(0.0, -1.0);
    u << c * c + mi * s * s, (1.0 - mi) * s * c,
         (1.0 - mi) * s * c, s * s + mi * c * c;
  }
  return u;
}

PureState pure_path_state(double theta, double alpha) {
  const Complex phase = std::exp(Complex(0.0, alpha * M_PI / 2.0));
  return PureState{std::cos(theta), -std::sin(theta) * phase};
}

DensityMatrix spun_mixed_analytic(double phi) {
  const double sc = std::sin(phi) * std::cos(phi);
  MatrixXc m(2, 2);
  m << 0.5, Complex(0.0, sc), Complex(0.0, -sc), 0.5;
  return DensityMatrix{std::move(m), false};
}

DensityMatrix spun_mixed_numeric(double phi, int samples) {
  if (samples < 4) throw std::invalid_argument("spun_mixed_numeric needs samples >= 4");
  const Matrix2c qwp = waveplate_unitary({WaveplateKind::quarter, phi});
  Eigen::Vector2cd psi = qwp * Eigen::Vector2cd(1.0, 0.0);
  const Matrix2c rho0 = psi * psi.adjoint();
  Matrix2c acc = Matrix2c::Zero();
  for (int k = 0; k < samples; ++k) {
    const double alpha = 2.0 * M_PI * k / samples;
    const Matrix2c u = waveplate_unitary({WaveplateKind::half, alpha});
    acc += u * rho0 * u.adjoint();
  }
  acc /= static_cast<double>(samples);
  return density_matrix(acc);
}

DensityMatrix project_to_physical(const DensityMatrix& rho) {
  if (hermiticity_defect(rho.entries) > 1e-8)
    throw std::invalid_argument("project_to_physical expects a Hermitian matrix");
  const int d = rho.dim();
  MatrixXc sym = 0.5 * (rho.entries + rho.entries.adjoint().eval());

  Eigen::VectorXd values(d);
  MatrixXc vectors(d, d);
  if (d == 2) {
    const auto eig = eigen_hermitian_2x2(sym);
    values << eig.values[0], eig.values[1];
    vectors = eig.vectors;
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> solver(sym);
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  double total = 0.0;
  for (int k = 0; k < d; ++k) {
    if (values[k] < 0.0) values[k] = 0.0;
    total += values[k];
  }
  if (total <= 1e-14)
    throw std::invalid_argument("project_to_physical: degenerate input, no positive weight");

  MatrixXc out = MatrixXc::Zero(d, d);
  for (int k = 0; k < d; ++k)
    out += (values[k] / total) * (vectors.col(k) * vectors.col(k).adjoint());
  return DensityMatrix{std::move(out), rho.reconstructed};
}

Eigensystem2 eigen_hermitian_2x2(const Matrix2c& m) {
  const double p = m(0, 0).real();
  const double r = m(1, 1).real();
  const Complex q = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (p + r);
  const double half_gap = 0.5 * (p - r);
  const double t = std::hypot(half_gap, std::abs(q));

  Eigensystem2 eig;
  eig.values = {mean - t, mean + t};

  const double scale = std::abs(p) + std::abs(r) + std::abs(q) + 1.0;
  if (std::abs(q) <= 1e-15 * scale) {
    if (p <= r)
      eig.vectors << 1.0, 0.0, 0.0, 1.0;
    else
      eig.vectors << 0.0, 1.0, 1.0, 0.0;
    return eig;
  }
  // v1 = (q, lambda_max - p), v0 its orthogonal complement.
  const double d1 = eig.values[1] - p;
  const double n = std::sqrt(std::norm(q) + d1 * d1);
  eig.vectors(0, 1) = q / n;
  eig.vectors(1, 1) = d1 / n;
  eig.vectors(0, 0) = -d1 / n;
  eig.vectors(1, 0) = std::conj(q) / n;
  return eig;
}

}  // namespace dms

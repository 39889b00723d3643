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

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace dms {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// Pure polarization state a|H> + b|V>. Treated as a ray: equality of states
/// is always decided on density matrices, never on the amplitude pair.
struct PureState {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  double norm_squared() const { return std::norm(a) + std::norm(b); }
};

/// d x d density operator. Matrices produced by the measurement pipeline are
/// flagged `reconstructed`: they are Hermitian and trace-1 only within the
/// finite-strength bias and the noise level, and may fail positivity.
struct DensityMatrix {
  MatrixXc entries;
  bool reconstructed = false;

  int dim() const { return static_cast<int>(entries.rows()); }
  Complex operator()(int i, int j) const { return entries(i, j); }
};

/// Rank-1 projector |k><k|, stored by its unit ket.
struct Projector {
  VectorXc ket;

  int dim() const { return static_cast<int>(ket.size()); }
  MatrixXc matrix() const { return ket * ket.adjoint(); }
};

enum class WaveplateKind { half, quarter };

struct WaveplateSetting {
  WaveplateKind kind = WaveplateKind::half;
  double fast_axis_rad = 0.0;
};

/// Validating constructors. density_matrix() enforces Hermiticity and unit
/// trace to 1e-10; reconstructed_density() only tags the matrix.
DensityMatrix density_matrix(MatrixXc entries);
DensityMatrix reconstructed_density(MatrixXc entries);
Projector projector(VectorXc ket);

/// Qubit kets by polarization label: H, V, D, A, R, L.
/// Conventions: |D> = (|H>+|V>)/sqrt2, |A> = (-|H>+|V>)/sqrt2,
/// |L> = (|H>+i|V>)/sqrt2, |R> = (|H>-i|V>)/sqrt2.
VectorXc polarization_ket(char label);
Projector basis_projector(char label);

DensityMatrix density_from_pure(const PureState& state);

/// Tr[rho^2]; 1 for pure states, 1/d for maximally mixed.
double purity(const DensityMatrix& rho);

/// (1/2) sum of |eigenvalues| of beta - rho. Inputs must be Hermitian and of
/// equal dimension; positivity is not required.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& beta);

Matrix2c waveplate_unitary(const WaveplateSetting& setting);

/// cos(theta)|H> - sin(theta) e^{i alpha pi/2}|V>.
PureState pure_path_state(double theta, double alpha);

/// State produced by a quarter-wave plate at phi followed by a spinning
/// half-wave plate: [[1/2, i sin(phi)cos(phi)], [-i sin(phi)cos(phi), 1/2]].
DensityMatrix spun_mixed_analytic(double phi);

/// Same state via a uniform Riemann sum of U(alpha) rho U(alpha)^dag over
/// alpha in [0, 2pi). The integrand is a low-degree trigonometric polynomial,
/// so the equispaced sum is exact for samples >= 5.
DensityMatrix spun_mixed_numeric(double phi, int samples);

/// Clip negative eigenvalues to zero and renormalize the trace to 1.
/// Idempotent; physical inputs pass through unchanged.
DensityMatrix project_to_physical(const DensityMatrix& rho);

/// Closed-form spectral decomposition of a 2x2 Hermitian matrix.
/// values are ascending; vectors.col(k) belongs to values[k].
struct Eigensystem2 {
  std::array<double, 2> values{};
  Matrix2c vectors;
};
Eigensystem2 eigen_hermitian_2x2(const Matrix2c& m);

}  // namespace dms

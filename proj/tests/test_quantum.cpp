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

#include <doctest.h>

#include <cmath>

#include "dms/quantum.hpp"
#include "test_helpers.hpp"

using namespace dms;
using namespace dmstest;

namespace {
const double kRoot2 = std::sqrt(2.0);
}

TEST_SUITE("quantum") {

TEST_CASE("density_from_pure basis and superposition states") {
  const DensityMatrix h = density_from_pure(PureState{1.0, 0.0});
  CHECK(h(0, 0) == Complex(1.0, 0.0));
  CHECK(h(1, 1) == Complex(0.0, 0.0));

  const DensityMatrix d = density_from_pure(PureState{1.0 / kRoot2, 1.0 / kRoot2});
  CHECK(d(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d(0, 1).real() == doctest::Approx(0.5).epsilon(1e-14));

  const DensityMatrix l = density_from_pure(PureState{1.0 / kRoot2, Complex(0.0, 1.0 / kRoot2)});
  CHECK(l(0, 1).imag() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(l(1, 0).imag() == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(density_from_pure(PureState{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("purity of reference states") {
  const DensityMatrix mixed = density_matrix(0.5 * MatrixXc::Identity(2, 2));
  CHECK(purity(mixed) == doctest::Approx(0.5).epsilon(1e-14));

  const DensityMatrix d = density_from_pure(PureState{1.0 / kRoot2, 1.0 / kRoot2});
  CHECK(purity(d) == doctest::Approx(1.0).epsilon(1e-14));

  // Oracle: the numeric wave-plate averaging integral, then Tr[rho^2].
  const DensityMatrix spun = spun_mixed_numeric(M_PI / 6.0, 360);
  CHECK(purity(spun) == doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("purity bounds and spun purity formula") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 200; ++t) {
    const double p = purity(random_qubit_density(gen));
    CHECK(p >= 0.5 - 1e-10);
    CHECK(p <= 1.0 + 1e-10);
  }
  for (int t = 0; t < 50; ++t) {
    const double phi = uniform(gen, 0.0, M_PI / 2.0);
    const double sc = std::sin(phi) * std::cos(phi);
    CHECK(purity(spun_mixed_analytic(phi)) == doctest::Approx(0.5 + 2.0 * sc * sc).epsilon(1e-12));
  }
}

TEST_CASE("trace_distance reference values") {
  std::mt19937_64 gen(12);
  const DensityMatrix rho = random_qubit_density(gen);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-14));

  const DensityMatrix h = density_from_pure(PureState{1.0, 0.0});
  const DensityMatrix v = density_from_pure(PureState{0.0, 1.0});
  CHECK(trace_distance(h, v) == doctest::Approx(1.0).epsilon(1e-14));

  const DensityMatrix mixed = density_matrix(0.5 * MatrixXc::Identity(2, 2));
  for (double phi : {0.1, 0.4, M_PI / 4.0, 1.2}) {
    // Eigenvalues of the 2x2 difference are +-sin(phi)cos(phi).
    CHECK(trace_distance(mixed, spun_mixed_analytic(phi)) ==
          doctest::Approx(std::sin(phi) * std::cos(phi)).epsilon(1e-12));
  }

  DensityMatrix big = density_matrix(MatrixXc::Identity(3, 3) / 3.0);
  CHECK_THROWS_AS(trace_distance(h, big), std::invalid_argument);
}

TEST_CASE("trace_distance equals half the Bloch-vector distance") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix a = random_qubit_density(gen);
    const DensityMatrix b = random_qubit_density(gen);
    const auto ba = bloch(a);
    const auto bb = bloch(b);
    const double euclid = std::sqrt((ba[0] - bb[0]) * (ba[0] - bb[0]) +
                                    (ba[1] - bb[1]) * (ba[1] - bb[1]) +
                                    (ba[2] - bb[2]) * (ba[2] - bb[2]));
    CHECK(trace_distance(a, b) == doctest::Approx(0.5 * euclid).epsilon(1e-10));
  }
}

TEST_CASE("trace_distance metric axioms") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 1000; ++t) {
    const DensityMatrix a = random_qubit_density(gen);
    const DensityMatrix b = random_qubit_density(gen);
    const DensityMatrix c = random_qubit_density(gen);
    const double ab = trace_distance(a, b);
    const double ba = trace_distance(b, a);
    const double ac = trace_distance(a, c);
    const double cb = trace_distance(c, b);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-9);
    CHECK(trace_distance(a, a) <= 1e-10);
  }
}

TEST_CASE("waveplate_unitary matches the quoted actions") {
  const Matrix2c half0 = waveplate_unitary({WaveplateKind::half, 0.0});
  CHECK(half0(0, 0) == Complex(1.0, 0.0));
  CHECK(half0(1, 1) == Complex(-1.0, 0.0));
  CHECK(std::abs(half0(0, 1)) == 0.0);

  // half at 22.5 degrees sends |H> to |D> (ray comparison via densities).
  const Matrix2c half22 = waveplate_unitary({WaveplateKind::half, M_PI / 8.0});
  Eigen::Vector2cd out = half22 * Eigen::Vector2cd(1.0, 0.0);
  const DensityMatrix got = density_from_pure(PureState{out[0], out[1]});
  const DensityMatrix want = density_from_pure(PureState{1.0 / kRoot2, 1.0 / kRoot2});
  CHECK(max_abs_diff(got.entries, want.entries) < 1e-12);

  // quarter at 0 leaves |H> invariant up to global phase.
  const Matrix2c quarter0 = waveplate_unitary({WaveplateKind::quarter, 0.0});
  out = quarter0 * Eigen::Vector2cd(1.0, 0.0);
  const DensityMatrix gotq = density_from_pure(PureState{out[0], out[1]});
  const DensityMatrix wantq = density_from_pure(PureState{1.0, 0.0});
  CHECK(max_abs_diff(gotq.entries, wantq.entries) < 1e-12);

  // quarter at phi reproduces the quoted output amplitudes exactly.
  const double phi = 0.37;
  const Matrix2c q = waveplate_unitary({WaveplateKind::quarter, phi});
  out = q * Eigen::Vector2cd(1.0, 0.0);
  const Complex c2 = std::cos(phi) * std::cos(phi);
  const Complex s2 = std::sin(phi) * std::sin(phi);
  CHECK(std::abs(out[0] - (c2 - Complex(0, 1) * s2)) < 1e-14);
  CHECK(std::abs(out[1] - 0.5 * Complex(1, 1) * std::sin(2 * phi)) < 1e-14);
}

TEST_CASE("waveplate unitarity and half-wave hermiticity") {
  std::mt19937_64 gen(15);
  for (int t = 0; t < 100; ++t) {
    const WaveplateKind kind = (t % 2 == 0) ? WaveplateKind::half : WaveplateKind::quarter;
    const Matrix2c u = waveplate_unitary({kind, uniform(gen, -M_PI, M_PI)});
    CHECK(max_abs_diff(u * u.adjoint(), Matrix2c::Identity()) < 1e-12);
    if (kind == WaveplateKind::half) CHECK(max_abs_diff(u, u.adjoint()) < 1e-12);
  }
}

TEST_CASE("pure_path_state endpoints") {
  const DensityMatrix h = density_from_pure(pure_path_state(0.0, 0.7));
  CHECK(h(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));

  const PureState d = pure_path_state(M_PI / 4.0, 0.0);
  CHECK(d.a.real() == doctest::Approx(1.0 / kRoot2).epsilon(1e-14));
  CHECK(d.b.real() == doctest::Approx(-1.0 / kRoot2).epsilon(1e-14));

  const DensityMatrix v = density_from_pure(pure_path_state(M_PI / 2.0, -1.0));
  CHECK(std::abs(v(0, 0)) < 1e-14);
  CHECK(v(1, 1).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(v(0, 1)) < 1e-14);
}

TEST_CASE("pure_path_state reproduces the closed-form density matrix") {
  std::mt19937_64 gen(16);
  for (int t = 0; t < 100; ++t) {
    const double theta = uniform(gen, 0.0, M_PI);
    const double alpha = uniform(gen, -2.0, 2.0);
    const DensityMatrix rho = density_from_pure(pure_path_state(theta, alpha));
    MatrixXc want(2, 2);
    const Complex phase = std::exp(Complex(0.0, alpha * M_PI / 2.0));
    want(0, 0) = std::cos(theta) * std::cos(theta);
    want(1, 1) = std::sin(theta) * std::sin(theta);
    want(0, 1) = -std::conj(phase) * std::cos(theta) * std::sin(theta);
    want(1, 0) = -phase * std::cos(theta) * std::sin(theta);
    CHECK(max_abs_diff(rho.entries, want) < 1e-12);
  }
}

TEST_CASE("spun_mixed_analytic reference points") {
  const DensityMatrix at0 = spun_mixed_analytic(0.0);
  CHECK(max_abs_diff(at0.entries, 0.5 * MatrixXc::Identity(2, 2)) < 1e-15);

  const DensityMatrix at45 = spun_mixed_analytic(M_PI / 4.0);
  CHECK(at45(0, 1).imag() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(purity(at45) == doctest::Approx(1.0).epsilon(1e-14));

  const DensityMatrix at30 = spun_mixed_analytic(M_PI / 6.0);
  CHECK(std::abs(at30(0, 1)) == doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-14));
}

TEST_CASE("spun_mixed_numeric converges to the analytic state") {
  CHECK(max_abs_diff(spun_mixed_numeric(0.0, 360).entries,
                     0.5 * MatrixXc::Identity(2, 2)) < 1e-12);
  CHECK(max_abs_diff(spun_mixed_numeric(M_PI / 4.0, 360).entries,
                     spun_mixed_analytic(M_PI / 4.0).entries) < 1e-10);
  // Band-limited integrand: 8 equispaced samples already integrate exactly.
  CHECK(max_abs_diff(spun_mixed_numeric(M_PI / 9.0, 8).entries,
                     spun_mixed_numeric(M_PI / 9.0, 360).entries) < 1e-10);

  std::mt19937_64 gen(17);
  for (int t = 0; t < 50; ++t) {
    const double phi = uniform(gen, 0.0, M_PI / 2.0);
    CHECK(max_abs_diff(spun_mixed_numeric(phi, 360).entries,
                       spun_mixed_analytic(phi).entries) < 1e-10);
  }

  CHECK_THROWS_AS(spun_mixed_numeric(0.3, 3), std::invalid_argument);
}

TEST_CASE("project_to_physical clips and renormalizes") {
  std::mt19937_64 gen(18);
  const DensityMatrix physical = random_qubit_density(gen);
  CHECK(max_abs_diff(project_to_physical(physical).entries, physical.entries) < 1e-10);

  MatrixXc unphysical(2, 2);
  unphysical << 1.2, 0.0, 0.0, -0.2;
  const DensityMatrix fixed = project_to_physical(reconstructed_density(unphysical));
  CHECK(fixed(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(fixed(1, 1)) < 1e-12);

  // Random Hermitian trace-1 with a negative eigenvalue becomes PSD, trace 1.
  for (int t = 0; t < 20; ++t) {
    MatrixXc m = random_hermitian(gen, 2);
    m -= (m.trace() - 1.0) / 2.0 * MatrixXc::Identity(2, 2);
    const DensityMatrix out = project_to_physical(reconstructed_density(m));
    const auto eig = eigen_hermitian_2x2(out.entries);
    CHECK(eig.values[0] >= -1e-12);
    CHECK(out.entries.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    // Idempotence.
    CHECK(max_abs_diff(project_to_physical(out).entries, out.entries) < 1e-10);
  }

  CHECK_THROWS_AS(project_to_physical(reconstructed_density(MatrixXc::Zero(2, 2))),
                  std::invalid_argument);

  // d = 3 path goes through the iterative solver.
  MatrixXc m3 = MatrixXc::Zero(3, 3);
  m3(0, 0) = 1.4;
  m3(1, 1) = -0.4;
  const DensityMatrix out3 = project_to_physical(reconstructed_density(m3));
  CHECK(out3(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed-form 2x2 eigensystem agrees with the iterative solver") {
  std::mt19937_64 gen(19);
  for (int t = 0; t < 200; ++t) {
    const MatrixXc m = random_hermitian(gen, 2);
    const auto ours = eigen_hermitian_2x2(m);
    Eigen::SelfAdjointEigenSolver<MatrixXc> reference(m);
    CHECK(ours.values[0] == doctest::Approx(reference.eigenvalues()[0]).epsilon(1e-12));
    CHECK(ours.values[1] == doctest::Approx(reference.eigenvalues()[1]).epsilon(1e-12));
    // Residuals of the eigen equations.
    for (int k = 0; k < 2; ++k) {
      const VectorXc v = ours.vectors.col(k);
      CHECK((m * v - ours.values[k] * v).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
  }
}

}  // TEST_SUITE

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

#include <optional>
#include <utility>
#include <vector>

#include "dms/noise.hpp"
#include "dms/pointer.hpp"
#include "dms/quantum.hpp"

namespace dms {

/// The three-projector measurement sequence: final * middle * first. The
/// middle projector is the fixed phase reference and must be complementary
/// to both outer projectors, |<a|b0>| = 1/sqrt(d).
struct SequenceSpec {
  Projector first;
  Projector middle;
  Projector final_proj;
  int dim = 2;
};

SequenceSpec make_sequence(Projector first, Projector middle, Projector final_proj);

enum class ReconstructionMethod { operator_identity, pointer_weak_limit, pointer_finite };

struct ReconstructedElement {
  Complex value;
  int row = 0;
  int col = 0;
  ReconstructionMethod method = ReconstructionMethod::operator_identity;
  double strength = 0.0;  // delta/sigma
};

/// Projective probabilities for the six polarization analyzers.
struct TomographyData {
  double p_h = 0.0, p_v = 0.0;
  double p_d = 0.0, p_a = 0.0;
  double p_r = 0.0, p_l = 0.0;
};

/// Tr[pi_final pi_middle pi_first rho]; with a phase-aligned complementary
/// middle projector this equals rho(i, j)/d exactly, for any d.
Complex operator_weak_average(const DensityMatrix& rho, const SequenceSpec& seq);

/// Turn the four joint moments into a density matrix element:
///   Re = (2/dx dy) (m_xy - 4 sx^2 sy^2 m_pxpy)
///   Im = (2/dx dy) (2 sx^2 m_pxy + 2 sy^2 m_xpy)
/// which for dx = dy and sx = sy is the sigma/sigma_p form of the
/// reconstruction formula. Exact only in the weak limit.
Complex direct_element(const ExpectationSet& set, const PointerConfig& config);

/// All four elements of a d=2 state via the pointer pipeline, optionally with
/// multiplicative moment noise averaged over noise.trials draws. Hermiticity
/// is not enforced; it emerges within tolerance.
DensityMatrix direct_matrix(const DensityMatrix& rho, const PointerConfig& config,
                            const std::optional<NoiseModel>& noise = std::nullopt);

/// Single tagged element (row/col in {0, 1} for {H, V}).
ReconstructedElement reconstruct_element(const DensityMatrix& rho, int row, int col,
                                         const PointerConfig& config,
                                         const std::optional<NoiseModel>& noise = std::nullopt);

/// Noiseless analyzer probabilities for a d=2 state.
TomographyData qst_probabilities(const DensityMatrix& rho);

/// Linear-inversion tomography from three mutually unbiased bases:
/// rho = (1/2)(I + s1 sigma_z + s2 sigma_x + s3 sigma_y') with the Stokes
/// components taken as plain probability differences.
DensityMatrix qst_reconstruct(const TomographyData& data, double pair_tolerance = 1e-10);

/// Noiseless finite-strength reconstruction error (max element deviation)
/// per delta/sigma value. Strengths must be positive and ascending.
std::vector<std::pair<double, double>> bias_curve(const DensityMatrix& rho,
                                                  const std::vector<double>& strengths);

}  // namespace dms

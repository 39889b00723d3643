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

#include "dms/reconstruction.hpp"

#include <cmath>
#include <stdexcept>

#include "dms/rng.hpp"

namespace dms {

namespace {

constexpr double kComplementarityTol = 1e-10;

void check_complementary(const Projector& outer, const Projector& middle, int d) {
  const double want = 1.0 / std::sqrt(static_cast<double>(d));
  if (std::abs(std::abs(outer.ket.dot(middle.ket)) - want) > kComplementarityTol)
    throw std::invalid_argument("sequence projectors are not complementary to the middle reference");
}

ExpectationSet perturbed_average(const ExpectationSet& set, const NoiseModel& noise,
                                 std::uint64_t stream) {
  GaussianSampler gauss(derive_seed(noise.seed, stream));
  ExpectationSet acc;
  for (int t = 0; t < noise.trials; ++t) {
    acc.m_xy += set.m_xy * (1.0 + noise.relative_sigma * gauss());
    acc.m_pxpy += set.m_pxpy * (1.0 + noise.relative_sigma * gauss());
    acc.m_pxy += set.m_pxy * (1.0 + noise.relative_sigma * gauss());
    acc.m_xpy += set.m_xpy * (1.0 + noise.relative_sigma * gauss());
  }
  const double inv = 1.0 / noise.trials;
  return {acc.m_xy * inv, acc.m_pxpy * inv, acc.m_pxy * inv, acc.m_xpy * inv};
}

}  // namespace

SequenceSpec make_sequence(Projector first, Projector middle, Projector final_proj) {
  const int d = first.dim();
  if (middle.dim() != d || final_proj.dim() != d)
    throw std::invalid_argument("sequence projectors have mismatched dimensions");
  check_complementary(first, middle, d);
  check_complementary(final_proj, middle, d);
  return SequenceSpec{std::move(first), std::move(middle), std::move(final_proj), d};
}

Complex operator_weak_average(const DensityMatrix& rho, const SequenceSpec& seq) {
  if (rho.dim() != seq.dim)
    throw std::invalid_argument("operator_weak_average: dimension mismatch");
  // Tr[pi_j pi_0 pi_i rho] = <a_j|b0><b0|a_i><a_i|rho|a_j>
  const Complex j_b0 = seq.final_proj.ket.dot(seq.middle.ket);
  const Complex b0_i = seq.middle.ket.dot(seq.first.ket);
  const Complex i_rho_j = seq.first.ket.dot(rho.entries * seq.final_proj.ket);
  return j_b0 * b0_i * i_rho_j;
}

Complex direct_element(const ExpectationSet& set, const PointerConfig& config) {
  if (config.delta_x <= 0.0 || config.delta_y <= 0.0)
    throw std::invalid_argument("direct_element: pointer shifts must be positive");
  const double sx2 = config.sigma_x * config.sigma_x;
  const double sy2 = config.sigma_y * config.sigma_y;
  const double pref = 2.0 / (config.delta_x * config.delta_y);
  const double re = pref * (set.m_xy - 4.0 * sx2 * sy2 * set.m_pxpy);
  const double im = pref * (2.0 * sx2 * set.m_pxy + 2.0 * sy2 * set.m_xpy);
  return Complex(re, im);
}

DensityMatrix direct_matrix(const DensityMatrix& rho, const PointerConfig& config,
                            const std::optional<NoiseModel>& noise) {
  if (rho.dim() != 2)
    throw std::invalid_argument("direct_matrix supports d = 2 only");
  if (noise) validate(*noise);
  const char labels[2] = {'H', 'V'};
  MatrixXc out(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      ExpectationSet set = expectation_set(rho, basis_projector(labels[i]),
                                           basis_projector(labels[j]), config);
      if (noise) set = perturbed_average(set, *noise, static_cast<std::uint64_t>(2 * i + j));
      out(i, j) = direct_element(set, config);
    }
  }
  return reconstructed_density(std::move(out));
}

ReconstructedElement reconstruct_element(const DensityMatrix& rho, int row, int col,
                                         const PointerConfig& config,
                                         const std::optional<NoiseModel>& noise) {
  if (row < 0 || row > 1 || col < 0 || col > 1)
    throw std::invalid_argument("reconstruct_element: row/col must be 0 (H) or 1 (V)");
  const char labels[2] = {'H', 'V'};
  ExpectationSet set = expectation_set(rho, basis_projector(labels[row]),
                                       basis_projector(labels[col]), config);
  if (noise) {
    validate(*noise);
    set = perturbed_average(set, *noise, static_cast<std::uint64_t>(2 * row + col));
  }
  ReconstructedElement element;
  element.value = direct_element(set, config);
  element.row = row;
  element.col = col;
  element.strength = config.strength();
  element.method = element.strength <= 0.01 ? ReconstructionMethod::pointer_weak_limit
                                            : ReconstructionMethod::pointer_finite;
  return element;
}

TomographyData qst_probabilities(const DensityMatrix& rho) {
  if (rho.dim() != 2)
    throw std::invalid_argument("qst_probabilities supports d = 2 only");
  auto prob = [&rho](char label) {
    const VectorXc ket = polarization_ket(label);
    return ket.dot(rho.entries * ket).real();
  };
  return TomographyData{prob('H'), prob('V'), prob('D'), prob('A'), prob('R'), prob('L')};
}

DensityMatrix qst_reconstruct(const TomographyData& data, double pair_tolerance) {
  const double probs[6] = {data.p_h, data.p_v, data.p_d, data.p_a, data.p_r, data.p_l};
  for (double p : probs)
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("qst_reconstruct: probability outside [0, 1]");
  if (std::abs(data.p_h + data.p_v - 1.0) > pair_tolerance ||
      std::abs(data.p_d + data.p_a - 1.0) > pair_tolerance ||
      std::abs(data.p_r + data.p_l - 1.0) > pair_tolerance)
    throw std::invalid_argument("qst_reconstruct: complementary pair sums deviate from 1");

  const double s1 = data.p_h - data.p_v;
  const double s2 = data.p_d - data.p_a;
  const double s3 = data.p_r - data.p_l;
  MatrixXc out(2, 2);
  out(0, 0) = 0.5 * (1.0 + s1);
  out(1, 1) = 0.5 * (1.0 - s1);
  out(0, 1) = Complex(0.5 * s2, 0.5 * s3);
  out(1, 0) = std::conj(out(0, 1));
  return reconstructed_density(std::move(out));
}

std::vector<std::pair<double, double>> bias_curve(const DensityMatrix& rho,
                                                  const std::vector<double>& strengths) {
  double previous = 0.0;
  for (double s : strengths) {
    if (s <= 0.0 || s <= previous)
      throw std::invalid_argument("bias_curve strengths must be positive and ascending");
    previous = s;
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(strengths.size());
  for (double s : strengths) {
    const PointerConfig config = make_pointer_config(1.0, s);
    const DensityMatrix rec = direct_matrix(rho, config);
    const double err = (rec.entries - rho.entries).cwiseAbs().maxCoeff();
    curve.emplace_back(s, err);
  }
  return curve;
}

}  // namespace dms

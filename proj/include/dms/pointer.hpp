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

#include <vector>

#include "dms/quantum.hpp"

namespace dms {

/// Pointer geometry. Lengths are in whatever unit the caller picks (the
/// defaults are the experimental values in micrometers); with hbar = 1 the
/// momentum widths are fixed by sigma * sigma_p = 1/2.
struct PointerConfig {
  double sigma_x = 250.0;
  double sigma_y = 250.0;
  double delta_x = 176.0;
  double delta_y = 176.0;

  double sigma_px() const { return 0.5 / sigma_x; }
  double sigma_py() const { return 0.5 / sigma_y; }
  /// Measurement strength delta/sigma along x (the paper's knob).
  double strength() const { return delta_x / sigma_x; }
};

/// Square geometry (delta_x = delta_y, sigma_x = sigma_y) with validation.
PointerConfig make_pointer_config(double sigma, double delta);

/// One shifted 2-D Gaussian amplitude: coeff * chi_x(x - center_x) * chi_y(y - center_y).
struct GaussianTerm {
  Complex coeff;
  double center_x = 0.0;
  double center_y = 0.0;
};

/// A polarization branch: all Gaussian terms multiplying the same ket.
struct PointerBranch {
  VectorXc label;
  std::vector<GaussianTerm> terms;
};

/// System (x) pointer (x) pointer state as it threads the crystals and the
/// final polarizer. Total probability is 1 until a strong projection, which
/// deliberately does not renormalize.
struct PointerField {
  PointerConfig config;
  std::vector<PointerBranch> branches;
};

enum class Axis { x, y };
enum class PointerOperator { position, momentum };

struct MomentSpec {
  PointerOperator x_op = PointerOperator::position;
  PointerOperator y_op = PointerOperator::position;
};

/// The four joint pointer moments feeding the reconstruction:
/// <x y>, <p_x p_y>, <p_x y>, <x p_y>. The x pointer belongs to the first
/// weak measurement, the y pointer to the middle one. All are un-normalized,
/// i.e. weighted by the survival probability through the final polarizer.
struct ExpectationSet {
  double m_xy = 0.0;
  double m_pxpy = 0.0;
  double m_pxy = 0.0;
  double m_xpy = 0.0;
};

/// chi(z) = (2 pi sigma^2)^(-1/4) exp(-z^2 / (4 sigma^2)); |chi|^2 has
/// standard deviation sigma. The momentum profile is the same shape with
/// width sigma_p = 1/(2 sigma).
double pointer_profile(double z, double sigma);
double pointer_profile_momentum(double p, double sigma_p);

PointerField initial_field(const PureState& state, const PointerConfig& config);

/// Shift the branch matched by `target` along `axis` by `delta`. The target
/// must be an H/V or D/A basis projector; if the field currently lives in the
/// other basis it is rebased exactly first (the half-wave-plate step).
PointerField apply_weak_shift(const PointerField& field, const Projector& target,
                              Axis axis, double delta);

/// Keep only the component along `final`. Coefficients become overlaps of the
/// surviving branches with the final ket; the state is not renormalized.
PointerField apply_strong_projection(const PointerField& field, const Projector& final_proj);

/// Gram-form total probability over all branches.
double total_probability(const PointerField& field);

/// Joint position density summed over branches.
double probability_density(const PointerField& field, double x, double y);

/// Closed-form Gaussian-overlap evaluation of the requested joint moment.
/// Requires a single-branch (post strong projection) field.
double analytic_moment(const PointerField& field, const MomentSpec& spec);

/// Brute-force Riemann-sum evaluation of the same moment on a midpoint grid.
/// Momentum axes are evaluated on the analytically Fourier-transformed field,
/// where each term picks up the phase exp(-i p center). `extent_sigmas` and
/// `spacing_sigmas` are per-axis multiples of that axis' width.
double grid_moment(const PointerField& field, const MomentSpec& spec,
                   double extent_sigmas = 8.0, double spacing_sigmas = 1.0 / 64.0);

/// Run the full sequence (first projector on x, the diagonal reference on y,
/// strong `final_proj`) for each eigencomponent of rho and return the
/// probability-weighted moments. d = 2 only.
ExpectationSet expectation_set(const DensityMatrix& rho, const Projector& first,
                               const Projector& final_proj, const PointerConfig& config);

}  // namespace dms

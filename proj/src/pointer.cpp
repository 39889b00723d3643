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

#include "dms/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dms {

namespace {

// Overlap kernels between shifted pointer profiles chi(. - a) and chi(. - b):
//   <a|b>      = exp(-(a-b)^2 / 8 sigma^2)
//   <a| z |b>  = <a|b> (a+b)/2
//   <a| p |b>  = <a|b> i (a-b) / (4 sigma^2)        (p = -i d/dz)
double overlap(double a, double b, double sigma) {
  const double d = a - b;
  return std::exp(-d * d / (8.0 * sigma * sigma));
}

Complex kernel(PointerOperator op, double a, double b, double sigma) {
  const double g = overlap(a, b, sigma);
  if (op == PointerOperator::position) return Complex(g * 0.5 * (a + b), 0.0);
  return Complex(0.0, g * (a - b) / (4.0 * sigma * sigma));
}

bool same_ray(const VectorXc& u, const VectorXc& v) {
  return std::abs(std::abs(u.dot(v)) - 1.0) < 1e-9;  // dot conjugates its object
}

enum class BranchBasis { hv, da, other };

BranchBasis classify_ket(const VectorXc& ket) {
  if (same_ray(ket, polarization_ket('H')) || same_ray(ket, polarization_ket('V')))
    return BranchBasis::hv;
  if (same_ray(ket, polarization_ket('D')) || same_ray(ket, polarization_ket('A')))
    return BranchBasis::da;
  return BranchBasis::other;
}

BranchBasis field_basis(const PointerField& field) {
  if (field.branches.size() != 2) return BranchBasis::other;
  const BranchBasis b0 = classify_ket(field.branches[0].label);
  const BranchBasis b1 = classify_ket(field.branches[1].label);
  if (b0 == b1 && b0 != BranchBasis::other &&
      !same_ray(field.branches[0].label, field.branches[1].label))
    return b0;
  return BranchBasis::other;
}

std::vector<GaussianTerm> scaled(const std::vector<GaussianTerm>& terms, Complex factor) {
  std::vector<GaussianTerm> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    const Complex c = factor * t.coeff;
    if (std::norm(c) > 0.0) out.push_back({c, t.center_x, t.center_y});
  }
  return out;
}

std::vector<GaussianTerm> concat(std::vector<GaussianTerm> a, const std::vector<GaussianTerm>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Exact change of branch labels between {H, V} and {D, A}; the half-wave
// plate step of the second crystal.
PointerField rebase(const PointerField& field, BranchBasis target) {
  const BranchBasis current = field_basis(field);
  if (current == target) return field;
  if (current == BranchBasis::other)
    throw std::invalid_argument("pointer field is not in a rebasable basis");

  const double r = 1.0 / std::sqrt(2.0);
  // Locate the two branches in canonical order.
  const bool first_is_primary =
      same_ray(field.branches[0].label, polarization_ket(current == BranchBasis::hv ? 'H' : 'D'));
  const auto& primary = field.branches[first_is_primary ? 0 : 1].terms;    // H or D
  const auto& secondary = field.branches[first_is_primary ? 1 : 0].terms;  // V or A

  PointerField out;
  out.config = field.config;
  if (current == BranchBasis::hv) {
    // |H> = (|D> - |A>)/sqrt2, |V> = (|D> + |A>)/sqrt2
    out.branches.push_back({polarization_ket('D'), concat(scaled(primary, r), scaled(secondary, r))});
    out.branches.push_back({polarization_ket('A'), concat(scaled(primary, -r), scaled(secondary, r))});
  } else {
    // |D> = (|H> + |V>)/sqrt2, |A> = (-|H> + |V>)/sqrt2
    out.branches.push_back({polarization_ket('H'), concat(scaled(primary, r), scaled(secondary, -r))});
    out.branches.push_back({polarization_ket('V'), concat(scaled(primary, r), scaled(secondary, r))});
  }
  return out;
}

Complex branch_gram(const std::vector<GaussianTerm>& terms, const PointerConfig& cfg) {
  Complex sum = 0.0;
  for (const auto& s : terms)
    for (const auto& t : terms)
      sum += std::conj(s.coeff) * t.coeff * overlap(s.center_x, t.center_x, cfg.sigma_x) *
             overlap(s.center_y, t.center_y, cfg.sigma_y);
  return sum;
}

void validate_config(const PointerConfig& cfg) {
  if (cfg.sigma_x <= 0.0 || cfg.sigma_y <= 0.0 || cfg.delta_x <= 0.0 || cfg.delta_y <= 0.0)
    throw std::invalid_argument("pointer config values must be strictly positive");
}

}  // namespace

PointerConfig make_pointer_config(double sigma, double delta) {
  PointerConfig cfg{sigma, sigma, delta, delta};
  validate_config(cfg);
  return cfg;
}

double pointer_profile(double z, double sigma) {
  return std::pow(2.0 * M_PI * sigma * sigma, -0.25) * std::exp(-z * z / (4.0 * sigma * sigma));
}

double pointer_profile_momentum(double p, double sigma_p) {
  return pointer_profile(p, sigma_p);
}

PointerField initial_field(const PureState& state, const PointerConfig& config) {
  validate_config(config);
  if (std::abs(state.norm_squared() - 1.0) > 1e-12)
    throw std::invalid_argument("initial_field expects a normalized state");
  PointerField field;
  field.config = config;
  field.branches.push_back({polarization_ket('H'), {}});
  field.branches.push_back({polarization_ket('V'), {}});
  if (std::norm(state.a) > 0.0) field.branches[0].terms.push_back({state.a, 0.0, 0.0});
  if (std::norm(state.b) > 0.0) field.branches[1].terms.push_back({state.b, 0.0, 0.0});
  return field;
}

PointerField apply_weak_shift(const PointerField& field, const Projector& target,
                              Axis axis, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("weak shift delta must be positive");
  const BranchBasis wanted = classify_ket(target.ket);
  if (wanted == BranchBasis::other)
    throw std::invalid_argument("weak shift target must be an H/V or D/A basis projector");

  PointerField out = rebase(field, wanted);
  bool matched = false;
  for (auto& branch : out.branches) {
    if (!same_ray(branch.label, target.ket)) continue;
    matched = true;
    for (auto& term : branch.terms) {
      if (axis == Axis::x)
        term.center_x += delta;
      else
        term.center_y += delta;
    }
  }
  if (!matched) throw std::invalid_argument("weak shift target does not label any branch");
  return out;
}

PointerField apply_strong_projection(const PointerField& field, const Projector& final_proj) {
  if (final_proj.dim() != 2)
    throw std::invalid_argument("strong projection expects a qubit projector");
  PointerField out;
  out.config = field.config;
  std::vector<GaussianTerm> terms;
  for (const auto& branch : field.branches) {
    const Complex amp = final_proj.ket.dot(branch.label);  // <final|label>
    for (const auto& t : scaled(branch.terms, amp)) terms.push_back(t);
  }
  out.branches.push_back({final_proj.ket, std::move(terms)});
  return out;
}

double total_probability(const PointerField& field) {
  Complex sum = 0.0;
  for (const auto& branch : field.branches) sum += branch_gram(branch.terms, field.config);
  return sum.real();
}

double probability_density(const PointerField& field, double x, double y) {
  double density = 0.0;
  for (const auto& branch : field.branches) {
    Complex amp = 0.0;
    for (const auto& t : branch.terms)
      amp += t.coeff * pointer_profile(x - t.center_x, field.config.sigma_x) *
             pointer_profile(y - t.center_y, field.config.sigma_y);
    density += std::norm(amp);
  }
  return density;
}

double analytic_moment(const PointerField& field, const MomentSpec& spec) {
  if (field.branches.size() != 1)
    throw std::invalid_argument("analytic_moment expects a single-branch field");
  const auto& terms = field.branches[0].terms;
  const PointerConfig& cfg = field.config;
  Complex sum = 0.0;
  for (const auto& s : terms)
    for (const auto& t : terms)
      sum += std::conj(s.coeff) * t.coeff *
             kernel(spec.x_op, s.center_x, t.center_x, cfg.sigma_x) *
             kernel(spec.y_op, s.center_y, t.center_y, cfg.sigma_y);
  return sum.real();
}

namespace {

struct AxisGrid {
  std::vector<double> points;
  double step = 0.0;
};

AxisGrid build_axis_grid(PointerOperator op, const std::vector<const GaussianTerm*>& terms,
                         bool is_x, double sigma, double sigma_p, double extent, double spacing) {
  const double width = (op == PointerOperator::position) ? sigma : sigma_p;
  double lo = 0.0, hi = 0.0;
  if (op == PointerOperator::position) {
    for (const auto* t : terms) {
      const double c = is_x ? t->center_x : t->center_y;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  lo -= extent * width;
  hi += extent * width;
  AxisGrid grid;
  grid.step = spacing * width;
  const int n = static_cast<int>(std::ceil((hi - lo) / grid.step));
  grid.points.reserve(n);
  for (int i = 0; i < n; ++i) grid.points.push_back(lo + (i + 0.5) * grid.step);
  return grid;
}

// Per-term 1-D amplitude samples along one axis, in position or momentum
// representation.
std::vector<Complex> axis_table(PointerOperator op, double center, double sigma, double sigma_p,
                                const std::vector<double>& pts) {
  std::vector<Complex> table(pts.size());
  if (op == PointerOperator::position) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      table[i] = pointer_profile(pts[i] - center, sigma);
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i)
      table[i] = pointer_profile_momentum(pts[i], sigma_p) *
                 std::exp(Complex(0.0, -pts[i] * center));
  }
  return table;
}

}  // namespace

double grid_moment(const PointerField& field, const MomentSpec& spec,
                   double extent_sigmas, double spacing_sigmas) {
  if (extent_sigmas < 6.0 || spacing_sigmas > 1.0 / 32.0)
    throw std::invalid_argument("grid_moment resolution: need extent >= 6 sigma and spacing <= sigma/32");
  const PointerConfig& cfg = field.config;

  std::vector<const GaussianTerm*> all;
  for (const auto& branch : field.branches)
    for (const auto& t : branch.terms) all.push_back(&t);
  if (all.empty()) return 0.0;

  const AxisGrid gx = build_axis_grid(spec.x_op, all, true, cfg.sigma_x, cfg.sigma_px(),
                                      extent_sigmas, spacing_sigmas);
  const AxisGrid gy = build_axis_grid(spec.y_op, all, false, cfg.sigma_y, cfg.sigma_py(),
                                      extent_sigmas, spacing_sigmas);

  double moment = 0.0;
  for (const auto& branch : field.branches) {
    if (branch.terms.empty()) continue;
    std::vector<std::vector<Complex>> tx, ty;
    for (const auto& t : branch.terms) {
      tx.push_back(axis_table(spec.x_op, t.center_x, cfg.sigma_x, cfg.sigma_px(), gx.points));
      ty.push_back(axis_table(spec.y_op, t.center_y, cfg.sigma_y, cfg.sigma_py(), gy.points));
    }
    for (std::size_t i = 0; i < gx.points.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < gy.points.size(); ++j) {
        Complex amp = 0.0;
        for (std::size_t k = 0; k < branch.terms.size(); ++k)
          amp += branch.terms[k].coeff * tx[k][i] * ty[k][j];
        row += gy.points[j] * std::norm(amp);
      }
      moment += gx.points[i] * row;
    }
  }
  return moment * gx.step * gy.step;
}

ExpectationSet expectation_set(const DensityMatrix& rho, const Projector& first,
                               const Projector& final_proj, const PointerConfig& config) {
  if (rho.dim() != 2)
    throw std::invalid_argument("expectation_set supports d = 2 only");
  validate_config(config);

  const auto eig = eigen_hermitian_2x2(rho.entries);
  const Projector middle = basis_projector('D');

  ExpectationSet set;
  for (int k = 0; k < 2; ++k) {
    const double weight = eig.values[k];
    if (weight == 0.0) continue;
    const PureState component{eig.vectors(0, k), eig.vectors(1, k)};
    PointerField field = initial_field(component, config);
    field = apply_weak_shift(field, first, Axis::x, config.delta_x);
    field = apply_weak_shift(field, middle, Axis::y, config.delta_y);
    field = apply_strong_projection(field, final_proj);
    set.m_xy += weight * analytic_moment(field, {PointerOperator::position, PointerOperator::position});
    set.m_pxpy += weight * analytic_moment(field, {PointerOperator::momentum, PointerOperator::momentum});
    set.m_pxy += weight * analytic_moment(field, {PointerOperator::momentum, PointerOperator::position});
    set.m_xpy += weight * analytic_moment(field, {PointerOperator::position, PointerOperator::momentum});
  }
  return set;
}

}  // namespace dms

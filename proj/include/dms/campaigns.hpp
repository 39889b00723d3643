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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dms/camera.hpp"
#include "dms/noise.hpp"
#include "dms/pointer.hpp"
#include "dms/quantum.hpp"
#include "dms/reconstruction.hpp"

namespace dms {

/// Poincare-sphere sweep families: path1 and path2 are great-circle pure
/// state paths in theta (alpha = 0 and alpha = -1); path3 is the spun
/// mixed-state family in phi.
enum class PathId { path1 = 1, path2 = 2, path3 = 3 };

struct PathSpec {
  PathId id = PathId::path1;
  std::vector<double> grid;  // radians
};

/// Evenly spaced default grids: theta in [0, pi] for paths 1-2, phi in
/// [0, pi/2] for path 3.
PathSpec default_path(PathId id, int steps);

enum class PipelineMode { analytic, camera };

struct CampaignConfig {
  PointerConfig pointer;
  std::optional<NoiseModel> noise;
  PipelineMode mode = PipelineMode::analytic;
  CameraFrame frame;
  double filter_cutoff = 0.5;
  bool project = false;
  int steps = 37;
  std::uint64_t seed = 0;
  std::string out_path;
  int threads = 0;  // 0: DMS_THREADS env var, else hardware concurrency
};

struct SweepRecord {
  double parameter = 0.0;  // radians
  DensityMatrix truth;
  DensityMatrix reconstructed;  // Hermitized (or projected) estimate
  ReconstructionMethod method = ReconstructionMethod::pointer_finite;
  double strength = 0.0;
  double trace_dist = 0.0;
  double purity_true = 0.0;
  double purity_measured = 0.0;
  double noise_sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;
};

std::vector<SweepRecord> sweep_pure_path(const PathSpec& spec, const CampaignConfig& cfg);
std::vector<SweepRecord> sweep_mixed(const PathSpec& spec, const CampaignConfig& cfg);

struct BiasRow {
  std::string state;
  double strength = 0.0;
  double max_element_error = 0.0;
  double trace_dist = 0.0;
};

std::vector<BiasRow> run_bias_study(const std::vector<std::pair<std::string, DensityMatrix>>& states,
                                    const std::vector<double>& strengths,
                                    const CampaignConfig& cfg);

/// Fixed-schema CSV, 12 significant digits, '\n' endings, rows ordered by
/// parameter. Identical config and seed give byte-identical output.
void export_csv(const std::vector<SweepRecord>& records, std::ostream& out);
void export_csv(const std::vector<SweepRecord>& records, const std::string& path);
void export_csv(const std::vector<BiasRow>& rows, std::ostream& out);
void export_csv(const std::vector<BiasRow>& rows, const std::string& path);

}  // namespace dms

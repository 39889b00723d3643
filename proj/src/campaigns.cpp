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

#include "dms/campaigns.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dms/rng.hpp"

namespace dms {

namespace {

int resolve_threads(int requested, std::size_t points) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("DMS_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(points, 1)));
}

// Run fn(i) for i in [0, n) on the configured number of threads. Each index
// owns its output slot and its derived seed, so scheduling cannot change
// results.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

MatrixXc hermitized(const MatrixXc& m) { return 0.5 * (m + m.adjoint().eval()); }

SweepRecord evaluate_point(double parameter, const DensityMatrix& truth,
                           const CampaignConfig& cfg, std::size_t index) {
  SweepRecord record;
  record.parameter = parameter;
  record.truth = truth;
  record.strength = cfg.pointer.strength();
  record.seed = derive_seed(cfg.seed, index);
  record.noise_sigma = cfg.noise ? cfg.noise->relative_sigma : 0.0;
  record.trials = cfg.noise ? cfg.noise->trials : 1;

  std::optional<NoiseModel> noise = cfg.noise;
  if (noise) noise->seed = record.seed;

  DensityMatrix raw =
      cfg.mode == PipelineMode::camera
          ? direct_matrix_camera(truth, cfg.pointer, cfg.frame, noise, cfg.filter_cutoff,
                                 record.seed)
          : direct_matrix(truth, cfg.pointer, noise);

  DensityMatrix estimate = reconstructed_density(hermitized(raw.entries));
  if (cfg.project) estimate = project_to_physical(estimate);

  record.reconstructed = estimate;
  record.method = record.strength <= 0.01 ? ReconstructionMethod::pointer_weak_limit
                                          : ReconstructionMethod::pointer_finite;
  record.trace_dist = trace_distance(truth, estimate);
  record.purity_true = purity(truth);
  record.purity_measured = purity(estimate);
  return record;
}

std::vector<SweepRecord> run_sweep(const PathSpec& spec, const CampaignConfig& cfg,
                                   const std::function<DensityMatrix(double)>& truth_of) {
  std::vector<SweepRecord> records(spec.grid.size());
  const int threads = resolve_threads(cfg.threads, spec.grid.size());
  parallel_for(spec.grid.size(), threads, [&](std::size_t i) {
    records[i] = evaluate_point(spec.grid[i], truth_of(spec.grid[i]), cfg, i);
  });
  return records;
}

void append_formatted(std::string& line, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  line += buf;
}

}  // namespace

PathSpec default_path(PathId id, int steps) {
  if (steps < 2) throw std::invalid_argument("path grid needs at least 2 steps");
  const double span = (id == PathId::path3) ? M_PI / 2.0 : M_PI;
  PathSpec spec;
  spec.id = id;
  spec.grid.reserve(steps);
  for (int i = 0; i < steps; ++i) spec.grid.push_back(span * i / (steps - 1));
  return spec;
}

std::vector<SweepRecord> sweep_pure_path(const PathSpec& spec, const CampaignConfig& cfg) {
  if (spec.id != PathId::path1 && spec.id != PathId::path2)
    throw std::invalid_argument("sweep_pure_path expects path 1 or 2");
  for (double theta : spec.grid)
    if (theta < -1e-12 || theta > M_PI + 1e-12)
      throw std::invalid_argument("pure path grid must lie within [0, pi]");
  const double alpha = (spec.id == PathId::path1) ? 0.0 : -1.0;
  return run_sweep(spec, cfg, [alpha](double theta) {
    return density_from_pure(pure_path_state(theta, alpha));
  });
}

std::vector<SweepRecord> sweep_mixed(const PathSpec& spec, const CampaignConfig& cfg) {
  if (spec.id != PathId::path3)
    throw std::invalid_argument("sweep_mixed expects path 3");
  for (double phi : spec.grid)
    if (phi < -1e-12 || phi > M_PI / 2.0 + 1e-12)
      throw std::invalid_argument("mixed path grid must lie within [0, pi/2]");
  return run_sweep(spec, cfg, [](double phi) { return spun_mixed_analytic(phi); });
}

std::vector<BiasRow> run_bias_study(const std::vector<std::pair<std::string, DensityMatrix>>& states,
                                    const std::vector<double>& strengths,
                                    const CampaignConfig& cfg) {
  std::vector<BiasRow> rows;
  if (strengths.empty() || states.empty()) return rows;
  rows.reserve(states.size() * strengths.size());
  for (const auto& [name, rho] : states) {
    const auto curve = bias_curve(rho, strengths);
    for (const auto& [strength, error] : curve) {
      BiasRow row;
      row.state = name;
      row.strength = strength;
      row.max_element_error = error;
      const PointerConfig config = make_pointer_config(cfg.pointer.sigma_x,
                                                       strength * cfg.pointer.sigma_x);
      const DensityMatrix rec = direct_matrix(rho, config);
      row.trace_dist = trace_distance(rho, reconstructed_density(hermitized(rec.entries)));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void export_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << "param_deg,re_hh,im_hh,re_hv,im_hv,re_vh,im_vh,re_vv,im_vv,"
         "trace_distance,purity_true,purity_measured,strength,noise_sigma,trials,seed\n";
  for (const auto& r : records) {
    std::string line;
    append_formatted(line, r.parameter * 180.0 / M_PI);
    const Complex elements[4] = {r.reconstructed(0, 0), r.reconstructed(0, 1),
                                 r.reconstructed(1, 0), r.reconstructed(1, 1)};
    for (const Complex& e : elements) {
      line += ',';
      append_formatted(line, e.real());
      line += ',';
      append_formatted(line, e.imag());
    }
    for (double v : {r.trace_dist, r.purity_true, r.purity_measured, r.strength, r.noise_sigma}) {
      line += ',';
      append_formatted(line, v);
    }
    line += ',';
    line += std::to_string(r.trials);
    line += ',';
    line += std::to_string(r.seed);
    out << line << '\n';
  }
}

void export_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  export_csv(records, file);
  if (!file) throw std::runtime_error("write failed: " + path);
}

void export_csv(const std::vector<BiasRow>& rows, std::ostream& out) {
  out << "state,strength,max_element_error,trace_distance\n";
  for (const auto& r : rows) {
    std::string line = r.state;
    line += ',';
    append_formatted(line, r.strength);
    line += ',';
    append_formatted(line, r.max_element_error);
    line += ',';
    append_formatted(line, r.trace_dist);
    out << line << '\n';
  }
}

void export_csv(const std::vector<BiasRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  export_csv(rows, file);
  if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace dms

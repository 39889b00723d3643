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

#include "dms/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dms/rng.hpp"

namespace dms::cli {

namespace {

struct RawConfig {
  double sigma_um = 250.0;
  double delta_um = 176.0;
  std::optional<double> strength;
  double pitch_um = 2.2;
  int camera_width_px = 1024;
  int camera_height_px = 1024;
  double fourier_width_um = 90.0;
  std::optional<double> noise;
  int trials = 10;
  double background = 0.0;
  std::uint64_t seed = 0;
  int steps = -1;  // unset: 37 for paths 1-2, 19 for path 3
  bool camera = false;
  bool project = false;
  double filter_cutoff = 0.5;
  int threads = 0;
  std::string out;
};

CampaignConfig resolve(const RawConfig& raw) {
  CampaignConfig cfg;
  const double delta = raw.strength ? *raw.strength * raw.sigma_um : raw.delta_um;
  cfg.pointer = make_pointer_config(raw.sigma_um, delta);
  cfg.frame = CameraFrame::centered(raw.camera_width_px, raw.camera_height_px, raw.pitch_um);
  cfg.frame.fourier_width_um = raw.fourier_width_um;
  if (raw.noise && *raw.noise > 0.0) {
    NoiseModel noise;
    noise.relative_sigma = *raw.noise;
    noise.trials = raw.trials;
    noise.seed = raw.seed;
    noise.background_level = raw.background;
    cfg.noise = noise;
  }
  cfg.mode = raw.camera ? PipelineMode::camera : PipelineMode::analytic;
  cfg.filter_cutoff = raw.filter_cutoff;
  cfg.project = raw.project;
  cfg.steps = raw.steps;
  cfg.seed = raw.seed;
  cfg.out_path = raw.out;
  cfg.threads = raw.threads;
  return cfg;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

RawConfig parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  RawConfig raw;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    auto number = [&](double& slot) {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(line_no) + ": invalid value for '" + key + "'");
      slot = v;
    };
    auto integer = [&](int& slot) {
      double v = 0;
      number(v);
      slot = static_cast<int>(v);
    };

    if (key == "sigma_um") number(raw.sigma_um);
    else if (key == "delta_um") number(raw.delta_um);
    else if (key == "strength") { double v; number(v); raw.strength = v; }
    else if (key == "pitch_um") number(raw.pitch_um);
    else if (key == "camera_width_px") integer(raw.camera_width_px);
    else if (key == "camera_height_px") integer(raw.camera_height_px);
    else if (key == "fourier_width_um") number(raw.fourier_width_um);
    else if (key == "noise") { double v; number(v); raw.noise = v; }
    else if (key == "trials") integer(raw.trials);
    else if (key == "background") number(raw.background);
    else if (key == "seed") { double v; number(v); raw.seed = static_cast<std::uint64_t>(v); }
    else if (key == "steps") integer(raw.steps);
    else if (key == "camera") { int v; integer(v); raw.camera = v != 0; }
    else if (key == "project") { int v; integer(v); raw.project = v != 0; }
    else if (key == "filter_cutoff") number(raw.filter_cutoff);
    else if (key == "threads") integer(raw.threads);
    else if (key == "out") raw.out = value;
    else
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return raw;
}

// --state accepts a polarization label or "theta,alpha" with theta in degrees.
DensityMatrix parse_state(const std::string& text) {
  if (text.size() == 1) {
    const char c = text[0];
    const VectorXc ket = polarization_ket(c);  // throws on unknown label
    return density_matrix(ket * ket.adjoint());
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("state must be one of H,V,D,A,R,L or 'theta_deg,alpha'");
  const double theta = std::stod(text.substr(0, comma)) * M_PI / 180.0;
  const double alpha = std::stod(text.substr(comma + 1));
  return density_from_pure(pure_path_state(theta, alpha));
}

int parse_row_col(const std::string& text) {
  if (text == "H") return 0;
  if (text == "V") return 1;
  throw std::invalid_argument("--row/--col must be H or V");
}

double snap_for_display(double v) { return std::abs(v) < 5e-13 ? 0.0 : v; }

void write_records(const std::vector<SweepRecord>& records, const CampaignConfig& cfg,
                   std::ostream& out) {
  if (cfg.out_path.empty())
    export_csv(records, out);
  else
    export_csv(records, cfg.out_path);
}

int cmd_sweep(int path, const CampaignConfig& cfg, std::ostream& out) {
  const PathId id = static_cast<PathId>(path);
  const int steps = cfg.steps > 0 ? cfg.steps : (id == PathId::path3 ? 19 : 37);
  const PathSpec spec = default_path(id, steps);
  const std::vector<SweepRecord> records =
      (id == PathId::path3) ? sweep_mixed(spec, cfg) : sweep_pure_path(spec, cfg);
  write_records(records, cfg, out);
  return 0;
}

int cmd_bias(const CampaignConfig& cfg, const std::string& state_text, std::ostream& out) {
  std::vector<std::pair<std::string, DensityMatrix>> states;
  if (!state_text.empty()) {
    states.emplace_back(state_text, parse_state(state_text));
  } else {
    states.emplace_back("H", parse_state("H"));
    states.emplace_back("D", parse_state("D"));
    states.emplace_back("L", parse_state("L"));
    states.emplace_back("mixed30", spun_mixed_analytic(M_PI / 6.0));
    states.emplace_back("maximally_mixed", density_matrix(0.5 * MatrixXc::Identity(2, 2)));
  }
  const std::vector<double> strengths = {1e-3, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.704, 1.0};
  const auto rows = run_bias_study(states, strengths, cfg);
  if (cfg.out_path.empty())
    export_csv(rows, out);
  else
    export_csv(rows, cfg.out_path);
  return 0;
}

int cmd_element(const CampaignConfig& cfg, const std::string& state_text, int row, int col,
                std::ostream& out) {
  const DensityMatrix rho = parse_state(state_text);
  std::optional<NoiseModel> noise = cfg.noise;
  Complex value;
  if (cfg.mode == PipelineMode::camera) {
    const CameraCalibration cal =
        calibrate_camera(cfg.pointer, cfg.frame, noise, cfg.filter_cutoff, cfg.seed);
    const char labels[2] = {'H', 'V'};
    const ExpectationSet set = camera_expectation_set(
        rho, basis_projector(labels[row]), basis_projector(labels[col]), cfg.pointer, cfg.frame,
        cal, noise, cfg.filter_cutoff, derive_seed(cfg.seed, 0x5eedULL));
    value = direct_element(set, cfg.pointer);
  } else {
    value = reconstruct_element(rho, row, col, cfg.pointer, noise).value;
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.6f %+.6fi\n", snap_for_display(value.real()),
                snap_for_display(value.imag()));
  out << buf;
  return 0;
}

int cmd_calibrate(const CampaignConfig& cfg, std::ostream& out) {
  const PointerConfig& pointer = cfg.pointer;
  // Reference: nothing shifts. X exposure: |H> through the first crystal.
  // Y exposure: |D> through the second. Each moves the whole beam.
  const PointerField reference = initial_field(PureState{1.0, 0.0}, pointer);
  PointerField shifted_x =
      apply_weak_shift(reference, basis_projector('H'), Axis::x, pointer.delta_x);
  const double r = 1.0 / std::sqrt(2.0);
  PointerField shifted_y = apply_weak_shift(initial_field(PureState{r, r}, pointer),
                                            basis_projector('D'), Axis::y, pointer.delta_y);

  auto expose = [&](const PointerField& field, ImagePlane plane, std::uint64_t stream) {
    return acquire_exposure({{1.0, field}}, cfg.frame, plane, cfg.noise, cfg.filter_cutoff,
                            derive_seed(cfg.seed, stream));
  };
  const SyntheticImage ref_img = expose(reference, ImagePlane::image, 1);
  const SyntheticImage x_img = expose(shifted_x, ImagePlane::image, 2);
  const SyntheticImage y_img = expose(shifted_y, ImagePlane::image, 3);
  const SyntheticImage fourier_ref = expose(reference, ImagePlane::fourier_full, 4);

  const double delta_x = calibrate_shift(x_img, ref_img);
  const double delta_y = calibrate_shift(y_img, ref_img);
  const double scale = calibrate_momentum_scale(fourier_ref, pointer, Axis::x);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "delta_x_um=%.6f\ndelta_y_um=%.6f\nmomentum_scale_per_um=%.9g\n"
                "sigma_p=%.9g\nfourier_width_um=%.6f\n",
                delta_x, delta_y, scale, pointer.sigma_px(),
                image_axis_width(fourier_ref, Axis::x));
  out << buf;

  if (!cfg.out_path.empty()) {
    write_pgm(ref_img, cfg.out_path + "_reference.pgm");
    write_pgm(x_img, cfg.out_path + "_shift_x.pgm");
    write_pgm(y_img, cfg.out_path + "_shift_y.pgm");
    write_pgm(fourier_ref, cfg.out_path + "_fourier_reference.pgm");
  }
  return 0;
}

int cmd_qst_compare(const CampaignConfig& cfg, const std::string& state_text, std::ostream& out) {
  const DensityMatrix truth = parse_state(state_text);

  std::optional<NoiseModel> noise = cfg.noise;
  if (noise) noise->seed = cfg.seed;
  DensityMatrix direct =
      cfg.mode == PipelineMode::camera
          ? direct_matrix_camera(truth, cfg.pointer, cfg.frame, noise, cfg.filter_cutoff, cfg.seed)
          : direct_matrix(truth, cfg.pointer, noise);
  direct = reconstructed_density(0.5 * (direct.entries + direct.entries.adjoint().eval()));
  if (cfg.project) direct = project_to_physical(direct);

  TomographyData data = qst_probabilities(truth);
  double pair_tolerance = 1e-10;
  if (noise) {
    GaussianSampler gauss(derive_seed(noise->seed, 0x705ULL));
    double probs[6] = {data.p_h, data.p_v, data.p_d, data.p_a, data.p_r, data.p_l};
    double acc[6] = {0, 0, 0, 0, 0, 0};
    for (int t = 0; t < noise->trials; ++t)
      for (int k = 0; k < 6; ++k) acc[k] += probs[k] * (1.0 + noise->relative_sigma * gauss());
    for (int k = 0; k < 6; ++k) probs[k] = std::clamp(acc[k] / noise->trials, 0.0, 1.0);
    data = TomographyData{probs[0], probs[1], probs[2], probs[3], probs[4], probs[5]};
    pair_tolerance = std::max(1e-10, 10.0 * noise->relative_sigma);
  }
  DensityMatrix qst = qst_reconstruct(data, pair_tolerance);
  if (cfg.project) qst = project_to_physical(qst);

  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "state=%s\n"
                "direct_trace_distance=%.9g\n"
                "qst_trace_distance=%.9g\n"
                "direct_measurements_per_element=3 (2 bases)\n"
                "direct_measurements_total=12\n"
                "qst_measurements=6 projectors (3 bases)\n",
                state_text.c_str(), trace_distance(truth, direct), trace_distance(truth, qst));
  out << buf;
  return 0;
}

}  // namespace

CampaignConfig load_config(const std::string& path) { return resolve(parse_config_file(path)); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"direct density-matrix measurement simulator"};
  app.require_subcommand(1);

  RawConfig raw;
  std::string config_path;
  int path = 1;
  std::string state_text = "H";
  std::string row_text = "H";
  std::string col_text = "H";

  // Shared options are registered on each subcommand so that e.g.
  // `sweep --strength` and `element --strength` both parse.
  struct Flags {
    CLI::Option* strength = nullptr;
    CLI::Option* noise = nullptr;
    CLI::Option* trials = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* steps = nullptr;
    CLI::Option* camera = nullptr;
    CLI::Option* project = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* config = nullptr;
  };
  double strength_flag = 0.0;
  double noise_flag = 0.0;
  int trials_flag = 0;
  std::uint64_t seed_flag = 0;
  int steps_flag = 0;
  bool camera_flag = false;
  bool project_flag = false;
  std::string out_flag;

  auto add_common = [&](CLI::App* cmd) {
    Flags f;
    f.strength = cmd->add_option("--strength", strength_flag, "measurement strength delta/sigma");
    f.noise = cmd->add_option("--noise", noise_flag, "relative moment/intensity noise (e.g. 0.05)");
    f.trials = cmd->add_option("--trials", trials_flag, "frames averaged per measurement");
    f.seed = cmd->add_option("--seed", seed_flag, "master random seed");
    f.steps = cmd->add_option("--steps", steps_flag, "sweep grid points");
    f.camera = cmd->add_flag("--camera", camera_flag, "use the emulated camera pipeline");
    f.project = cmd->add_flag("--project", project_flag, "project results to physical states");
    f.out_opt = cmd->add_option("--out", out_flag, "output path");
    f.config = cmd->add_option("--config", config_path, "key=value configuration file");
    return f;
  };

  CLI::App* sweep = app.add_subcommand("sweep", "reconstruct states along a Poincare path");
  sweep->add_option("--path", path, "Poincare path (1, 2 or 3)")->check(CLI::Range(1, 3));
  const Flags sweep_flags = add_common(sweep);

  CLI::App* mixed = app.add_subcommand("mixed", "reconstruct the spun mixed-state family");
  const Flags mixed_flags = add_common(mixed);

  CLI::App* bias = app.add_subcommand("bias", "finite-strength bias study");
  bias->add_option("--state", state_text, "restrict to one state");
  const Flags bias_flags = add_common(bias);

  CLI::App* element = app.add_subcommand("element", "reconstruct a single matrix element");
  element->add_option("--state", state_text, "H|V|D|A|R|L or theta_deg,alpha");
  element->add_option("--row", row_text, "element row: H or V");
  element->add_option("--col", col_text, "element column: H or V");
  const Flags element_flags = add_common(element);

  CLI::App* calibrate = app.add_subcommand("calibrate", "emulated shift and momentum calibration");
  const Flags calibrate_flags = add_common(calibrate);

  CLI::App* qst = app.add_subcommand("qst-compare", "direct measurement vs tomography baseline");
  qst->add_option("--state", state_text, "H|V|D|A|R|L or theta_deg,alpha");
  const Flags qst_flags = add_common(qst);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (!config_path.empty()) raw = parse_config_file(config_path);

    const Flags* flags = nullptr;
    if (sweep->parsed()) flags = &sweep_flags;
    else if (mixed->parsed()) flags = &mixed_flags;
    else if (bias->parsed()) flags = &bias_flags;
    else if (element->parsed()) flags = &element_flags;
    else if (calibrate->parsed()) flags = &calibrate_flags;
    else flags = &qst_flags;

    if (flags->strength->count()) raw.strength = strength_flag;
    if (flags->noise->count()) raw.noise = noise_flag;
    if (flags->trials->count()) raw.trials = trials_flag;
    if (flags->seed->count()) raw.seed = seed_flag;
    if (flags->steps->count()) raw.steps = steps_flag;
    if (camera_flag) raw.camera = true;
    if (project_flag) raw.project = true;
    if (flags->out_opt->count()) raw.out = out_flag;

    CampaignConfig cfg = resolve(raw);

    if (sweep->parsed()) return cmd_sweep(path, cfg, out);
    if (mixed->parsed()) return cmd_sweep(3, cfg, out);
    if (bias->parsed()) return cmd_bias(cfg, bias->count("--state") ? state_text : "", out);
    if (element->parsed())
      return cmd_element(cfg, state_text, parse_row_col(row_text), parse_row_col(col_text), out);
    if (calibrate->parsed()) return cmd_calibrate(cfg, out);
    return cmd_qst_compare(cfg, state_text, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dms::cli

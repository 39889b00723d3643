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
#include <cstdio>
#include <fstream>

#include "dms/camera.hpp"
#include "test_helpers.hpp"

using namespace dms;
using namespace dmstest;

namespace {

const double kRoot2 = std::sqrt(2.0);

// Experimental geometry in micrometers.
PointerConfig lab_config() { return make_pointer_config(250.0, 176.0); }

// Wide test frame: +-4.5 sigma at the experimental pixel pitch.
CameraFrame lab_frame() { return CameraFrame::centered(1024, 1024, 2.2); }

// Coarse frame for moment tests: same span, 4x cheaper FFTs.
CameraFrame coarse_frame() { return CameraFrame::centered(512, 512, 4.4); }

PointerField sequence_field(const PureState& s, const PointerConfig& cfg, char i, char j) {
  PointerField field = initial_field(s, cfg);
  field = apply_weak_shift(field, basis_projector(i), Axis::x, cfg.delta_x);
  field = apply_weak_shift(field, basis_projector('D'), Axis::y, cfg.delta_y);
  return apply_strong_projection(field, basis_projector(j));
}

std::string temp_path(const char* name) {
  return std::string("dms_test_") + name;
}

}  // namespace

TEST_SUITE("camera") {

TEST_CASE("render_image conserves probability and centers the pointer") {
  const PointerConfig cfg = lab_config();
  const PointerField field = initial_field(PureState{1.0, 0.0}, cfg);
  const CameraFrame frame = coarse_frame();

  const SyntheticImage img = render_image(field, frame, ImagePlane::image);
  CHECK(std::abs(img.pixels.sum() - 1.0) < 1e-4);
  CHECK_FALSE(img.clipped);
  const auto [cx, cy] = image_centroid(img);
  CHECK(std::abs(cx - frame.origin_x_um) < 1e-6);
  CHECK(std::abs(cy - frame.origin_y_um) < 1e-6);
}

TEST_CASE("fourier plane renders the momentum profile at the configured width") {
  const PointerConfig cfg = lab_config();
  const PointerField field = initial_field(PureState{1.0, 0.0}, cfg);
  const SyntheticImage img = render_image(field, coarse_frame(), ImagePlane::fourier_full);
  CHECK(std::abs(img.pixels.sum() - 1.0) < 1e-4);
  CHECK(rel_err(image_axis_width(img, Axis::x), 90.0) < 1e-3);
  CHECK(rel_err(image_axis_width(img, Axis::y), 90.0) < 1e-3);
}

TEST_CASE("maximally shifted pointers sit one crystal shift apart") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = lab_frame();
  const PointerField reference = initial_field(PureState{1.0, 0.0}, cfg);
  const PointerField shifted =
      apply_weak_shift(reference, basis_projector('H'), Axis::x, cfg.delta_x);

  const SyntheticImage ref_img = render_image(reference, frame, ImagePlane::image);
  const SyntheticImage shift_img = render_image(shifted, frame, ImagePlane::image);
  const double measured = calibrate_shift(shift_img, ref_img);
  CHECK(std::abs(measured - cfg.delta_x) < 0.5 * frame.pitch_um);
}

TEST_CASE("off-sensor fields set the clipping flag") {
  const PointerConfig cfg = lab_config();
  PointerField field = initial_field(PureState{1.0, 0.0}, cfg);
  // Walk the field far off the sensor with repeated shifts.
  for (int k = 0; k < 30; ++k)
    field = apply_weak_shift(field, basis_projector('H'), Axis::x, 200.0);
  const SyntheticImage img = render_image(field, coarse_frame(), ImagePlane::image);
  CHECK(img.clipped);
}

TEST_CASE("noise is frame-global, reproducible and averages out") {
  const PointerConfig cfg = lab_config();
  const PointerField field = initial_field(PureState{1.0, 0.0}, cfg);
  const CameraFrame frame = coarse_frame();
  NoiseModel noise;
  noise.relative_sigma = 0.05;
  noise.trials = 10;
  noise.seed = 77;

  const SyntheticImage a = render_image(field, frame, ImagePlane::image, noise, 3);
  const SyntheticImage b = render_image(field, frame, ImagePlane::image, noise, 3);
  CHECK((a.pixels.array() == b.pixels.array()).all());  // bit-identical for identical seeds
  const SyntheticImage c = render_image(field, frame, ImagePlane::image, noise, 4);
  CHECK_FALSE((a.pixels.array() == c.pixels.array()).all());

  // Ten-frame averages shrink the residual intensity error to ~5%/sqrt(10).
  double spread = 0.0;
  const int n_seeds = 100;
  for (int s = 0; s < n_seeds; ++s) {
    NoiseModel local = noise;
    local.seed = 1000 + s;
    std::vector<SyntheticImage> frames;
    for (int t = 0; t < local.trials; ++t)
      frames.push_back(render_image(field, frame, ImagePlane::image, local, t));
    const double total = average_frames(frames).pixels.sum();
    spread += (total - 1.0) * (total - 1.0);
  }
  const double rms = std::sqrt(spread / n_seeds);
  CHECK(rms > 0.05 / std::sqrt(10.0) / 2.0);
  CHECK(rms < 0.05 / std::sqrt(10.0) * 2.0);
}

TEST_CASE("average_frames basics") {
  const PointerConfig cfg = lab_config();
  const SyntheticImage img =
      render_image(initial_field(PureState{1.0, 0.0}, cfg), coarse_frame(), ImagePlane::image);
  const SyntheticImage avg = average_frames({img, img, img});
  CHECK((avg.pixels - img.pixels).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((average_frames({img}).pixels.array() == img.pixels.array()).all());
  CHECK_THROWS_AS(average_frames({}), std::invalid_argument);
}

TEST_CASE("preprocess subtracts, filters and clips") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = coarse_frame();
  const SyntheticImage img =
      render_image(initial_field(PureState{1.0, 0.0}, cfg), frame, ImagePlane::image);

  // An image minus itself is identically zero.
  const SyntheticImage zero = preprocess(img, img, 0.5);
  CHECK(zero.pixels.cwiseAbs().maxCoeff() == 0.0);

  // Background-only input vanishes too.
  SyntheticImage background = img;
  background.pixels.setConstant(0.37);
  CHECK(preprocess(background, background, 0.5).pixels.cwiseAbs().maxCoeff() == 0.0);

  // The low-pass filter barely moves the centroid of a smooth Gaussian.
  SyntheticImage blank = img;
  blank.pixels.setZero();
  const SyntheticImage filtered = preprocess(img, blank, 0.5);
  const auto [cx0, cy0] = image_centroid(img);
  const auto [cx1, cy1] = image_centroid(filtered);
  CHECK(std::abs(cx1 - cx0) < 0.1 * frame.pitch_um);
  CHECK(std::abs(cy1 - cy0) < 0.1 * frame.pitch_um);
  for (int j = 0; j < filtered.frame.height_px; ++j)
    for (int i = 0; i < filtered.frame.width_px; ++i) CHECK(filtered.pixels(j, i) >= 0.0);

  SyntheticImage other = render_image(initial_field(PureState{1.0, 0.0}, cfg),
                                      CameraFrame::centered(256, 256, 4.4), ImagePlane::image);
  CHECK_THROWS_AS(preprocess(img, other, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(preprocess(img, blank, 0.0), std::invalid_argument);
}

TEST_CASE("image_moment about the origin") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = coarse_frame();

  // Centered symmetric Gaussian: joint moment vanishes.
  const SyntheticImage centered =
      render_image(initial_field(PureState{1.0, 0.0}, cfg), frame, ImagePlane::image);
  CHECK(std::abs(image_moment(centered)) < 1e-6);

  // Post-sequence image reproduces the analytic m_xy.
  const PointerConfig weak = make_pointer_config(250.0, 25.0);
  const PointerField field = sequence_field(PureState{1.0 / kRoot2, 1.0 / kRoot2}, weak, 'H', 'H');
  const SyntheticImage img = render_image(field, frame, ImagePlane::image);
  const double analytic =
      analytic_moment(field, {PointerOperator::position, PointerOperator::position});
  CHECK(rel_err(image_moment(img), analytic) < 0.005);

  SyntheticImage dead = centered;
  dead.pixels.setZero();
  CHECK_THROWS_AS(image_moment(dead), std::invalid_argument);
}

TEST_CASE("image_moment is invariant under origin re-expression") {
  // Narrow field, so sensor-edge truncation cannot leak into the moments.
  const PointerConfig cfg = make_pointer_config(50.0, 35.0);
  const CameraFrame frame = coarse_frame();
  const PointerField field = sequence_field(PureState{0.6, 0.8}, cfg, 'H', 'H');

  CameraFrame moved = frame;
  const double shift = 12.0 * frame.pitch_um;  // whole pixels
  moved.origin_x_um += shift;
  moved.origin_y_um += shift;

  SyntheticImage a = render_image(field, frame, ImagePlane::image);
  SyntheticImage b = render_image(field, moved, ImagePlane::image);
  CHECK(std::abs(image_moment(a) - image_moment(b)) < 1e-10);
}

TEST_CASE("calibrate_shift recovers the crystal displacement") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = lab_frame();
  const PointerField reference = initial_field(PureState{1.0, 0.0}, cfg);
  const PointerField shifted =
      apply_weak_shift(reference, basis_projector('H'), Axis::x, cfg.delta_x);

  const SyntheticImage ref_img = acquire_exposure({{1.0, reference}}, frame, ImagePlane::image);
  const SyntheticImage shift_img = acquire_exposure({{1.0, shifted}}, frame, ImagePlane::image);
  const double noiseless = calibrate_shift(shift_img, ref_img);
  CHECK(std::abs(noiseless - 176.0) < 1.1);
  CHECK(calibrate_shift(ref_img, ref_img) == 0.0);

  NoiseModel noise;
  noise.relative_sigma = 0.05;
  noise.trials = 10;
  for (int s = 0; s < 20; ++s) {
    noise.seed = 555 + s;
    const SyntheticImage nref =
        acquire_exposure({{1.0, reference}}, frame, ImagePlane::image, noise, 0.5, 2 * s);
    const SyntheticImage nshift =
        acquire_exposure({{1.0, shifted}}, frame, ImagePlane::image, noise, 0.5, 2 * s + 1);
    CHECK(std::abs(calibrate_shift(nshift, nref) - 176.0) / 176.0 < 0.02);
  }
}

TEST_CASE("calibrate_momentum_scale round trips") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = coarse_frame();
  const PointerField reference = initial_field(PureState{1.0, 0.0}, cfg);
  const SyntheticImage fourier = render_image(reference, frame, ImagePlane::fourier_full);

  const double scale = calibrate_momentum_scale(fourier, cfg, Axis::x);
  CHECK(rel_err(scale, cfg.sigma_px() / 90.0) < 1e-3);

  // Doubling the rendered width halves the scale.
  CameraFrame wide = frame;
  wide.fourier_width_um = 180.0;
  const SyntheticImage fourier_wide = render_image(reference, wide, ImagePlane::fourier_full);
  CHECK(rel_err(calibrate_momentum_scale(fourier_wide, cfg, Axis::x), scale / 2.0) < 1e-3);

  const SyntheticImage position = render_image(reference, frame, ImagePlane::image);
  CHECK_THROWS_AS(calibrate_momentum_scale(position, cfg, Axis::x), std::invalid_argument);

  // A strongly non-Gaussian (two-lobed) reference is rejected.
  PointerField lobes = initial_field(PureState{1.0, 0.0}, make_pointer_config(50.0, 600.0));
  lobes = apply_weak_shift(lobes, basis_projector('H'), Axis::x, 600.0);
  lobes.branches[0].terms.push_back({0.7, -600.0, 0.0});
  SyntheticImage bad = render_image(lobes, frame, ImagePlane::image);
  bad.plane = ImagePlane::fourier_full;
  CHECK_THROWS_AS(calibrate_momentum_scale(bad, cfg, Axis::x), std::invalid_argument);
}

TEST_CASE("scaled fourier moments reproduce grid momentum moments") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = coarse_frame();
  const PointerField field = sequence_field(PureState{0.6, 0.8}, cfg, 'H', 'H');

  const CameraCalibration cal = calibrate_camera(cfg, frame, std::nullopt, 1.0);
  SyntheticImage img = render_image(field, frame, ImagePlane::fourier_full);
  img.frame.origin_x_um = cal.planes[1].origin_x;
  img.frame.origin_y_um = cal.planes[1].origin_y;
  img.normalization = cal.planes[1].normalization;
  const double measured = image_moment(img) * cal.planes[1].scale_x * cal.planes[1].scale_y;
  const double expected =
      grid_moment(field, {PointerOperator::momentum, PointerOperator::momentum});
  CHECK(rel_err(measured, expected) < 0.005);
}

TEST_CASE("end-to-end camera moments match the analytic set") {
  const PointerConfig cfg = lab_config();
  const CameraFrame frame = coarse_frame();
  // A state with all four moments well away from zero.
  const double theta = 40.0 * M_PI / 180.0;
  const PureState s{std::cos(theta),
                    std::sin(theta) * std::exp(Complex(0.0, 30.0 * M_PI / 180.0))};
  const DensityMatrix rho = density_from_pure(s);

  const CameraCalibration cal = calibrate_camera(cfg, frame, std::nullopt, 0.5);
  const ExpectationSet cam = camera_expectation_set(rho, basis_projector('H'),
                                                    basis_projector('H'), cfg, frame, cal,
                                                    std::nullopt, 0.5);
  const ExpectationSet ana = expectation_set(rho, basis_projector('H'), basis_projector('H'), cfg);
  CHECK(rel_err(cam.m_xy, ana.m_xy) < 0.005);
  CHECK(rel_err(cam.m_pxpy, ana.m_pxpy) < 0.005);
  CHECK(rel_err(cam.m_pxy, ana.m_pxy) < 0.005);
  CHECK(rel_err(cam.m_xpy, ana.m_xpy) < 0.005);
}

TEST_CASE("full experimental sensor renders correctly") {
  const CameraFrame frame = CameraFrame::full_sensor();
  CHECK(frame.width_px == 2560);
  CHECK(frame.height_px == 1920);
  CHECK(frame.pitch_um == 2.2);

  const PointerConfig cfg = lab_config();
  const SyntheticImage img =
      render_image(initial_field(PureState{1.0, 0.0}, cfg), frame, ImagePlane::image);
  CHECK(std::abs(img.pixels.sum() - 1.0) < 1e-6);  // +-11 sigma: no truncation
  CHECK_FALSE(img.clipped);
}

TEST_CASE("pgm round trip is byte exact") {
  const PointerConfig cfg = lab_config();
  const SyntheticImage img = render_image(initial_field(PureState{1.0, 0.0}, cfg),
                                          CameraFrame::centered(96, 64, 4.4), ImagePlane::image);
  const std::string p1 = temp_path("roundtrip1.pgm");
  const std::string p2 = temp_path("roundtrip2.pgm");
  write_pgm(img, p1);
  const SyntheticImage back = read_pgm(p1);
  CHECK(back.frame.width_px == 96);
  CHECK(back.frame.height_px == 64);
  CHECK(back.frame.pitch_um == img.frame.pitch_um);
  CHECK(back.plane == img.plane);
  write_pgm(back, p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("csv grid dump") {
  const PointerConfig cfg = lab_config();
  const SyntheticImage img = render_image(initial_field(PureState{1.0, 0.0}, cfg),
                                          CameraFrame::centered(8, 4, 4.4), ImagePlane::image);
  const std::string path = temp_path("grid.csv");
  write_csv_grid(img, path);
  std::ifstream file(path);
  std::string line;
  int rows = 0;
  while (std::getline(file, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    ++rows;
  }
  CHECK(rows == 4);
  std::remove(path.c_str());
}

}  // TEST_SUITE

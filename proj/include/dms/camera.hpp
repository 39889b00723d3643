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

#include <Eigen/Dense>

#include "dms/noise.hpp"
#include "dms/pointer.hpp"
#include "dms/reconstruction.hpp"

namespace dms {

enum class ImagePlane { image, fourier_full, fourier_x_only, fourier_y_only };

/// Sensor geometry. Pixel (col i, row j) is centered at
/// ((i + 1/2) pitch, (j + 1/2) pitch); the origin is where the unshifted
/// pointer lands (default: sensor center). fourier_width_um is the physical
/// standard deviation the unshifted pointer is imaged with in a Fourier
/// plane, i.e. the focal-length scaling of the transform lens.
struct CameraFrame {
  int width_px = 1024;
  int height_px = 1024;
  double pitch_um = 2.2;
  double origin_x_um = 1024 * 2.2 / 2.0;
  double origin_y_um = 1024 * 2.2 / 2.0;
  double fourier_width_um = 90.0;

  double width_um() const { return width_px * pitch_um; }
  double height_um() const { return height_px * pitch_um; }

  static CameraFrame centered(int width_px, int height_px, double pitch_um);
  /// The full experimental sensor, 2560 x 1920 at 2.2 um.
  static CameraFrame full_sensor();
};

struct SyntheticImage {
  CameraFrame frame;
  ImagePlane plane = ImagePlane::image;
  Eigen::MatrixXd pixels;  // (row = y, col = x), nonnegative intensities
  /// Total intensity of the reference exposure this image is normalized to.
  double normalization = 1.0;
  /// Set when the field centroid falls more than 3 sigma outside the sensor.
  bool clipped = false;
  /// Quantization step used when the image came from a PGM file; 0 means
  /// derive it from the peak on the next write. Keeps round-trips bit exact.
  double intensity_scale = 0.0;
};

/// One incoherent component of a mixed state.
struct WeightedField {
  double weight = 1.0;
  PointerField field;
};

/// Synthesize a camera exposure by the midpoint rule: pixel = density at the
/// pixel center times pixel area. Fourier planes sample the analytically
/// transformed field, mapped onto the sensor through fourier_width_um. With a
/// noise model the frame gets one multiplicative intensity factor (drawn from
/// seed and frame_index) plus the additive background.
SyntheticImage render_image(const PointerField& field, const CameraFrame& frame,
                            ImagePlane plane,
                            const std::optional<NoiseModel>& noise = std::nullopt,
                            std::uint64_t frame_index = 0);

SyntheticImage render_mixture(const std::vector<WeightedField>& components,
                              const CameraFrame& frame, ImagePlane plane,
                              const std::optional<NoiseModel>& noise = std::nullopt,
                              std::uint64_t frame_index = 0);

/// Background subtraction, radial raised-cosine low-pass at `filter_cutoff`
/// (fraction of Nyquist; 1.0 disables), then clipping of negative pixels.
SyntheticImage preprocess(const SyntheticImage& image, const SyntheticImage& background,
                          double filter_cutoff = 0.5);

SyntheticImage average_frames(const std::vector<SyntheticImage>& images);

/// One complete emulated exposure: render noise.trials frames of the mixture
/// (or a single noiseless one), preprocess each against the flat background,
/// and average. `stream_seed` isolates the exposure's noise stream.
SyntheticImage acquire_exposure(const std::vector<WeightedField>& components,
                                const CameraFrame& frame, ImagePlane plane,
                                const std::optional<NoiseModel>& noise = std::nullopt,
                                double filter_cutoff = 0.5, std::uint64_t stream_seed = 0);

/// Intensity-weighted centroid in physical sensor coordinates (um).
std::pair<double, double> image_centroid(const SyntheticImage& image);

/// Standard deviation of the intensity profile along one axis (um).
double image_axis_width(const SyntheticImage& image, Axis axis);

/// Discrete joint moment about the frame origin,
///   sum_ij (x_i - x0)(y_j - y0) I(i, j) / normalization,
/// in um^2. For Fourier planes multiply by the momentum scale per axis.
double image_moment(const SyntheticImage& image);

/// Centroid difference along the dominant shift axis (um).
double calibrate_shift(const SyntheticImage& shifted, const SyntheticImage& reference);

/// Momentum-per-length scale such that (measured Fourier-plane width) * scale
/// equals sigma_p = 1/(2 sigma). The reference must be an unshifted-pointer
/// Fourier exposure.
double calibrate_momentum_scale(const SyntheticImage& fourier_reference,
                                const PointerConfig& config, Axis axis = Axis::x);

/// Per-plane calibration data measured from reference exposures: origin,
/// normalization, and momentum scales.
struct CameraCalibration {
  struct PlaneReference {
    double origin_x = 0.0, origin_y = 0.0;
    double normalization = 1.0;
    double scale_x = 1.0, scale_y = 1.0;  // momentum per um on momentum axes
  };
  PlaneReference planes[4];
};

CameraCalibration calibrate_camera(const PointerConfig& config, const CameraFrame& frame,
                                   const std::optional<NoiseModel>& noise = std::nullopt,
                                   double filter_cutoff = 0.5, std::uint64_t seed_salt = 0);

/// Full emulated acquisition of the four joint moments for one element:
/// render all four planes (noise.trials frames each), preprocess, average,
/// extract moments about the calibrated origin, convert momentum axes.
ExpectationSet camera_expectation_set(const DensityMatrix& rho, const Projector& first,
                                      const Projector& final_proj, const PointerConfig& config,
                                      const CameraFrame& frame, const CameraCalibration& cal,
                                      const std::optional<NoiseModel>& noise = std::nullopt,
                                      double filter_cutoff = 0.5, std::uint64_t seed_salt = 0);

/// direct_matrix with moments measured through the camera emulation.
DensityMatrix direct_matrix_camera(const DensityMatrix& rho, const PointerConfig& config,
                                   const CameraFrame& frame,
                                   const std::optional<NoiseModel>& noise = std::nullopt,
                                   double filter_cutoff = 0.5, std::uint64_t seed_salt = 0);

/// 16-bit binary PGM (P5) with a metadata comment line; write-read-write is
/// byte identical.
void write_pgm(const SyntheticImage& image, const std::string& path);
SyntheticImage read_pgm(const std::string& path);

/// Plain numeric grid for quick inspection.
void write_csv_grid(const SyntheticImage& image, const std::string& path);

}  // namespace dms

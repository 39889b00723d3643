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

#include "dms/camera.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef DMS_HAVE_FFTW3
#include <fftw3.h>

#include <mutex>
#else
#include <unsupported/Eigen/FFT>
#endif

#include "dms/rng.hpp"

namespace dms {

namespace {

bool x_is_momentum(ImagePlane plane) {
  return plane == ImagePlane::fourier_full || plane == ImagePlane::fourier_x_only;
}

bool y_is_momentum(ImagePlane plane) {
  return plane == ImagePlane::fourier_full || plane == ImagePlane::fourier_y_only;
}

const char* plane_name(ImagePlane plane) {
  switch (plane) {
    case ImagePlane::image: return "image";
    case ImagePlane::fourier_full: return "fourier_full";
    case ImagePlane::fourier_x_only: return "fourier_x_only";
    case ImagePlane::fourier_y_only: return "fourier_y_only";
  }
  return "image";
}

ImagePlane plane_from_name(const std::string& name) {
  if (name == "image") return ImagePlane::image;
  if (name == "fourier_full") return ImagePlane::fourier_full;
  if (name == "fourier_x_only") return ImagePlane::fourier_x_only;
  if (name == "fourier_y_only") return ImagePlane::fourier_y_only;
  throw std::runtime_error("unknown image plane: " + name);
}

// 1-D amplitude samples of one Gaussian term along a sensor axis. Momentum
// axes map sensor position to momentum through `render_scale` and carry
// sqrt(render_scale) so that the sampled density stays normalized.
std::vector<Complex> sensor_axis_table(bool momentum, int n_px, double pitch, double origin,
                                       double center, double sigma, double sigma_p,
                                       double render_scale) {
  std::vector<Complex> table(n_px);
  if (momentum) {
    const double jac = std::sqrt(render_scale);
    for (int i = 0; i < n_px; ++i) {
      const double p = ((i + 0.5) * pitch - origin) * render_scale;
      table[i] = jac * pointer_profile_momentum(p, sigma_p) * std::exp(Complex(0.0, -p * center));
    }
  } else {
    for (int i = 0; i < n_px; ++i) {
      const double z = (i + 0.5) * pitch - origin;
      table[i] = pointer_profile(z - center, sigma);
    }
  }
  return table;
}

void check_frames_match(const SyntheticImage& a, const SyntheticImage& b, const char* what) {
  if (a.frame.width_px != b.frame.width_px || a.frame.height_px != b.frame.height_px ||
      a.frame.pitch_um != b.frame.pitch_um || a.plane != b.plane)
    throw std::invalid_argument(std::string(what) + ": frame mismatch");
}

double pixel_sum(const SyntheticImage& image) { return image.pixels.sum(); }

// Radial raised-cosine low-pass in normalized (Nyquist = 1) frequency with a
// 20% transition band around the cutoff.
double filter_response(double r, double cutoff) {
  const double lo = 0.8 * cutoff;
  const double hi = 1.2 * cutoff;
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  const double c = std::cos(0.5 * M_PI * (r - lo) / (hi - lo));
  return c * c;
}

// Multiply a row-major (j, i) spectrum in place by the radial response.
// Frequencies are relative to Nyquist (0.5 cycles/px); only the transition
// annulus needs the actual cosine.
template <typename Spectrum>
void apply_filter_spectrum(Spectrum&& spectrum, int rows, int cols, double cutoff) {
  const double lo2 = 0.8 * cutoff * 0.8 * cutoff;
  const double hi2 = 1.2 * cutoff * 1.2 * cutoff;
  std::vector<double> fy2(rows), fx2(cols);
  for (int j = 0; j < rows; ++j) {
    const double fy = 2.0 * (j <= rows / 2 ? j : j - rows) / static_cast<double>(rows);
    fy2[j] = fy * fy;
  }
  for (int i = 0; i < cols; ++i) {
    const double fx = 2.0 * (i <= cols / 2 ? i : i - cols) / static_cast<double>(cols);
    fx2[i] = fx * fx;
  }
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const double r2 = fx2[i] + fy2[j];
      if (r2 <= lo2) continue;
      if (r2 >= hi2) {
        spectrum(j, i) = 0.0;
        continue;
      }
      spectrum(j, i) *= filter_response(std::sqrt(r2), cutoff);
    }
  }
}

#ifdef DMS_HAVE_FFTW3

// Per-thread cached real-to-complex 2-D plans; plan creation must be
// serialized globally.
struct FftwWorkspace {
  int rows = 0, cols = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  void ensure(int r, int c) {
    if (rows == r && cols == c) return;
    release();
    static std::mutex plan_mutex;
    std::lock_guard<std::mutex> lock(plan_mutex);
    real = fftw_alloc_real(static_cast<std::size_t>(r) * c);
    spectrum = fftw_alloc_complex(static_cast<std::size_t>(r) * (c / 2 + 1));
    forward = fftw_plan_dft_r2c_2d(r, c, real, spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(r, c, spectrum, real, FFTW_ESTIMATE);
    rows = r;
    cols = c;
  }
  void release() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (real) fftw_free(real);
    if (spectrum) fftw_free(spectrum);
    forward = backward = nullptr;
    real = nullptr;
    spectrum = nullptr;
    rows = cols = 0;
  }
  ~FftwWorkspace() { release(); }
};

void lowpass_filter(Eigen::MatrixXd& pixels, double cutoff) {
  const int rows = static_cast<int>(pixels.rows());
  const int cols = static_cast<int>(pixels.cols());
  thread_local FftwWorkspace ws;
  ws.ensure(rows, cols);

  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i) ws.real[static_cast<std::size_t>(j) * cols + i] = pixels(j, i);
  fftw_execute(ws.forward);

  // Half spectrum: x frequencies 0..cols/2 only, never wrapped.
  auto* data = reinterpret_cast<std::complex<double>*>(ws.spectrum);
  const int half = cols / 2 + 1;
  const double lo2 = 0.8 * cutoff * 0.8 * cutoff;
  const double hi2 = 1.2 * cutoff * 1.2 * cutoff;
  for (int j = 0; j < rows; ++j) {
    const double fy = 2.0 * (j <= rows / 2 ? j : j - rows) / static_cast<double>(rows);
    const double fy2 = fy * fy;
    for (int i = 0; i < half; ++i) {
      const double fx = 2.0 * i / static_cast<double>(cols);
      const double r2 = fx * fx + fy2;
      if (r2 <= lo2) continue;
      auto& value = data[static_cast<std::size_t>(j) * half + i];
      if (r2 >= hi2)
        value = 0.0;
      else
        value *= filter_response(std::sqrt(r2), cutoff);
    }
  }

  fftw_execute(ws.backward);
  const double scale = 1.0 / (static_cast<double>(rows) * cols);
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      pixels(j, i) = ws.real[static_cast<std::size_t>(j) * cols + i] * scale;
}

#else  // Eigen (kissfft) fallback

void lowpass_filter(Eigen::MatrixXd& pixels, double cutoff) {
  const int rows = static_cast<int>(pixels.rows());
  const int cols = static_cast<int>(pixels.cols());
  Eigen::MatrixXcd spectrum(rows, cols);
  thread_local Eigen::FFT<double> fft;  // caches twiddle tables per length

  Eigen::VectorXcd line_in(cols), line_out(cols);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) line_in[i] = pixels(j, i);
    fft.fwd(line_out, line_in);
    spectrum.row(j) = line_out.transpose();
  }
  Eigen::VectorXcd col_in(rows), col_out(rows);
  for (int i = 0; i < cols; ++i) {
    col_in = spectrum.col(i);
    fft.fwd(col_out, col_in);
    spectrum.col(i) = col_out;
  }

  apply_filter_spectrum([&spectrum](int j, int i) -> std::complex<double>& { return spectrum(j, i); },
                        rows, cols, cutoff);

  for (int i = 0; i < cols; ++i) {
    col_in = spectrum.col(i);
    fft.inv(col_out, col_in);
    spectrum.col(i) = col_out;
  }
  for (int j = 0; j < rows; ++j) {
    line_in = spectrum.row(j).transpose();
    fft.inv(line_out, line_in);
    for (int i = 0; i < cols; ++i) pixels(j, i) = line_out[i].real();
  }
}

#endif

std::vector<WeightedField> eigen_components(const DensityMatrix& rho, const PointerConfig& config,
                                            const Projector* first, const Projector* final_proj) {
  if (rho.dim() != 2)
    throw std::invalid_argument("camera pipeline supports d = 2 only");
  const auto eig = eigen_hermitian_2x2(rho.entries);
  const Projector middle = basis_projector('D');
  std::vector<WeightedField> components;
  for (int k = 0; k < 2; ++k) {
    if (eig.values[k] == 0.0) continue;
    const PureState component{eig.vectors(0, k), eig.vectors(1, k)};
    PointerField field = initial_field(component, config);
    if (first != nullptr) {
      field = apply_weak_shift(field, *first, Axis::x, config.delta_x);
      field = apply_weak_shift(field, middle, Axis::y, config.delta_y);
      field = apply_strong_projection(field, *final_proj);
    }
    components.push_back({eig.values[k], std::move(field)});
  }
  return components;
}

constexpr ImagePlane kPlanes[4] = {ImagePlane::image, ImagePlane::fourier_full,
                                   ImagePlane::fourier_x_only, ImagePlane::fourier_y_only};

}  // namespace

CameraFrame CameraFrame::centered(int width_px, int height_px, double pitch_um) {
  CameraFrame frame;
  frame.width_px = width_px;
  frame.height_px = height_px;
  frame.pitch_um = pitch_um;
  frame.origin_x_um = width_px * pitch_um / 2.0;
  frame.origin_y_um = height_px * pitch_um / 2.0;
  return frame;
}

CameraFrame CameraFrame::full_sensor() { return centered(2560, 1920, 2.2); }

SyntheticImage render_image(const PointerField& field, const CameraFrame& frame,
                            ImagePlane plane, const std::optional<NoiseModel>& noise,
                            std::uint64_t frame_index) {
  return render_mixture({{1.0, field}}, frame, plane, noise, frame_index);
}

SyntheticImage render_mixture(const std::vector<WeightedField>& components,
                              const CameraFrame& frame, ImagePlane plane,
                              const std::optional<NoiseModel>& noise,
                              std::uint64_t frame_index) {
  if (frame.pitch_um <= 0.0) throw std::invalid_argument("camera pitch must be positive");
  if (frame.origin_x_um < 0.0 || frame.origin_x_um > frame.width_um() ||
      frame.origin_y_um < 0.0 || frame.origin_y_um > frame.height_um())
    throw std::invalid_argument("camera origin lies outside the sensor");
  if (noise) validate(*noise);

  SyntheticImage img;
  img.frame = frame;
  img.plane = plane;
  img.pixels = Eigen::MatrixXd::Zero(frame.height_px, frame.width_px);

  const bool mom_x = x_is_momentum(plane);
  const bool mom_y = y_is_momentum(plane);

  for (const auto& component : components) {
    const PointerConfig& cfg = component.field.config;
    const double scale_x = cfg.sigma_px() / frame.fourier_width_um;
    const double scale_y = cfg.sigma_py() / frame.fourier_width_um;
    for (const auto& branch : component.field.branches) {
      const std::size_t n_terms = branch.terms.size();
      if (n_terms == 0) continue;
      std::vector<std::vector<Complex>> tx(n_terms), ty(n_terms);
      double weight_sum = 0.0, mean_cx = 0.0, mean_cy = 0.0;
      for (std::size_t k = 0; k < n_terms; ++k) {
        const auto& t = branch.terms[k];
        tx[k] = sensor_axis_table(mom_x, frame.width_px, frame.pitch_um, frame.origin_x_um,
                                  t.center_x, cfg.sigma_x, cfg.sigma_px(), scale_x);
        ty[k] = sensor_axis_table(mom_y, frame.height_px, frame.pitch_um, frame.origin_y_um,
                                  t.center_y, cfg.sigma_y, cfg.sigma_py(), scale_y);
        const double w = std::norm(t.coeff);
        weight_sum += w;
        mean_cx += w * t.center_x;
        mean_cy += w * t.center_y;
      }
      if (weight_sum > 0.0) {
        mean_cx /= weight_sum;
        mean_cy /= weight_sum;
        const double pos_x = frame.origin_x_um + (mom_x ? 0.0 : mean_cx);
        const double pos_y = frame.origin_y_um + (mom_y ? 0.0 : mean_cy);
        const double wx = mom_x ? frame.fourier_width_um : cfg.sigma_x;
        const double wy = mom_y ? frame.fourier_width_um : cfg.sigma_y;
        if (pos_x < -3.0 * wx || pos_x > frame.width_um() + 3.0 * wx ||
            pos_y < -3.0 * wy || pos_y > frame.height_um() + 3.0 * wy)
          img.clipped = true;
      }
      for (int j = 0; j < frame.height_px; ++j) {
        for (int i = 0; i < frame.width_px; ++i) {
          Complex amp = 0.0;
          for (std::size_t k = 0; k < n_terms; ++k)
            amp += branch.terms[k].coeff * tx[k][i] * ty[k][j];
          img.pixels(j, i) += component.weight * std::norm(amp);
        }
      }
    }
  }

  const double area = frame.pitch_um * frame.pitch_um;
  double factor = area;
  double background = 0.0;
  if (noise) {
    GaussianSampler gauss(derive_seed(noise->seed, frame_index));
    factor *= 1.0 + noise->relative_sigma * gauss();
    background = noise->background_level;
  }
  img.pixels = (img.pixels * factor).array() + background;
  return img;
}

SyntheticImage preprocess(const SyntheticImage& image, const SyntheticImage& background,
                          double filter_cutoff) {
  check_frames_match(image, background, "preprocess");
  if (filter_cutoff <= 0.0 || filter_cutoff > 1.0)
    throw std::invalid_argument("filter cutoff must lie in (0, 1]");
  SyntheticImage out = image;
  out.pixels -= background.pixels;
  if (filter_cutoff < 1.0) lowpass_filter(out.pixels, filter_cutoff);
  out.pixels = out.pixels.cwiseMax(0.0);
  return out;
}

SyntheticImage average_frames(const std::vector<SyntheticImage>& images) {
  if (images.empty()) throw std::invalid_argument("average_frames: empty frame list");
  SyntheticImage out = images.front();
  for (std::size_t k = 1; k < images.size(); ++k) {
    check_frames_match(images[k], out, "average_frames");
    out.pixels += images[k].pixels;
    out.clipped = out.clipped || images[k].clipped;
  }
  out.pixels /= static_cast<double>(images.size());
  return out;
}

SyntheticImage acquire_exposure(const std::vector<WeightedField>& components,
                                const CameraFrame& frame, ImagePlane plane,
                                const std::optional<NoiseModel>& noise,
                                double filter_cutoff, std::uint64_t stream_seed) {
  if (!noise) {
    const SyntheticImage raw = render_mixture(components, frame, plane);
    SyntheticImage blank;
    blank.frame = frame;
    blank.plane = plane;
    blank.pixels = Eigen::MatrixXd::Zero(frame.height_px, frame.width_px);
    return preprocess(raw, blank, filter_cutoff);
  }
  NoiseModel local = *noise;
  local.seed = stream_seed;
  SyntheticImage background;
  background.frame = frame;
  background.plane = plane;
  background.pixels =
      Eigen::MatrixXd::Constant(frame.height_px, frame.width_px, local.background_level);
  std::vector<SyntheticImage> frames;
  frames.reserve(local.trials);
  for (int t = 0; t < local.trials; ++t)
    frames.push_back(preprocess(render_mixture(components, frame, plane, local, t),
                                background, filter_cutoff));
  return average_frames(frames);
}

std::pair<double, double> image_centroid(const SyntheticImage& image) {
  const double total = pixel_sum(image);
  if (total <= 0.0) throw std::invalid_argument("image_centroid: zero total intensity");
  double cx = 0.0, cy = 0.0;
  for (int j = 0; j < image.frame.height_px; ++j)
    for (int i = 0; i < image.frame.width_px; ++i) {
      cx += ((i + 0.5) * image.frame.pitch_um) * image.pixels(j, i);
      cy += ((j + 0.5) * image.frame.pitch_um) * image.pixels(j, i);
    }
  return {cx / total, cy / total};
}

double image_axis_width(const SyntheticImage& image, Axis axis) {
  const double total = pixel_sum(image);
  if (total <= 0.0) throw std::invalid_argument("image_axis_width: zero total intensity");
  const auto [cx, cy] = image_centroid(image);
  const double center = (axis == Axis::x) ? cx : cy;
  double var = 0.0;
  for (int j = 0; j < image.frame.height_px; ++j)
    for (int i = 0; i < image.frame.width_px; ++i) {
      const double u = (axis == Axis::x) ? (i + 0.5) * image.frame.pitch_um
                                         : (j + 0.5) * image.frame.pitch_um;
      var += (u - center) * (u - center) * image.pixels(j, i);
    }
  return std::sqrt(var / total);
}

double image_moment(const SyntheticImage& image) {
  if (pixel_sum(image) == 0.0) throw std::invalid_argument("image_moment: zero total intensity");
  if (image.normalization <= 0.0) throw std::invalid_argument("image_moment: bad normalization");
  double moment = 0.0;
  for (int j = 0; j < image.frame.height_px; ++j) {
    const double dy = (j + 0.5) * image.frame.pitch_um - image.frame.origin_y_um;
    double row = 0.0;
    for (int i = 0; i < image.frame.width_px; ++i) {
      const double dx = (i + 0.5) * image.frame.pitch_um - image.frame.origin_x_um;
      row += dx * image.pixels(j, i);
    }
    moment += dy * row;
  }
  return moment / image.normalization;
}

double calibrate_shift(const SyntheticImage& shifted, const SyntheticImage& reference) {
  check_frames_match(shifted, reference, "calibrate_shift");
  const auto [sx, sy] = image_centroid(shifted);
  const auto [rx, ry] = image_centroid(reference);
  const double dx = sx - rx;
  const double dy = sy - ry;
  return std::abs(dx) >= std::abs(dy) ? dx : dy;
}

double calibrate_momentum_scale(const SyntheticImage& fourier_reference,
                                const PointerConfig& config, Axis axis) {
  const bool momentum_axis = (axis == Axis::x) ? x_is_momentum(fourier_reference.plane)
                                               : y_is_momentum(fourier_reference.plane);
  if (!momentum_axis)
    throw std::invalid_argument("calibrate_momentum_scale: axis is not a Fourier axis of this image");
  const double width = image_axis_width(fourier_reference, axis);
  if (!(width > 0.0))
    throw std::invalid_argument("calibrate_momentum_scale: reference fit failed");

  // Gaussian sanity check: excess kurtosis of the marginal should be ~0.
  const auto [cx, cy] = image_centroid(fourier_reference);
  const double center = (axis == Axis::x) ? cx : cy;
  double m4 = 0.0;
  const double total = pixel_sum(fourier_reference);
  for (int j = 0; j < fourier_reference.frame.height_px; ++j)
    for (int i = 0; i < fourier_reference.frame.width_px; ++i) {
      const double u = (axis == Axis::x) ? (i + 0.5) * fourier_reference.frame.pitch_um
                                         : (j + 0.5) * fourier_reference.frame.pitch_um;
      const double d = u - center;
      m4 += d * d * d * d * fourier_reference.pixels(j, i);
    }
  m4 /= total;
  const double kurtosis = m4 / (width * width * width * width);
  if (std::abs(kurtosis - 3.0) > 0.5)
    throw std::invalid_argument("calibrate_momentum_scale: reference is not Gaussian");

  const double sigma_p = (axis == Axis::x) ? config.sigma_px() : config.sigma_py();
  return sigma_p / width;
}

CameraCalibration calibrate_camera(const PointerConfig& config, const CameraFrame& frame,
                                   const std::optional<NoiseModel>& noise,
                                   double filter_cutoff, std::uint64_t seed_salt) {
  // The unshifted reference exposure is polarization independent.
  const std::vector<WeightedField> reference = {{1.0, initial_field(PureState{1.0, 0.0}, config)}};

  CameraCalibration cal;
  for (int p = 0; p < 4; ++p) {
    const ImagePlane plane = kPlanes[p];
    const std::uint64_t stream =
        noise ? derive_seed(derive_seed(noise->seed, seed_salt), static_cast<std::uint64_t>(2 * p))
              : 0;
    const SyntheticImage ref = acquire_exposure(reference, frame, plane, noise, filter_cutoff, stream);
    auto& entry = cal.planes[p];
    std::tie(entry.origin_x, entry.origin_y) = image_centroid(ref);
    entry.normalization = pixel_sum(ref);
    if (x_is_momentum(plane)) entry.scale_x = calibrate_momentum_scale(ref, config, Axis::x);
    if (y_is_momentum(plane)) entry.scale_y = calibrate_momentum_scale(ref, config, Axis::y);
  }
  return cal;
}

ExpectationSet camera_expectation_set(const DensityMatrix& rho, const Projector& first,
                                      const Projector& final_proj, const PointerConfig& config,
                                      const CameraFrame& frame, const CameraCalibration& cal,
                                      const std::optional<NoiseModel>& noise,
                                      double filter_cutoff, std::uint64_t seed_salt) {
  const std::vector<WeightedField> components =
      eigen_components(rho, config, &first, &final_proj);

  double moments[4] = {0.0, 0.0, 0.0, 0.0};
  for (int p = 0; p < 4; ++p) {
    const ImagePlane plane = kPlanes[p];
    const std::uint64_t stream =
        noise
            ? derive_seed(derive_seed(noise->seed, seed_salt), static_cast<std::uint64_t>(2 * p + 1))
            : 0;
    SyntheticImage img = acquire_exposure(components, frame, plane, noise, filter_cutoff, stream);
    const auto& entry = cal.planes[p];
    img.frame.origin_x_um = entry.origin_x;
    img.frame.origin_y_um = entry.origin_y;
    img.normalization = entry.normalization;
    double moment = image_moment(img);
    if (x_is_momentum(plane)) moment *= entry.scale_x;
    if (y_is_momentum(plane)) moment *= entry.scale_y;
    moments[p] = moment;
  }
  return ExpectationSet{moments[0], moments[1], moments[2], moments[3]};
}

DensityMatrix direct_matrix_camera(const DensityMatrix& rho, const PointerConfig& config,
                                   const CameraFrame& frame,
                                   const std::optional<NoiseModel>& noise,
                                   double filter_cutoff, std::uint64_t seed_salt) {
  const CameraCalibration cal =
      calibrate_camera(config, frame, noise, filter_cutoff, seed_salt);
  const char labels[2] = {'H', 'V'};
  MatrixXc out(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ExpectationSet set = camera_expectation_set(
          rho, basis_projector(labels[i]), basis_projector(labels[j]), config, frame, cal, noise,
          filter_cutoff, derive_seed(seed_salt + 1, static_cast<std::uint64_t>(2 * i + j)));
      out(i, j) = direct_element(set, config);
    }
  return reconstructed_density(std::move(out));
}

void write_pgm(const SyntheticImage& image, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);

  const double max_pixel = image.pixels.size() > 0 ? image.pixels.maxCoeff() : 0.0;
  double scale = image.intensity_scale;
  if (scale <= 0.0) scale = max_pixel > 0.0 ? max_pixel / 65535.0 : 1.0;

  char header[512];
  std::snprintf(header, sizeof(header),
                "P5\n# dms pitch=%.17g origin_x=%.17g origin_y=%.17g plane=%s norm=%.17g "
                "fwidth=%.17g iscale=%.17g clipped=%d\n%d %d\n65535\n",
                image.frame.pitch_um, image.frame.origin_x_um, image.frame.origin_y_um,
                plane_name(image.plane), image.normalization, image.frame.fourier_width_um,
                scale, image.clipped ? 1 : 0, image.frame.width_px, image.frame.height_px);
  file << header;

  std::vector<unsigned char> row(static_cast<std::size_t>(image.frame.width_px) * 2);
  for (int j = 0; j < image.frame.height_px; ++j) {
    for (int i = 0; i < image.frame.width_px; ++i) {
      double q = std::round(image.pixels(j, i) / scale);
      if (q < 0.0) q = 0.0;
      if (q > 65535.0) q = 65535.0;
      const auto v = static_cast<std::uint16_t>(q);
      row[2 * i] = static_cast<unsigned char>(v >> 8);
      row[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    file.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!file) throw std::runtime_error("write failed: " + path);
}

SyntheticImage read_pgm(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for reading: " + path);

  std::string magic;
  std::getline(file, magic);
  if (magic != "P5") throw std::runtime_error("not a binary PGM file: " + path);
  std::string comment;
  std::getline(file, comment);
  if (comment.rfind("# dms ", 0) != 0)
    throw std::runtime_error("missing dms metadata comment: " + path);

  SyntheticImage img;
  double iscale = 1.0;
  int clipped = 0;
  std::istringstream meta(comment.substr(6));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad metadata token: " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "plane") {
      img.plane = plane_from_name(value);
    } else {
      char* end = nullptr;
      const double num = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw std::runtime_error("bad metadata value: " + token);
      if (key == "pitch") img.frame.pitch_um = num;
      else if (key == "origin_x") img.frame.origin_x_um = num;
      else if (key == "origin_y") img.frame.origin_y_um = num;
      else if (key == "norm") img.normalization = num;
      else if (key == "fwidth") img.frame.fourier_width_um = num;
      else if (key == "iscale") iscale = num;
      else if (key == "clipped") clipped = static_cast<int>(num);
      else throw std::runtime_error("unknown metadata key: " + key);
    }
  }

  int width = 0, height = 0, maxval = 0;
  file >> width >> height >> maxval;
  file.get();  // the single whitespace after maxval
  if (width <= 0 || height <= 0) throw std::runtime_error("bad PGM dimensions: " + path);
  if (maxval != 65535) throw std::runtime_error("expected 16-bit PGM: " + path);

  img.frame.width_px = width;
  img.frame.height_px = height;
  img.clipped = clipped != 0;
  img.intensity_scale = iscale;
  img.pixels.resize(height, width);
  std::vector<unsigned char> row(static_cast<std::size_t>(width) * 2);
  for (int j = 0; j < height; ++j) {
    file.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (!file) throw std::runtime_error("truncated PGM data: " + path);
    for (int i = 0; i < width; ++i) {
      const std::uint16_t v =
          static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]);
      img.pixels(j, i) = v * iscale;
    }
  }
  return img;
}

void write_csv_grid(const SyntheticImage& image, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (int j = 0; j < image.frame.height_px; ++j) {
    for (int i = 0; i < image.frame.width_px; ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", image.pixels(j, i));
      if (i) file << ',';
      file << buf;
    }
    file << '\n';
  }
}

}  // namespace dms
